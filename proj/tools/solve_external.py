#!/usr/bin/env python3
"""Solve an exported LP file with HiGHS and write a `name value` solution file.

    captrans export-lp example.json --out example.lp
    python3 tools/solve_external.py example.lp example.sol --gap 1e-3
    captrans import-sol example.json example.sol --out full
"""
import argparse
import sys

import highspy


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("lp")
    ap.add_argument("solution")
    ap.add_argument("--gap", type=float, default=1e-4)
    ap.add_argument("--time-limit", type=float, default=36000.0)
    ap.add_argument("--threads", type=int, default=0)
    ap.add_argument("--quiet", action="store_true", help="suppress the HiGHS log")
    args = ap.parse_args()

    h = highspy.Highs()
    if args.quiet:
        h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("time_limit", args.time_limit)
    if args.threads > 0:
        h.setOptionValue("threads", args.threads)
    if h.readModel(args.lp) != highspy.HighsStatus.kOk:
        sys.exit(f"cannot read {args.lp}")
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    if info.primal_solution_status != 2:  # 2 = feasible
        sys.exit(f"no feasible solution: {h.modelStatusToString(status)}")

    names = h.getLp().col_names_
    values = h.getSolution().col_value
    with open(args.solution, "w", newline="\n") as f:
        f.write(f"# HiGHS {h.modelStatusToString(status)}, objective {info.objective_function_value:.17g}, "
                f"gap {info.mip_gap:.3g}\n")
        for name, v in zip(names, values):
            # Snap binaries and round-off so the file re-verifies exactly.
            if abs(v - round(v)) < 1e-7:
                v = float(round(v))
            f.write(f"{name} {v!r}\n")
    print(f"{h.modelStatusToString(status)}: objective {info.objective_function_value:.10g}, gap {info.mip_gap:.3g}")


if __name__ == "__main__":
    main()
