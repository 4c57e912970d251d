#pragma once

// Comma-separated report tables (12 significant digits, LF endings) and a JSON
// manifest listing the files with the seed and a hash of the configuration.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "captrans/effectiveness.hpp"
#include "captrans/errors.hpp"
#include "captrans/instance_io.hpp"
#include "captrans/model.hpp"
#include "captrans/scenario.hpp"

namespace captrans {

inline std::string format_number(double v) {
  if (!std::isfinite(v)) throw Error("report values must be finite");
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  Table& row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw Error("table row has the wrong number of columns");
    rows_.push_back(std::move(cells));
    return *this;
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string csv() const {
    std::ostringstream o;
    auto line = [&o](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) o << ',';
        const auto& s = cells[c];
        if (s.find_first_of(",\"\n") == std::string::npos) {
          o << s;
        } else {
          o << '"';
          for (char ch : s) o << (ch == '"' ? "\"\"" : std::string(1, ch));
          o << '"';
        }
      }
      o << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return o.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Splits CSV text written by Table::csv (quoted fields allowed) into rows.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> cur;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') { cell += '"'; ++i; }
      else if (c == '"') quoted = false;
      else cell += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cur.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      cur.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(cur));
      cur.clear();
      any = false;
    } else {
      cell += c;
    }
  }
  if (any) {
    cur.push_back(std::move(cell));
    rows.push_back(std::move(cur));
  }
  return rows;
}

inline std::string tau_text(const std::optional<int>& t) { return t ? std::to_string(*t) : "never"; }

inline Table plan_table(const Plan& p, const Instance& in) {
  Table t({"machine", "technology", "period", "transition", "from_state", "to_state", "partition", "system_shifts",
           "production_units", "production_hours", "maintenances", "clock_hours", "remaining_life_hours",
           "salvage_hours"});
  for (std::size_t k = 0; k < in.machine_count(); ++k)
    for (int tt = 0; tt < p.periods(); ++tt) {
      const auto ut = static_cast<std::size_t>(tt);
      const auto e = p.transitions[k][ut];
      double units = 0.0, hours = 0.0;
      for (std::size_t i = 0; i < in.item_count(); ++i) {
        units += p.production[i][k][ut];
        if (in.items[i].rate[k] > 0.0) hours += p.production[i][k][ut] / in.items[i].rate[k];
      }
      int maint = 0;
      for (const auto& w : p.maintenance[k]) maint += w[ut] ? 1 : 0;
      t.row({in.machines[k].id, in.technologies[in.machines[k].technology].id, std::to_string(tt + 1),
             "e" + std::to_string(e.index()), std::to_string(e.tail()), std::to_string(e.head()),
             to_string(classify(e)), std::to_string(p.shifts[ut]), format_number(units), format_number(hours),
             std::to_string(maint), format_number(p.clock[k][ut]), format_number(p.remaining_life[k][ut]),
             format_number(p.salvage[k][ut])});
    }
  return t;
}

inline Table production_table(const Plan& p, const Instance& in) {
  Table t({"item", "machine", "period", "units"});
  for (std::size_t i = 0; i < in.item_count(); ++i)
    for (std::size_t k = 0; k < in.machine_count(); ++k)
      for (int tt = 0; tt < p.periods(); ++tt) {
        const double v = p.production[i][k][static_cast<std::size_t>(tt)];
        if (v != 0.0) t.row({in.items[i].id, in.machines[k].id, std::to_string(tt + 1), format_number(v)});
      }
  return t;
}

inline Table inventory_table(const Plan& p, const Instance& in) {
  Table t({"item", "period", "demand", "inventory"});
  for (std::size_t i = 0; i < in.item_count(); ++i)
    for (int tt = 0; tt < p.periods(); ++tt)
      t.row({in.items[i].id, std::to_string(tt + 1), format_number(in.items[i].demand[static_cast<std::size_t>(tt)]),
             format_number(p.inventory[i][static_cast<std::size_t>(tt)])});
  return t;
}

inline Table cost_table(const Plan& p) {
  const auto& c = p.costs;
  Table t({"family", "value"});
  t.row({"investment", format_number(c.investment)});
  t.row({"production", format_number(c.production)});
  t.row({"maintenance", format_number(c.maintenance)});
  t.row({"labor", format_number(c.labor)});
  t.row({"hiring", format_number(c.hiring)});
  t.row({"firing", format_number(c.firing)});
  t.row({"shift_changes", format_number(c.shift_changes)});
  t.row({"holding", format_number(c.holding)});
  t.row({"carbon_tax", format_number(c.carbon_tax)});
  t.row({"salvage_revenue", format_number(-c.salvage_revenue)});
  t.row({"total", format_number(p.objective)});
  return t;
}

inline Table levels_table(const EffectivenessReport& r, const Instance& in) {
  std::vector<std::string> head{"period"};
  for (const auto& tech : in.technologies) head.push_back("R_" + tech.id);
  head.push_back("weighted");
  Table t(std::move(head));
  for (int tt = 0; tt < r.periods; ++tt) {
    const auto ut = static_cast<std::size_t>(tt);
    std::vector<std::string> row{std::to_string(tt + 1)};
    for (const auto& lv : r.levels) row.push_back(format_number(lv[ut]));
    row.push_back(format_number(r.weighted.empty() ? 0.0 : r.weighted[ut]));
    t.row(std::move(row));
  }
  return t;
}

inline Table emissions_table(const EffectivenessReport& r) {
  Table t({"period", "emissions_spt", "emissions_spwt"});
  for (int tt = 0; tt < r.periods; ++tt) {
    const auto ut = static_cast<std::size_t>(tt);
    t.row({std::to_string(tt + 1), format_number(r.emissions[ut]),
           r.reference_emissions ? format_number((*r.reference_emissions)[ut]) : ""});
  }
  return t;
}

inline Table measures_table(const EffectivenessReport& r, const Instance& in) {
  Table t({"measure", "key", "value"});
  for (std::size_t j = 0; j < r.mean_emissions.size(); ++j) {
    t.row({"eta", in.technologies[j].id, format_number(r.mean_emissions[j])});
    if (!r.weights.empty()) t.row({"gamma", in.technologies[j].id, format_number(r.weights[j])});
  }
  for (std::size_t b = 0; b < r.betas.size(); ++b) t.row({"tau", format_number(r.betas[b]), tau_text(r.tau[b])});
  t.row({"final_level", "", format_number(r.final_level)});
  return t;
}

inline Table sweep_table(const std::vector<CellSummary>& cells) {
  Table t({"ep_ratio", "ci_ratio", "scenarios", "solved", "P_R_eq_0", "P_R_ge_0.5", "P_R_ge_0.75", "P_R_ge_1",
           "E_R"});
  for (const auto& c : cells)
    t.row({format_number(c.ep_ratio), format_number(c.ci_ratio), std::to_string(c.total), std::to_string(c.solved),
           format_number(c.p_zero), format_number(c.p_half), format_number(c.p_three_quarters), format_number(c.p_one),
           format_number(c.expectation)});
  return t;
}

inline Table tau_table(const std::vector<CellSummary>& cells) {
  Table t({"ep_ratio", "ci_ratio", "beta", "finite", "q1", "median", "q3"});
  for (const auto& c : cells)
    for (const auto& s : c.tau)
      if (s.finite > 0)
        t.row({format_number(c.ep_ratio), format_number(c.ci_ratio), format_number(s.beta), std::to_string(s.finite),
               format_number(*s.q1), format_number(*s.median), format_number(*s.q3)});
  return t;
}

inline Table scenario_table(const SweepResult& res) {
  std::vector<std::string> head{"instance", "xi", "ep_ratio", "ci_ratio", "status", "objective", "gap", "nodes",
                                "final_level"};
  for (double b : res.betas) head.push_back("tau_" + format_number(b));
  Table t(std::move(head));
  for (const auto& r : res.scenarios) {
    const auto& s = r.scenario;
    std::vector<std::string> row{std::to_string(s.instance + 1), format_number(s.xi), format_number(s.ep_ratio),
                                 format_number(s.ci_ratio), r.status ? to_string(*r.status) : "error",
                                 r.solved() ? format_number(r.objective) : "",
                                 r.solved() && std::isfinite(r.gap) ? format_number(r.gap) : "",
                                 std::to_string(r.nodes), r.solved() ? format_number(r.clean_level) : ""};
    for (std::size_t b = 0; b < res.betas.size(); ++b)
      row.push_back(r.solved() && b < r.tau.size() ? tau_text(r.tau[b]) : "");
    t.row(std::move(row));
  }
  return t;
}

/// 64-bit FNV-1a, used to fingerprint configurations in manifests.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct ReportBundle {
  std::vector<std::pair<std::string, Table>> tables;   // file name, table
  std::uint64_t seed = 0;
  Json config = Json::object();
};

/// Writes every table plus manifest.json into `dir` (created if needed).
inline std::vector<std::filesystem::path> write_reports(const ReportBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> out;
  Json files = Json::array();
  for (const auto& [name, table] : bundle.tables) {
    const auto path = dir / name;
    write_text_file(path, table.csv());
    out.push_back(path);
    files.push_back({{"file", name}, {"rows", table.rows().size()}, {"columns", table.header().size()}});
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(bundle.config.dump())));
  Json manifest = {{"schema", kSchemaVersion}, {"files", files}, {"seed", bundle.seed}, {"config", bundle.config},
                   {"config_hash", hash}};
  const auto mpath = dir / "manifest.json";
  write_text_file(mpath, manifest.dump(2) + "\n");
  out.push_back(mpath);
  return out;
}

}  // namespace captrans
