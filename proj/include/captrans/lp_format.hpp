#pragma once

// CPLEX-style LP text for handing models to an external MILP solver, a parser
// for the same dialect (used as a round-trip check), and import of `name value`
// solution files.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "captrans/errors.hpp"
#include "captrans/instance_io.hpp"
#include "captrans/milp.hpp"
#include "captrans/model.hpp"

namespace captrans {

class ExportError : public IoError {
 public:
  using IoError::IoError;
};

namespace detail {

inline std::string lp_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Row names restricted to characters every LP reader accepts.
inline std::string lp_row_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') out += c;
    else if (c == '[' || c == ',') out += '_';
  }
  return out;
}

inline void append_terms(std::ostringstream& o, const std::vector<std::pair<double, std::string>>& terms) {
  int on_line = 0;
  bool first = true;
  for (const auto& [v, name] : terms) {
    if (v == 0.0) continue;
    if (on_line == 8) {
      o << "\n   ";
      on_line = 0;
    }
    o << (v < 0 ? (first ? "-" : " - ") : (first ? "" : " + ")) << lp_number(std::abs(v)) << ' ' << name;
    first = false;
    ++on_line;
  }
  if (first) o << "0 " << (terms.empty() ? "" : terms.front().second);
}

}  // namespace detail

/// LP text of `m`. Throws ExportError when two columns or two rows share a name.
inline std::string lp_text(const MilpModel& m) {
  std::unordered_set<std::string> seen;
  for (const auto& v : m.vars()) {
    if (v.name.empty()) throw ExportError("column without a name");
    if (!seen.insert(v.name).second) throw ExportError("duplicate column name " + v.name);
  }
  std::unordered_set<std::string> row_names;
  std::vector<std::string> rn;
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    auto n = detail::lp_row_name(m.row(static_cast<int>(r)).name);
    if (n.empty()) n = "r" + std::to_string(r);
    if (!row_names.insert(n).second) throw ExportError("duplicate row name " + n);
    rn.push_back(std::move(n));
  }
  if (m.num_vars() == 0) throw ExportError("model has no columns");

  std::ostringstream o;
  o << "\\ captrans model\nMinimize\n obj: ";
  std::vector<std::pair<double, std::string>> terms;
  for (const auto& v : m.vars()) terms.emplace_back(v.cost, v.name);
  bool any = false;
  for (auto& t : terms) any = any || t.first != 0.0;
  if (!any) terms = {{0.0, m.vars().front().name}};
  detail::append_terms(o, terms);
  if (m.objective_offset() != 0.0)
    o << (m.objective_offset() < 0 ? " - " : " + ") << detail::lp_number(std::abs(m.objective_offset()));
  o << "\nSubject To\n";
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    const auto& row = m.row(static_cast<int>(r));
    std::vector<std::pair<double, std::string>> t;
    for (const auto& c : row.coefs) t.emplace_back(c.value, m.var(c.col).name);
    auto emit = [&](const std::string& name, const char* sense, double rhs) {
      o << ' ' << name << ": ";
      detail::append_terms(o, t);
      o << ' ' << sense << ' ' << detail::lp_number(rhs) << '\n';
    };
    if (t.empty()) continue;
    const bool lo = std::isfinite(row.lower), hi = std::isfinite(row.upper);
    if (lo && hi && row.lower == row.upper) emit(rn[r], "=", row.lower);
    else if (lo && hi) {
      emit(rn[r] + "_lo", ">=", row.lower);
      emit(rn[r] + "_hi", "<=", row.upper);
    } else if (lo) emit(rn[r], ">=", row.lower);
    else if (hi) emit(rn[r], "<=", row.upper);
  }
  o << "Bounds\n";
  for (const auto& v : m.vars()) {
    const bool lo = std::isfinite(v.lower), hi = std::isfinite(v.upper);
    if (!lo && !hi) o << ' ' << v.name << " free\n";
    else if (!hi) o << ' ' << detail::lp_number(v.lower) << " <= " << v.name << " <= +inf\n";
    else if (!lo) o << " -inf <= " << v.name << " <= " << detail::lp_number(v.upper) << '\n';
    else o << ' ' << detail::lp_number(v.lower) << " <= " << v.name << " <= " << detail::lp_number(v.upper) << '\n';
  }
  bool header = false;
  int on_line = 0;
  for (const auto& v : m.vars())
    if (v.kind == VarKind::Binary) {
      if (!header) o << "Binary\n";
      header = true;
      o << ' ' << v.name;
      if (++on_line == 10) {
        o << '\n';
        on_line = 0;
      }
    }
  if (header && on_line) o << '\n';
  o << "End\n";
  return o.str();
}

/// Reads the dialect written by lp_text (objective, constraints with one sense,
/// bounds lines, binary section).
inline MilpModel parse_lp_text(const std::string& text) {
  MilpModel m;
  std::unordered_map<std::string, int> cols;
  auto col = [&](const std::string& name) {
    auto it = cols.find(name);
    if (it != cols.end()) return it->second;
    const int j = m.add_variable({name, 0.0, kInf, VarKind::Continuous, 0.0});
    cols.emplace(name, j);
    return j;
  };
  // Tokenize, dropping comments.
  std::vector<std::string> tok;
  {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (auto p = line.find('\\'); p != std::string::npos) line.resize(p);
      std::istringstream ws(line);
      std::string w;
      while (ws >> w) tok.push_back(w);
    }
  }
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto number = [](const std::string& s, double& v) {
    if (s == "+inf" || s == "inf" || s == "infinity") { v = kInf; return true; }
    if (s == "-inf" || s == "-infinity") { v = -kInf; return true; }
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && p == e;
  };
  std::size_t i = 0;
  auto at_end = [&] { return i >= tok.size(); };
  auto is_section = [&](const std::string& s) {
    const auto l = lower(s);
    return l == "subject" || l == "st" || l == "s.t." || l == "bounds" || l == "binary" || l == "binaries" ||
           l == "end" || l == "general" || l == "generals";
  };
  // Parses "[name:] terms" until a sense token or section; returns coefficient list.
  auto expression = [&](std::vector<Coef>& out, double& constant) {
    double sign = 1.0, coef = 1.0;
    bool have_coef = false;
    while (!at_end()) {
      const auto& t = tok[i];
      if (t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" || is_section(t)) return;
      if (t.size() > 1 && t.back() == ':' && out.empty() && !have_coef) {
        ++i;
        continue;
      }
      ++i;
      if (t == "+") { sign = 1.0; continue; }
      if (t == "-") { sign = -1.0; continue; }
      double v;
      if (number(t, v)) {
        if (have_coef) {
          constant += sign * coef;
          sign = 1.0;
        }
        coef = v;
        have_coef = true;
        // A trailing number with no variable is a constant.
        if (at_end() || tok[i] == "+" || tok[i] == "-" || tok[i] == "<=" || tok[i] == ">=" || tok[i] == "=" ||
            is_section(tok[i])) {
          constant += sign * coef;
          sign = 1.0;
          coef = 1.0;
          have_coef = false;
        }
        continue;
      }
      out.push_back({col(t), sign * coef});
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
  };

  if (at_end() || (lower(tok[i]) != "minimize" && lower(tok[i]) != "minimise" && lower(tok[i]) != "min"))
    throw ParseError("LP text must start with Minimize");
  ++i;
  std::vector<Coef> obj;
  double offset = 0.0;
  expression(obj, offset);
  for (const auto& c : obj) m.var(c.col).cost += c.value;
  m.set_objective_offset(offset);

  if (at_end()) throw ParseError("LP text ends before the constraints");
  if (lower(tok[i]) == "subject") {
    ++i;
    if (at_end() || lower(tok[i]) != "to") throw ParseError("expected 'Subject To'");
    ++i;
  } else if (lower(tok[i]) == "st" || lower(tok[i]) == "s.t.") {
    ++i;
  }
  while (!at_end() && !is_section(tok[i])) {
    std::string name;
    if (tok[i].size() > 1 && tok[i].back() == ':') name = tok[i].substr(0, tok[i].size() - 1);
    std::vector<Coef> coefs;
    double constant = 0.0;
    expression(coefs, constant);
    if (at_end() || is_section(tok[i])) throw ParseError("constraint " + name + " has no sense");
    const std::string sense = tok[i++];
    double rhs;
    if (at_end() || !number(tok[i], rhs)) throw ParseError("constraint " + name + " has no right-hand side");
    ++i;
    rhs -= constant;
    double lo = -kInf, hi = kInf;
    if (sense == "<=" || sense == "=<") hi = rhs;
    else if (sense == ">=" || sense == "=>") lo = rhs;
    else lo = hi = rhs;
    m.add_row(name, 0, std::move(coefs), lo, hi);
  }
  std::string section;
  while (!at_end()) {
    const auto l = lower(tok[i]);
    if (l == "end") { ++i; break; }
    if (l == "bounds" || l == "binary" || l == "binaries" || l == "general" || l == "generals") {
      section = l;
      ++i;
      continue;
    }
    if (section == "bounds") {
      // Forms: a <= x <= b, x free, x >= a, x <= b.
      double a, b;
      if (i + 1 < tok.size() && lower(tok[i + 1]) == "free") {
        auto& v = m.var(col(tok[i]));
        v.lower = -kInf;
        v.upper = kInf;
        i += 2;
      } else if (number(tok[i], a) && i + 4 < tok.size() && tok[i + 1] == "<=" && tok[i + 3] == "<=" &&
                 number(tok[i + 4], b)) {
        auto& v = m.var(col(tok[i + 2]));
        v.lower = a;
        v.upper = b;
        i += 5;
      } else if (i + 2 < tok.size() && (tok[i + 1] == "<=" || tok[i + 1] == ">=" || tok[i + 1] == "=") &&
                 number(tok[i + 2], a)) {
        auto& v = m.var(col(tok[i]));
        if (tok[i + 1] == "<=") v.upper = a;
        else if (tok[i + 1] == ">=") v.lower = a;
        else v.lower = v.upper = a;
        i += 3;
      } else {
        throw ParseError("cannot parse bounds entry near '" + tok[i] + "'");
      }
    } else if (section == "binary" || section == "binaries") {
      auto& v = m.var(col(tok[i++]));
      v.kind = VarKind::Binary;
    } else {
      throw ParseError("unexpected token '" + tok[i] + "'");
    }
  }
  return m;
}

/// True when `b` has the same columns, costs, bounds, kinds and rows as `a`,
/// up to the row splitting done by lp_text.
inline bool same_model(const MilpModel& a, const MilpModel& b, std::string* why = nullptr) {
  auto fail = [&](std::string s) {
    if (why) *why = std::move(s);
    return false;
  };
  if (a.num_vars() != b.num_vars()) return fail("column count differs");
  for (std::size_t j = 0; j < a.num_vars(); ++j) {
    const auto& x = a.var(static_cast<int>(j));
    const int k = b.find(x.name);
    if (k < 0) return fail("missing column " + x.name);
    const auto& y = b.var(k);
    if (x.cost != y.cost || x.lower != y.lower || x.upper != y.upper || x.kind != y.kind)
      return fail("column " + x.name + " differs");
  }
  if (a.objective_offset() != b.objective_offset()) return fail("objective constant differs");
  std::size_t expected_rows = 0;
  for (const auto& r : a.rows())
    if (!r.coefs.empty())
      expected_rows += (std::isfinite(r.lower) && std::isfinite(r.upper) && r.lower != r.upper) ? 2 : 1;
  if (expected_rows != b.num_rows()) return fail("row count differs");
  std::size_t rb = 0;
  for (const auto& r : a.rows()) {
    if (r.coefs.empty()) continue;
    const int copies = (std::isfinite(r.lower) && std::isfinite(r.upper) && r.lower != r.upper) ? 2 : 1;
    for (int c = 0; c < copies; ++c, ++rb) {
      const auto& s = b.row(static_cast<int>(rb));
      std::map<std::string, double> lhs, rhs;
      for (const auto& q : r.coefs)
        if (q.value != 0.0) lhs[a.var(q.col).name] += q.value;
      for (const auto& q : s.coefs)
        if (q.value != 0.0) rhs[b.var(q.col).name] += q.value;
      if (lhs != rhs) return fail("coefficients of row " + r.name + " differ");
      const double lo = copies == 2 ? (c == 0 ? r.lower : -kInf) : r.lower;
      const double hi = copies == 2 ? (c == 0 ? kInf : r.upper) : r.upper;
      if (s.lower != lo || s.upper != hi) return fail("sides of row " + r.name + " differ");
    }
  }
  return true;
}

/// Writes the LP file and re-parses it; a mismatch raises ExportError.
inline void export_lp_file(const MilpModel& m, const std::filesystem::path& path) {
  const std::string text = lp_text(m);
  std::string why;
  if (!same_model(m, parse_lp_text(text), &why)) throw ExportError("LP round-trip check failed: " + why);
  write_text_file(path, text);
}

/// Parses `name value` lines (blank lines and `#` comments allowed). Every model
/// column must appear exactly once.
inline std::vector<double> parse_solution_text(const std::string& text, const MilpModel& m) {
  std::vector<double> x(m.num_vars(), 0.0);
  std::vector<char> seen(m.num_vars(), 0);
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.resize(p);
    std::istringstream ws(line);
    std::string name, value, extra;
    if (!(ws >> name)) continue;
    if (!(ws >> value)) throw ParseError("line " + std::to_string(lineno) + ": missing value for " + name);
    if (ws >> extra) throw ParseError("line " + std::to_string(lineno) + ": trailing text");
    double v;
    const char* b = value.data();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size())
      throw ParseError("line " + std::to_string(lineno) + ": bad number '" + value + "'");
    const int j = m.find(name);
    if (j < 0) throw ParseError("line " + std::to_string(lineno) + ": unknown variable " + name);
    if (seen[static_cast<std::size_t>(j)]) throw ParseError("variable " + name + " given twice");
    seen[static_cast<std::size_t>(j)] = 1;
    x[static_cast<std::size_t>(j)] = v;
  }
  std::size_t missing = 0;
  std::string first;
  for (std::size_t j = 0; j < seen.size(); ++j)
    if (!seen[j] && missing++ == 0) first = m.var(static_cast<int>(j)).name;
  if (missing) throw ParseError("solution is truncated: " + std::to_string(missing) + " variables missing, first " + first);
  return x;
}

inline std::string solution_text(const MilpModel& m, const std::vector<double>& x) {
  std::ostringstream o;
  o << "# name value\n";
  for (std::size_t j = 0; j < m.num_vars(); ++j) o << m.var(static_cast<int>(j)).name << ' ' << detail::lp_number(x[j]) << '\n';
  return o.str();
}

/// Reads an external solution and decodes it, re-verifying every row.
inline Plan import_external_solution(const std::filesystem::path& path, const PlanningModel& pm) {
  return decode(pm, parse_solution_text(read_text_file(path), pm.milp));
}

}  // namespace captrans
