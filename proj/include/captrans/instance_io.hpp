#pragma once

// Instance files: a JSON document with `schema: 1` and the sections horizon,
// machines, items, technologies, costs and options. Period arrays start at t = 1.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "captrans/errors.hpp"
#include "captrans/instance.hpp"

namespace captrans {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

inline Json to_json(const Instance& in) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["horizon"] = {{"T", in.horizon.periods},
                  {"T_simulated", in.horizon.simulated_periods},
                  {"l", in.horizon.shift_length},
                  {"s0", in.horizon.initial_shifts}};
  Json machines = Json::array();
  for (const auto& m : in.machines)
    machines.push_back({{"id", m.id},
                        {"technology", in.technologies.at(m.technology).id},
                        {"pool", m.pool == MachinePool::Existing ? "existing" : "candidate"},
                        {"s0", m.initial_state},
                        {"v", m.useful_life},
                        {"mu", m.max_utilization},
                        {"FTM", m.fixed_time_maintenance},
                        {"RMT", m.maintenance_durations},
                        {"O", m.workers},
                        {"RL0", m.remaining_life_at_start}});
  j["machines"] = machines;
  Json items = Json::array();
  for (const auto& it : in.items)
    items.push_back({{"id", it.id},
                     {"d", it.demand},
                     {"I0", it.initial_inventory},
                     {"r", it.rate},
                     {"ep", it.emission},
                     {"eh", it.holding_emission}});
  j["items"] = items;
  Json techs = Json::array();
  for (const auto& t : in.technologies) {
    Json ids = Json::array();
    for (auto k : t.machines) ids.push_back(in.machines.at(k).id);
    techs.push_back({{"id", t.id}, {"machines", ids}});
  }
  j["technologies"] = techs;
  const auto& c = in.costs;
  j["costs"] = {{"discount_rate", c.discount_rate},
                {"CI", c.investment},
                {"CP", c.production},
                {"CM", c.maintenance},
                {"CL", c.labor},
                {"CA", c.hiring},
                {"CF", c.firing},
                {"CO", c.shift_opening},
                {"CC", c.shift_closing},
                {"CH", c.holding},
                {"CT", c.carbon_tax},
                {"alpha", c.salvage}};
  j["options"] = {{"maintenance", in.options.maintenance},
                  {"single_shift", in.options.single_shift},
                  {"increasing_tax", in.options.increasing_tax}};
  return j;
}

namespace detail {

template <class T>
T field(const Json& obj, const char* section, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(std::string("missing field ") + section + "." + key);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field ") + section + "." + key + ": " + e.what());
  }
}

template <class T>
T field_or(const Json& obj, const char* section, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return field<T>(obj, section, key);
}

}  // namespace detail

/// Builds and validates an instance from a parsed document.
inline Instance instance_from_json(const Json& j) {
  using detail::field;
  using detail::field_or;
  if (!j.is_object()) throw ParseError("instance document must be an object");
  const int schema = field<int>(j, "", "schema");
  if (schema != kSchemaVersion) throw ParseError("unsupported schema version " + std::to_string(schema));
  for (const char* s : {"horizon", "machines", "items", "technologies", "costs"})
    if (!j.contains(s)) throw ParseError(std::string("missing section ") + s);

  Instance in;
  const auto& h = j["horizon"];
  in.horizon.periods = field<int>(h, "horizon", "T");
  in.horizon.simulated_periods = field_or<int>(h, "horizon", "T_simulated", in.horizon.periods);
  in.horizon.shift_length = field<double>(h, "horizon", "l");
  in.horizon.initial_shifts = field_or<int>(h, "horizon", "s0", 0);

  const auto& techs = j["technologies"];
  if (!techs.is_array()) throw ParseError("technologies must be an array");
  for (const auto& t : techs) in.technologies.push_back(Technology{field<std::string>(t, "technologies", "id"), {}});
  auto tech_index = [&](const std::string& id) {
    for (std::size_t i = 0; i < in.technologies.size(); ++i)
      if (in.technologies[i].id == id) return i;
    throw ParseError("unknown technology " + id);
  };

  if (!j["machines"].is_array()) throw ParseError("machines must be an array");
  for (const auto& mj : j["machines"]) {
    Machine m;
    m.id = field<std::string>(mj, "machines", "id");
    m.technology = tech_index(field<std::string>(mj, "machines", "technology"));
    const auto pool = field_or<std::string>(mj, "machines", "pool", "candidate");
    if (pool != "candidate" && pool != "existing") throw ParseError("machine " + m.id + ": pool must be candidate or existing");
    m.pool = pool == "existing" ? MachinePool::Existing : MachinePool::Candidate;
    m.initial_state = field_or<int>(mj, "machines", "s0", 0);
    m.useful_life = field<double>(mj, "machines", "v");
    m.max_utilization = field<double>(mj, "machines", "mu");
    m.fixed_time_maintenance = field<double>(mj, "machines", "FTM");
    m.maintenance_durations = field_or<std::vector<double>>(mj, "machines", "RMT", {});
    m.workers = field<double>(mj, "machines", "O");
    m.remaining_life_at_start = field_or<double>(mj, "machines", "RL0", 0.0);
    in.machines.push_back(std::move(m));
  }
  for (std::size_t t = 0; t < techs.size(); ++t)
    for (const auto& mid : detail::field<std::vector<std::string>>(techs[t], "technologies", "machines")) {
      std::size_t k = 0;
      while (k < in.machines.size() && in.machines[k].id != mid) ++k;
      if (k == in.machines.size()) throw ParseError("technology " + in.technologies[t].id + ": unknown machine " + mid);
      in.technologies[t].machines.push_back(k);
    }

  if (!j["items"].is_array()) throw ParseError("items must be an array");
  for (const auto& ij : j["items"]) {
    Item it;
    it.id = field<std::string>(ij, "items", "id");
    it.demand = field<std::vector<double>>(ij, "items", "d");
    it.initial_inventory = field_or<double>(ij, "items", "I0", 0.0);
    it.rate = field<std::vector<double>>(ij, "items", "r");
    it.emission = field<std::vector<double>>(ij, "items", "ep");
    it.holding_emission = field_or<double>(ij, "items", "eh", 0.0);
    in.items.push_back(std::move(it));
  }

  const auto& c = j["costs"];
  auto& cs = in.costs;
  cs.discount_rate = field<double>(c, "costs", "discount_rate");
  cs.investment = field<std::vector<double>>(c, "costs", "CI");
  cs.production = field<std::vector<std::vector<double>>>(c, "costs", "CP");
  cs.maintenance = field<std::vector<double>>(c, "costs", "CM");
  cs.labor = field<std::vector<double>>(c, "costs", "CL");
  cs.hiring = field<std::vector<double>>(c, "costs", "CA");
  cs.firing = field<std::vector<double>>(c, "costs", "CF");
  cs.shift_opening = field<std::vector<double>>(c, "costs", "CO");
  cs.shift_closing = field<std::vector<double>>(c, "costs", "CC");
  cs.holding = field<std::vector<double>>(c, "costs", "CH");
  cs.carbon_tax = field<std::vector<double>>(c, "costs", "CT");
  cs.salvage = field<std::vector<double>>(c, "costs", "alpha");

  if (j.contains("options")) {
    const auto& o = j["options"];
    in.options.maintenance = field_or<bool>(o, "options", "maintenance", true);
    in.options.single_shift = field_or<bool>(o, "options", "single_shift", false);
    in.options.increasing_tax = field_or<bool>(o, "options", "increasing_tax", true);
  }
  validate(in);
  return in;
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  if (f.bad()) throw IoError("cannot read " + path.string());
  return s.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  f.flush();
  if (!f) throw IoError("write failed for " + path.string());
}

inline Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(parse_json_text(read_text_file(path), path.string()));
}

inline void save_instance(const Instance& in, const std::filesystem::path& path) {
  write_text_file(path, to_json(in).dump(2) + "\n");
}

}  // namespace captrans
