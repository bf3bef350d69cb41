#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucs/errors.hpp"
#include "ucs/model.hpp"

namespace ucs {

namespace detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& required,
                         const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& k : required)
    if (!obj.contains(k)) throw SchemaError(where + ": missing field '" + k + "'");
  for (const auto& [k, v] : obj.items())
    if (!required.count(k) && !optional.count(k))
      throw SchemaError(where + ": unknown field '" + k + "'");
}

inline double num(const json& obj, const std::string& where, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline int integer(const json& obj, const std::string& where, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    throw SchemaError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

}  // namespace detail

inline UCInstance parse_case(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("case document is not valid JSON: ") + e.what());
  }
  detail::require_keys(doc, "case", {"buses", "lines", "generators", "horizon"});

  UCInstance inst;
  if (!doc["buses"].is_array()) throw SchemaError("buses: expected an array");
  bool any_reference = false;
  for (std::size_t i = 0; i < doc["buses"].size(); ++i) {
    const auto& b = doc["buses"][i];
    const std::string where = "buses[" + std::to_string(i) + "]";
    detail::require_keys(b, where, {"id"}, {"reference"});
    Bus bus;
    bus.id = detail::integer(b, where, "id");
    bus.is_reference = b.value("reference", false);
    any_reference = any_reference || bus.is_reference;
    inst.buses.push_back(bus);
  }
  // Default reference: bus 0 when the file declares none.
  if (!any_reference && !inst.buses.empty()) inst.buses[0].is_reference = true;

  if (!doc["lines"].is_array()) throw SchemaError("lines: expected an array");
  for (std::size_t i = 0; i < doc["lines"].size(); ++i) {
    const auto& l = doc["lines"][i];
    const std::string where = "lines[" + std::to_string(i) + "]";
    detail::require_keys(l, where, {"id", "from", "to", "susceptance", "limit"});
    Line line;
    line.id = detail::integer(l, where, "id");
    line.from_bus = detail::integer(l, where, "from");
    line.to_bus = detail::integer(l, where, "to");
    line.susceptance = detail::num(l, where, "susceptance");
    line.flow_limit = detail::num(l, where, "limit");
    inst.lines.push_back(line);
  }

  if (!doc["generators"].is_array())
    throw SchemaError("generators: expected an array");
  for (std::size_t i = 0; i < doc["generators"].size(); ++i) {
    const auto& g = doc["generators"][i];
    const std::string where = "generators[" + std::to_string(i) + "]";
    detail::require_keys(g, where,
                         {"id", "bus", "cost", "pmin", "pmax", "ramp_up",
                          "ramp_down", "ramp_su", "ramp_sd", "u0", "x0"});
    Generator gen;
    gen.id = detail::integer(g, where, "id");
    gen.bus = detail::integer(g, where, "bus");
    gen.cost = detail::num(g, where, "cost");
    gen.p_min = detail::num(g, where, "pmin");
    gen.p_max = detail::num(g, where, "pmax");
    gen.ramp_up = detail::num(g, where, "ramp_up");
    gen.ramp_down = detail::num(g, where, "ramp_down");
    gen.ramp_startup = detail::num(g, where, "ramp_su");
    gen.ramp_shutdown = detail::num(g, where, "ramp_sd");
    if (!g["u0"].is_boolean()) throw SchemaError(where + ".u0: expected a boolean");
    gen.initial_on = g["u0"].get<bool>();
    gen.initial_output = detail::num(g, where, "x0");
    inst.generators.push_back(gen);
  }

  if (!doc["horizon"].is_number_integer())
    throw SchemaError("horizon: expected an integer");
  inst.horizon = doc["horizon"].get<int>();

  validate(inst);
  return inst;
}

inline std::string serialize_case(const UCInstance& inst) {
  using nlohmann::json;
  json doc;
  doc["buses"] = json::array();
  for (const auto& b : inst.buses) {
    json jb{{"id", b.id}};
    if (b.is_reference) jb["reference"] = true;
    doc["buses"].push_back(jb);
  }
  doc["lines"] = json::array();
  for (const auto& l : inst.lines)
    doc["lines"].push_back({{"id", l.id},
                            {"from", l.from_bus},
                            {"to", l.to_bus},
                            {"susceptance", l.susceptance},
                            {"limit", l.flow_limit}});
  doc["generators"] = json::array();
  for (const auto& g : inst.generators)
    doc["generators"].push_back({{"id", g.id},
                                 {"bus", g.bus},
                                 {"cost", g.cost},
                                 {"pmin", g.p_min},
                                 {"pmax", g.p_max},
                                 {"ramp_up", g.ramp_up},
                                 {"ramp_down", g.ramp_down},
                                 {"ramp_su", g.ramp_startup},
                                 {"ramp_sd", g.ramp_shutdown},
                                 {"u0", g.initial_on},
                                 {"x0", g.initial_output}});
  doc["horizon"] = inst.horizon;
  return doc.dump(2) + "\n";
}

// Load profile: whitespace- or comma-delimited numeric table, one row per
// bus, one column per timestep. Lines starting with '#' are comments.
inline LoadProfile parse_loads(const std::string& text, const UCInstance& inst) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof() && ls.fail())
      throw DimensionError("load table: non-numeric entry in row " +
                           std::to_string(rows.size()));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) != inst.nb())
    throw DimensionError("load table: expected " + std::to_string(inst.nb()) +
                         " rows, got " + std::to_string(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (static_cast<int>(rows[r].size()) != inst.horizon)
      throw DimensionError("load table row " + std::to_string(r) + ": expected " +
                           std::to_string(inst.horizon) + " columns, got " +
                           std::to_string(rows[r].size()));
  LoadProfile p;
  p.values = Matrix(rows.size(), inst.horizon);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < inst.horizon; ++c) {
      if (rows[r][c] < 0.0)
        throw NegativeLoadError("load table: negative load at bus " +
                                std::to_string(r) + ", step " +
                                std::to_string(c + 1));
      p.values(r, c) = rows[r][c];
    }
  return p;
}

inline std::string serialize_loads(const LoadProfile& p) {
  std::ostringstream out;
  out << "# rows = buses, columns = timesteps (MW)\n";
  out.precision(17);
  for (int b = 0; b < p.nb(); ++b) {
    for (int t = 1; t <= p.horizon(); ++t) {
      if (t > 1) out << ' ';
      out << p.at(b, t);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ucs
