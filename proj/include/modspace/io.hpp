#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modspace/error.hpp"
#include "modspace/field.hpp"
#include "modspace/probes.hpp"

namespace modspace::io {

using json = nlohmann::ordered_json;

// Field document:
//   {"n": 1, "P": 1, "M": 8, "samples": [[re, im], ...]}
// samples: exactly M^n pairs, row-major (axis 0 slowest).

inline json to_json(const Field& f) {
  const GridSpec& g = f.grid();
  json samples = json::array();
  for (const cplx& z : f.samples()) samples.push_back(json::array({z.real(), z.imag()}));
  return json{{"n", g.n}, {"P", g.P}, {"M", g.M}, {"samples", std::move(samples)}};
}

inline Field field_from_json(const json& doc) {
  require(doc.is_object(), ErrorKind::Format, "field document must be an object");
  for (const char* key : {"n", "P", "M", "samples"})
    require(doc.contains(key), ErrorKind::Format, std::string("field document lacks key '") + key + "'");
  for (const char* key : {"n", "P", "M"})
    require(doc[key].is_number_integer(), ErrorKind::Format, std::string("'") + key + "' must be an integer");
  GridSpec grid;
  try {
    grid = make_grid(doc["n"].get<int>(), doc["P"].get<int>(), doc["M"].get<int>());
  } catch (const Error& e) {
    throw Error(ErrorKind::Format, std::string("bad grid in field document: ") + e.what());
  }
  const json& raw = doc["samples"];
  require(raw.is_array(), ErrorKind::Format, "'samples' must be an array");
  require(raw.size() == grid.size(), ErrorKind::Format,
          "expected " + std::to_string(grid.size()) + " samples, found " + std::to_string(raw.size()));
  std::vector<cplx> values;
  values.reserve(grid.size());
  for (const json& pair : raw) {
    require(pair.is_array() && pair.size() == 2 && pair[0].is_number() && pair[1].is_number(),
            ErrorKind::Format, "each sample must be a [re, im] pair of numbers");
    values.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return Field(grid, std::move(values));
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for '" + path.string() + "'");
}

inline Field load_field(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Format, "malformed field file '" + path.string() + "': " + e.what());
  }
  return field_from_json(doc);
}

inline void save_field(const std::filesystem::path& path, const Field& f) {
  write_text(path, to_json(f).dump() + "\n");
}

inline json to_json(const SlopeFit& fit) {
  return json{{"slope", fit.slope}, {"std_error", fit.std_error}, {"intercept", fit.intercept}};
}

inline json to_json(const ProbeReport& rep, bool timing = false) {
  json checks = json::array();
  for (const SlopeCheck& c : rep.checks)
    checks.push_back(json{{"name", c.name},
                          {"fitted", to_json(c.fit)},
                          {"predicted", c.predicted},
                          {"tolerance", c.tolerance},
                          {"sign_required", c.require_sign},
                          {"basis", c.basis},
                          {"pass", c.pass}});
  json doc{{"probe", rep.probe},
           {"verdict", std::string(to_string(rep.verdict))},
           {"checks", std::move(checks)},
           {"columns", rep.columns},
           {"rows", rep.rows},
           {"notes", rep.notes}};
  if (timing) doc["runtime_seconds"] = rep.runtime_seconds;
  return doc;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Header line from `columns`, then one line per row, 17 significant digits.
inline std::string to_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += '\n';
  }
  return out;
}

inline std::string to_csv(const ProbeReport& rep) { return to_csv(rep.columns, rep.rows); }

}  // namespace modspace::io
