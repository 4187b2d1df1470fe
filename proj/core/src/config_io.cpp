#include "syncstab/config_io.hpp"

#include <array>
#include <cstdlib>
#include <map>
#include <string>

#include <json.hpp>

#include "syncstab/errors.hpp"
#include "syncstab/textio.hpp"

namespace syncstab {

namespace {

using nlohmann::json;

const std::map<std::string, double>& unit_table() {
  static const std::map<std::string, double> table = [] {
    std::map<std::string, double> t;
    const std::array<const char*, 13> bases = {"W",  "V",   "A",  "H",  "VAr",
                                               "var", "VA",  "Nm", "N·m", "Ohm",
                                               "ohm", "AH",  "s"};
    for (const char* b : bases) {
      t[b] = 1.0;
      t[std::string("m") + b] = 1e-3;
      t[std::string("u") + b] = 1e-6;
      t[std::string("k") + b] = 1e3;
      t[std::string("M") + b] = 1e6;
    }
    t["kVAR"] = 1e3;
    t["A·H"] = 1.0;
    t["kA·H"] = 1e3;
    t["rad/s"] = 1.0;
    return t;
  }();
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_quantity(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty numeric value");
  char* end = nullptr;
  const double base = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) {
    throw ConfigError("cannot parse number from '" + text + "'");
  }
  const std::string unit = trim(std::string(end));
  if (unit.empty()) return base;
  const auto& table = unit_table();
  const auto it = table.find(unit);
  if (it == table.end()) {
    throw ConfigError("unknown unit '" + unit + "' in '" + text + "'");
  }
  return base * it->second;
}

namespace {

double number_field(const json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("missing config key '" + key + "'");
  }
  if (it->is_number()) return it->get<double>();
  if (it->is_string()) return parse_quantity(it->get<std::string>());
  throw ConfigError("config key '" + key +
                    "' must be a number or a string with a unit");
}

constexpr std::array<const char*, 17> kSchemaKeys = {
    "Rs",   "Ls",   "n",    "J",    "Dp",  "Dq", "m",  "K", "Tm",
    "Qset", "vset", "umin", "umax", "eps", "V",  "wg", "wn"};

}  // namespace

ModelConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : kSchemaKeys) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }

  ModelConfig cfg;
  cfg.params.Rs = number_field(j, "Rs");
  cfg.params.Ls = number_field(j, "Ls");
  cfg.params.n = number_field(j, "n");
  cfg.params.J = number_field(j, "J");
  cfg.params.Dp = number_field(j, "Dp");
  cfg.params.Dq = number_field(j, "Dq");
  cfg.params.m = number_field(j, "m");
  cfg.params.K = number_field(j, "K");
  cfg.params.Tm = number_field(j, "Tm");
  cfg.params.Qset = number_field(j, "Qset");
  cfg.params.vset = number_field(j, "vset");
  cfg.params.umin = number_field(j, "umin");
  cfg.params.umax = number_field(j, "umax");
  cfg.params.eps = number_field(j, "eps");
  cfg.grid.V = number_field(j, "V");
  cfg.grid.omega_g = number_field(j, "wg");
  cfg.grid.omega_n = number_field(j, "wn");

  cfg.params.validate();
  cfg.grid.validate();
  return cfg;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text);
}

std::string canonical_param_string(const ModelConfig& c) {
  std::string s;
  const auto add = [&](const char* key, double v) {
    s += key;
    s += '=';
    s += fmt17(v);
    s += ';';
  };
  add("Rs", c.params.Rs);
  add("Ls", c.params.Ls);
  add("n", c.params.n);
  add("J", c.params.J);
  add("Dp", c.params.Dp);
  add("Dq", c.params.Dq);
  add("m", c.params.m);
  add("K", c.params.K);
  add("Tm", c.params.Tm);
  add("Qset", c.params.Qset);
  add("vset", c.params.vset);
  add("umin", c.params.umin);
  add("umax", c.params.umax);
  add("eps", c.params.eps);
  add("V", c.grid.V);
  add("wg", c.grid.omega_g);
  add("wn", c.grid.omega_n);
  return s;
}

std::string param_hash(const ModelConfig& config) {
  return hex64(fnv1a64(canonical_param_string(config)));
}

}  // namespace syncstab
