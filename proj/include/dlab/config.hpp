#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "dlab/errors.hpp"
#include "dlab/model.hpp"

namespace dlab {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& v, int line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ParseError(line, "cannot parse '" + v + "' as a real number");
  return x;
}

}  // namespace detail

// Line-based `key = value` configuration with `#` comments and sections
// [base], [global_map] and optionally [defaults]. With `use = true` under
// [defaults], missing keys fall back to the built-in default model;
// otherwise every key is required. Unknown sections and keys are rejected.
inline ModelSpec parse_model(const std::string& text) {
  static const std::set<std::string> base_keys = {"lambda", "gamma_sign"};
  static const std::set<std::string> global_keys = {"x1p", "x2p", "ym",  "a11", "a12", "a21",
                                                    "a22", "b1",  "b2",  "c1",  "c2",  "d"};

  std::map<std::string, double> values;  // "section.key" -> value
  bool use_defaults = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = detail::trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section != "base" && section != "global_map" && section != "defaults")
        throw ParseError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    if (section.empty()) throw ParseError(line, "key '" + key + "' outside of any section");
    if (section == "defaults") {
      if (key != "use") throw ParseError(line, "unknown key '" + key + "' in [defaults]");
      if (val == "true")
        use_defaults = true;
      else if (val == "false")
        use_defaults = false;
      else
        throw ParseError(line, "expected true or false for 'use'");
      continue;
    }
    const auto& allowed = section == "base" ? base_keys : global_keys;
    if (!allowed.count(key))
      throw ParseError(line, "unknown key '" + key + "' in [" + section + "]");
    if (values.count(section + "." + key))
      throw ParseError(line, "duplicate key '" + key + "'");
    values[section + "." + key] = detail::parse_real(val, line);
  }

  ModelSpec spec = default_model();
  if (!use_defaults) {
    for (const auto& k : base_keys)
      if (!values.count("base." + k))
        throw ParseError(0, "missing key '" + k + "' in [base] (no [defaults] use = true)");
    for (const auto& k : global_keys)
      if (!values.count("global_map." + k))
        throw ParseError(0, "missing key '" + k + "' in [global_map] (no [defaults] use = true)");
  }

  auto get = [&](const std::string& name, double fallback) {
    const auto it = values.find(name);
    return it == values.end() ? fallback : it->second;
  };
  spec.base.lambda = get("base.lambda", spec.base.lambda);
  const double gs = get("base.gamma_sign", spec.base.gamma_sign);
  if (gs != 1.0 && gs != -1.0)
    throw InvariantViolationError("gamma_sign must be +1 or -1");
  spec.base.gamma_sign = gs > 0 ? +1 : -1;

  GlobalCoeffs& c = spec.coeffs;
  c.x1p = get("global_map.x1p", c.x1p);
  c.x2p = get("global_map.x2p", c.x2p);
  c.ym = get("global_map.ym", c.ym);
  c.a11 = get("global_map.a11", c.a11);
  c.a12 = get("global_map.a12", c.a12);
  c.a21 = get("global_map.a21", c.a21);
  c.a22 = get("global_map.a22", c.a22);
  c.b1 = get("global_map.b1", c.b1);
  c.b2 = get("global_map.b2", c.b2);
  c.c1 = get("global_map.c1", c.c1);
  c.c2 = get("global_map.c2", c.c2);
  c.d = get("global_map.d", c.d);

  validate(spec);
  return spec;
}

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string serialize_model(const ModelSpec& spec) {
  std::ostringstream out;
  out << "[base]\n";
  out << "lambda = " << format_real(spec.base.lambda) << "\n";
  out << "gamma_sign = " << (spec.base.gamma_sign > 0 ? "+1" : "-1") << "\n\n";
  const GlobalCoeffs& c = spec.coeffs;
  out << "[global_map]\n";
  out << "x1p = " << format_real(c.x1p) << "\n";
  out << "x2p = " << format_real(c.x2p) << "\n";
  out << "ym = " << format_real(c.ym) << "\n";
  out << "a11 = " << format_real(c.a11) << "\n";
  out << "a12 = " << format_real(c.a12) << "\n";
  out << "a21 = " << format_real(c.a21) << "\n";
  out << "a22 = " << format_real(c.a22) << "\n";
  out << "b1 = " << format_real(c.b1) << "\n";
  out << "b2 = " << format_real(c.b2) << "\n";
  out << "c1 = " << format_real(c.c1) << "\n";
  out << "c2 = " << format_real(c.c2) << "\n";
  out << "d = " << format_real(c.d) << "\n";
  return out.str();
}

}  // namespace dlab
