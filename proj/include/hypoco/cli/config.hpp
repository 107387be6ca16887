#pragma once

// Experiment configuration: INI text with [experiment], [process] and
// [parameters] sections. Every kind declares its keys; unknown keys and
// out-of-range values are rejected before anything runs.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"

namespace hypoco::cli {

/// Malformed file (exit status 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParamType { Double, Int, Bool, String, DoubleList };

struct ParamSpec {
  std::string key;
  ParamType type;
  std::optional<std::string> fallback;  // absent ⇒ required
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  bool min_exclusive = false;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"bound-eval", "deviation",  "hitting",
                                                 "growth",     "spectral-rho", "decay",
                                                 "dirichlet",  "hormander",  "langevin-conditions"};
  return kinds;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline ParamSpec req(std::string k, ParamType t, double lo = -kInf, double hi = kInf, bool excl = false) {
  return {std::move(k), t, std::nullopt, lo, hi, excl};
}
inline ParamSpec opt(std::string k, ParamType t, std::string d, double lo = -kInf, double hi = kInf,
                     bool excl = false) {
  return {std::move(k), t, std::move(d), lo, hi, excl};
}

/// ρ comes from `rho`, or from `rho_file` (a spectral-rho report), or is computed.
inline std::vector<ParamSpec> rho_source() {
  return {opt("rho", ParamType::Double, "", 0.0, kInf, true), opt("rho_file", ParamType::String, ""),
          opt("nx", ParamType::Int, "128", 16), opt("nu", ParamType::Int, "64", 16),
          opt("R", ParamType::Double, "40", 0.0, kInf, true),
          opt("epsilon", ParamType::Double, "0.5", 0.0, 1.0, true)};
}

inline std::vector<ParamSpec> with(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace detail

inline std::vector<ParamSpec> parameter_table(const std::string& kind) {
  using detail::opt;
  using detail::req;
  using T = ParamType;
  constexpr double inf = detail::kInf;
  if (kind == "bound-eval")
    return {req("rho", T::Double, 0.0, inf, true), req("v_l2", T::Double, 0.0), req("v_inf", T::Double, 0.0),
            opt("prefactor", T::Double, "1", 0.0), req("r", T::DoubleList, 0.0), opt("t", T::DoubleList, "1", 0.0, inf, true),
            opt("mu_U", T::Double, "", 0.0, 1.0, true), opt("theta_fractions", T::DoubleList, "0.25 0.5 0.75", 0.0, 1.0, true)};
  if (kind == "deviation")
    return detail::with(detail::rho_source(),
                        {opt("observable", T::String, "cos_u"), opt("t", T::Double, "10", 0.0, inf, true),
                         req("r", T::DoubleList, 0.0), req("n_traj", T::Int, 100), opt("dt", T::Double, "0.01", 0.0, inf, true),
                         opt("level", T::Double, "0.999", 0.0, 1.0, true)});
  if (kind == "hitting")
    return detail::with(detail::rho_source(),
                        {opt("U_halfwidth", T::Double, "1", 0.0, inf, true),
                         opt("theta_fractions", T::DoubleList, "0.25 0.5 0.75", 0.0, 1.0, true),
                         req("n_traj", T::Int, 1), opt("dt", T::Double, "0.01", 0.0, inf, true),
                         opt("t_cap_factor", T::Double, "50", 0.0, inf, true), opt("hitting_csv", T::String, "")});
  if (kind == "growth")
    return detail::with(detail::rho_source(),
                        {opt("U_halfwidth", T::Double, "1", 0.0, inf, true),
                         opt("theta_fraction", T::Double, "0.5", 0.0, 1.0, true),
                         opt("x_points", T::DoubleList, "2 4 6 8"), req("n_traj", T::Int, 1),
                         opt("dt", T::Double, "0.01", 0.0, inf, true), opt("t_cap_factor", T::Double, "50", 0.0, inf, true)});
  if (kind == "spectral-rho")
    return {opt("nx", T::Int, "128", 16),        opt("nu", T::Int, "64", 16),
            opt("R", T::Double, "40", 0.0, inf, true), opt("Rv", T::Double, "8", 0.0, inf, true),
            opt("epsilon", T::Double, "0.5", 0.0, 1.0, true), opt("refine", T::Bool, "true"),
            opt("n_probes", T::Int, "100", 1), opt("matrix_dir", T::String, "")};
  if (kind == "decay")
    return {opt("nx", T::Int, "128", 16),        opt("nu", T::Int, "64", 16),
            opt("R", T::Double, "40", 0.0, inf, true), opt("Rv", T::Double, "8", 0.0, inf, true),
            opt("epsilon", T::Double, "0.5", 0.0, 1.0, true), opt("times", T::DoubleList, "0.5 1 2 5", 0.0),
            opt("n_random", T::Int, "20", 1), opt("tolerance", T::Double, "1e-8", 0.0, inf, true)};
  if (kind == "dirichlet")
    return detail::with(detail::rho_source(),
                        {opt("U_halfwidth", T::Double, "1", 0.0, inf, true),
                         opt("theta_fraction", T::Double, "0.5", 0.0, 1.0, true),
                         opt("grid_nx", T::Int, "256", 32), opt("grid_nu", T::Int, "128", 32),
                         opt("probes", T::DoubleList, "1.5 2 3 4 6"), req("n_traj", T::Int, 1),
                         opt("dt", T::Double, "0.01", 0.0, inf, true), opt("t_cap_factor", T::Double, "50", 0.0, inf, true),
                         opt("W_csv", T::String, "")});
  if (kind == "hormander")
    return {opt("X", T::Double, "20", 0.0, inf, true), opt("nx", T::Int, "400", 2), opt("nu", T::Int, "200", 1),
            opt("alpha", T::Double, "0.5", 0.0), opt("a1", T::Double, "", 0.0),
            opt("bracket_tolerance", T::Double, "1e-6", 0.0, inf, true)};
  if (kind == "langevin-conditions")
    return {opt("box", T::Double, "10", 0.0, inf, true), opt("points", T::Int, "0", 0),
            opt("ball_radius", T::Double, "", 0.0)};
  return {};
}

/// Which [process] types each kind accepts; empty ⇒ no process section.
inline std::vector<std::string> process_types_for(const std::string& kind) {
  if (kind == "deviation" || kind == "hitting" || kind == "growth" || kind == "dirichlet") return {"rtorus"};
  if (kind == "spectral-rho" || kind == "decay") return {"rtorus", "kinetic-langevin"};
  if (kind == "langevin-conditions") return {"kinetic-langevin"};
  return {};
}

struct ExperimentConfig {
  std::filesystem::path source;
  std::string kind;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string output;
  std::map<std::string, std::string> process;
  std::map<std::string, std::string> parameters;

  static std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(parse_double(key, tok));
    return out;
  }

  static double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || !std::isfinite(v))
      throw ConfigurationError("parameter '" + key + "': '" + text + "' is not a finite number");
    return v;
  }

  static long long parse_int(const std::string& key, const std::string& text) {
    long long v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ConfigurationError("parameter '" + key + "': '" + text + "' is not an integer");
    return v;
  }

  static bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigurationError("parameter '" + key + "': '" + text + "' is not a boolean");
  }

  std::optional<std::string> raw(const std::string& key) const {
    const auto it = parameters.find(key);
    if (it != parameters.end()) return it->second;
    for (const auto& p : parameter_table(kind))
      if (p.key == key) {
        if (p.fallback && !p.fallback->empty()) return *p.fallback;
        return std::nullopt;
      }
    throw ConfigurationError("internal: parameter '" + key + "' is not declared for kind " + kind);
  }

  bool has(const std::string& key) const { return raw(key).has_value(); }

  double get_double(const std::string& key) const {
    const auto r = raw(key);
    if (!r) throw ConfigurationError("missing parameter '" + key + "'");
    return parse_double(key, *r);
  }
  long long get_int(const std::string& key) const {
    const auto r = raw(key);
    if (!r) throw ConfigurationError("missing parameter '" + key + "'");
    return parse_int(key, *r);
  }
  bool get_bool(const std::string& key) const {
    const auto r = raw(key);
    if (!r) throw ConfigurationError("missing parameter '" + key + "'");
    return parse_bool(key, *r);
  }
  std::string get_string(const std::string& key) const { return raw(key).value_or(""); }
  std::vector<double> get_list(const std::string& key) const {
    const auto r = raw(key);
    if (!r) throw ConfigurationError("missing parameter '" + key + "'");
    return parse_list(key, *r);
  }

  std::string process_type() const {
    const auto it = process.find("type");
    return it == process.end() ? std::string() : it->second;
  }
  std::string process_value(const std::string& key, const std::string& fallback) const {
    const auto it = process.find(key);
    return it == process.end() ? fallback : it->second;
  }

  /// Checks kind, keys, types and ranges. Throws ConfigurationError.
  void validate() const {
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
      throw ConfigurationError("unknown experiment kind '" + kind + "'");
    if (workers < 1 || workers > 256) throw ConfigurationError("workers must lie in [1, 256]");
    const auto table = parameter_table(kind);
    for (const auto& [key, value] : parameters) {
      const auto it = std::find_if(table.begin(), table.end(), [&](const ParamSpec& p) { return p.key == key; });
      if (it == table.end()) throw ConfigurationError("unknown parameter '" + key + "' for kind " + kind);
    }
    for (const auto& p : table) {
      const auto r = raw(p.key);
      if (!r) {
        if (!p.fallback) throw ConfigurationError("missing required parameter '" + p.key + "' for kind " + kind);
        continue;
      }
      const auto check = [&](double v) {
        const bool low = p.min_exclusive ? !(v > p.min) : !(v >= p.min);
        if (low || v > p.max)
          throw ConfigurationError("parameter '" + p.key + "' = " + *r + " is out of range");
      };
      switch (p.type) {
        case ParamType::Double: check(parse_double(p.key, *r)); break;
        case ParamType::Int: check(static_cast<double>(parse_int(p.key, *r))); break;
        case ParamType::Bool: parse_bool(p.key, *r); break;
        case ParamType::String: break;
        case ParamType::DoubleList: {
          const auto xs = parse_list(p.key, *r);
          if (xs.empty()) throw ConfigurationError("parameter '" + p.key + "' must be a nonempty list");
          for (double x : xs) check(x);
          break;
        }
      }
    }
    const auto types = process_types_for(kind);
    if (types.empty()) {
      if (!process.empty()) throw ConfigurationError("kind " + kind + " takes no [process] section");
    } else {
      const std::string t = process_type();
      if (std::find(types.begin(), types.end(), t) == types.end())
        throw ConfigurationError("kind " + kind + " needs [process] type in {" + join(types) + "}, got '" + t + "'");
      for (const auto& [key, value] : process)
        if (key != "type" && key != "dim" && key != "potential")
          throw ConfigurationError("unknown [process] key '" + key + "'");
    }
    if ((kind == "deviation" || kind == "hitting" || kind == "growth" || kind == "dirichlet") &&
        has("rho") && !get_string("rho_file").empty())
      throw ConfigurationError("give at most one of rho and rho_file");
  }

  static std::string join(const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
    return s;
  }

  /// Relative paths in the config resolve against the config file's directory.
  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(p);
    if (path.is_absolute() || source.empty()) return path;
    return source.parent_path() / path;
  }
};

/// Parses INI text; syntax errors carry the line number.
inline ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& source = {}) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(source.string() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig cfg;
  cfg.source = source;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ParseError(source.string() + ": key '" + section + "' appears outside a section");
    if (section != "experiment" && section != "process" && section != "parameters")
      throw ParseError(source.string() + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ParseError(source.string() + ": nested key under [" + section + "]." + key);
      const std::string v = value.data();
      if (section == "experiment") {
        if (key == "kind")
          cfg.kind = v;
        else if (key == "seed")
          cfg.seed = static_cast<std::uint64_t>(ExperimentConfig::parse_int("seed", v));
        else if (key == "workers")
          cfg.workers = static_cast<unsigned>(ExperimentConfig::parse_int("workers", v));
        else if (key == "output")
          cfg.output = v;
        else
          throw ConfigurationError("unknown [experiment] key '" + key + "'");
      } else if (section == "process") {
        cfg.process[key] = v;
      } else {
        cfg.parameters[key] = v;
      }
    }
  }
  if (cfg.kind.empty()) throw ConfigurationError("[experiment] kind is required");
  if (tree.get_child_optional("experiment.seed") == boost::none)
    throw ConfigurationError("[experiment] seed is required");
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace hypoco::cli
