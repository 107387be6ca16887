#pragma once

// JSON experiment reports: resolved config, numerical results, named checks
// and warnings. Everything under "runtime" (timestamp, workers, wall time) is
// excluded from the determinism contract.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "hypoco/cli/config.hpp"
#include "json.hpp"

namespace hypoco::cli {

using json = nlohmann::ordered_json;

inline std::string report_schema_version() { return "1.0.0"; }

/// Finite doubles as numbers, ±∞/NaN as strings (JSON has no such literals).
inline json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json num_array(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

class Report {
 public:
  explicit Report(const ExperimentConfig& cfg) : kind_(cfg.kind) {
    config_["experiment"] = {{"kind", cfg.kind}, {"seed", cfg.seed}, {"output", cfg.output}};
    json proc = json::object();
    for (const auto& [k, v] : cfg.process) proc[k] = v;
    config_["process"] = proc;
    json params = json::object();
    for (const auto& p : parameter_table(cfg.kind)) {
      const auto r = cfg.raw(p.key);
      if (r) params[p.key] = *r;
    }
    config_["parameters"] = params;
    workers_ = cfg.workers;
  }

  json& results() { return results_; }
  const json& results() const { return results_; }

  /// Records a named assertion; `value` and `threshold` document the witness.
  bool check(const std::string& name, bool pass, double value, double threshold, const std::string& relation) {
    checks_.push_back({{"name", name},
                       {"pass", pass},
                       {"value", num(value)},
                       {"threshold", num(threshold)},
                       {"relation", relation}});
    return pass;
  }
  void warn(const std::string& text) { warnings_.push_back(text); }

  bool pass() const {
    for (const auto& c : checks_)
      if (!c["pass"].get<bool>()) return false;
    return true;
  }

  void set_elapsed(double seconds) { elapsed_ = seconds; }

  json to_json() const {
    json j;
    j["schema_version"] = report_schema_version();
    j["kind"] = kind_;
    j["config"] = config_;
    j["results"] = results_;
    j["checks"] = checks_;
    j["warnings"] = warnings_;
    j["pass"] = pass();
    j["runtime"] = {{"timestamp", timestamp()}, {"workers", workers_}, {"elapsed_seconds", elapsed_}};
    return j;
  }

  /// Everything except "runtime"; the determinism contract covers this part.
  static json deterministic_part(json j) {
    j.erase("runtime");
    return j;
  }

  void write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ConfigurationError("cannot open " + path.string() + " for writing");
    os << to_json().dump(2) << '\n';
  }

 private:
  static std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
  }

  std::string kind_;
  json config_ = json::object();
  json results_ = json::object();
  json checks_ = json::array();
  json warnings_ = json::array();
  unsigned workers_ = 1;
  double elapsed_ = 0.0;
};

/// JSON Schema (draft 2020-12) for every report.
inline json report_schema() {
  const json number_like = {{"oneOf", json::array({{{"type", "number"}},
                                                    {{"type", "string"}, {"enum", {"inf", "-inf", "nan"}}}})}};
  json kinds = json::array();
  for (const auto& k : experiment_kinds()) kinds.push_back(k);
  return {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "hypoco experiment report"},
      {"type", "object"},
      {"required", {"schema_version", "kind", "config", "results", "checks", "warnings", "pass", "runtime"}},
      {"properties",
       {{"schema_version", {{"const", report_schema_version()}}},
        {"kind", {{"enum", kinds}}},
        {"config",
         {{"type", "object"},
          {"required", {"experiment", "process", "parameters"}},
          {"properties",
           {{"experiment",
             {{"type", "object"},
              {"required", {"kind", "seed", "output"}},
              {"properties",
               {{"kind", {{"type", "string"}}}, {"seed", {{"type", "integer"}}}, {"output", {{"type", "string"}}}}}}},
            {"process", {{"type", "object"}, {"additionalProperties", {{"type", "string"}}}}},
            {"parameters", {{"type", "object"}, {"additionalProperties", {{"type", "string"}}}}}}}}},
        {"results", {{"type", "object"}}},
        {"checks",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"required", {"name", "pass", "value", "threshold", "relation"}},
            {"properties",
             {{"name", {{"type", "string"}}},
              {"pass", {{"type", "boolean"}}},
              {"value", number_like},
              {"threshold", number_like},
              {"relation", {{"type", "string"}}}}}}}}},
        {"warnings", {{"type", "array"}, {"items", {{"type", "string"}}}}},
        {"pass", {{"type", "boolean"}}},
        {"runtime",
         {{"type", "object"},
          {"required", {"timestamp", "workers", "elapsed_seconds"}},
          {"properties",
           {{"timestamp", {{"type", "string"}}},
            {"workers", {{"type", "integer"}}},
            {"elapsed_seconds", {{"type", "number"}}}}}}}}}};
}

/// Checks a report against report_schema(); returns the violations (empty if valid).
inline std::vector<std::string> validate_report(const json& j) {
  std::vector<std::string> errs;
  const auto need = [&](const json& obj, const std::string& key, const std::string& where) -> const json* {
    if (!obj.is_object() || !obj.contains(key)) {
      errs.push_back(where + ": missing '" + key + "'");
      return nullptr;
    }
    return &obj.at(key);
  };
  const auto number_like = [](const json& v) {
    return v.is_number() || (v.is_string() && (v == "inf" || v == "-inf" || v == "nan"));
  };
  if (!j.is_object()) return {"report is not an object"};
  if (const auto* v = need(j, "schema_version", "report"); v && *v != report_schema_version())
    errs.push_back("schema_version mismatch");
  if (const auto* v = need(j, "kind", "report")) {
    const auto& ks = experiment_kinds();
    if (!v->is_string() || std::find(ks.begin(), ks.end(), v->get<std::string>()) == ks.end())
      errs.push_back("kind is not a known experiment kind");
  }
  if (const auto* c = need(j, "config", "report")) {
    if (const auto* e = need(*c, "experiment", "config")) {
      if (const auto* k = need(*e, "kind", "config.experiment"); k && !k->is_string())
        errs.push_back("config.experiment.kind must be a string");
      if (const auto* s = need(*e, "seed", "config.experiment"); s && !s->is_number_integer())
        errs.push_back("config.experiment.seed must be an integer");
      if (const auto* o = need(*e, "output", "config.experiment"); o && !o->is_string())
        errs.push_back("config.experiment.output must be a string");
    }
    for (const char* sec : {"process", "parameters"})
      if (const auto* p = need(*c, sec, "config")) {
        if (!p->is_object())
          errs.push_back(std::string("config.") + sec + " must be an object");
        else
          for (const auto& [k, v] : p->items())
            if (!v.is_string()) errs.push_back(std::string("config.") + sec + "." + k + " must be a string");
      }
  }
  if (const auto* r = need(j, "results", "report"); r && !r->is_object()) errs.push_back("results must be an object");
  if (const auto* c = need(j, "checks", "report")) {
    if (!c->is_array()) {
      errs.push_back("checks must be an array");
    } else {
      for (std::size_t i = 0; i < c->size(); ++i) {
        const auto& item = (*c)[i];
        const std::string where = "checks[" + std::to_string(i) + "]";
        if (const auto* v = need(item, "name", where); v && !v->is_string()) errs.push_back(where + ".name");
        if (const auto* v = need(item, "pass", where); v && !v->is_boolean()) errs.push_back(where + ".pass");
        if (const auto* v = need(item, "value", where); v && !number_like(*v)) errs.push_back(where + ".value");
        if (const auto* v = need(item, "threshold", where); v && !number_like(*v)) errs.push_back(where + ".threshold");
        if (const auto* v = need(item, "relation", where); v && !v->is_string()) errs.push_back(where + ".relation");
      }
    }
  }
  if (const auto* w = need(j, "warnings", "report")) {
    if (!w->is_array())
      errs.push_back("warnings must be an array");
    else
      for (const auto& s : *w)
        if (!s.is_string()) errs.push_back("warnings must hold strings");
  }
  if (const auto* p = need(j, "pass", "report"); p && !p->is_boolean()) errs.push_back("pass must be a boolean");
  if (const auto* rt = need(j, "runtime", "report")) {
    if (const auto* v = need(*rt, "timestamp", "runtime"); v && !v->is_string()) errs.push_back("runtime.timestamp");
    if (const auto* v = need(*rt, "workers", "runtime"); v && !v->is_number_integer()) errs.push_back("runtime.workers");
    if (const auto* v = need(*rt, "elapsed_seconds", "runtime"); v && !v->is_number())
      errs.push_back("runtime.elapsed_seconds");
  }
  return errs;
}

}  // namespace hypoco::cli
