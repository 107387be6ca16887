// Command-line runner: hypoco run <config>, hypoco validate <config>, hypoco schema.
// Exit status: 0 all checks pass, 1 a check or a numerical step failed, 2 bad config.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hypoco/cli/experiments.hpp"

namespace {

using hypoco::cli::ExperimentConfig;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;

  void apply(ExperimentConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (out) cfg.output = *out;
    if (workers) cfg.workers = *workers;
  }
};

int config_error(const std::exception& e) {
  std::cerr << "config error: " << e.what() << '\n';
  return 2;
}

int do_validate(const std::string& path, const Overrides& ov) {
  try {
    auto cfg = hypoco::cli::load_config(path);
    ov.apply(cfg);
    cfg.validate();
    std::cout << path << ": ok (" << cfg.kind << ")\n";
    return 0;
  } catch (const hypoco::cli::ParseError& e) {
    return config_error(e);
  } catch (const hypoco::ConfigurationError& e) {
    return config_error(e);
  }
}

int do_run(const std::string& path, const Overrides& ov) {
  ExperimentConfig cfg;
  try {
    cfg = hypoco::cli::load_config(path);
    ov.apply(cfg);
    cfg.validate();
  } catch (const hypoco::cli::ParseError& e) {
    return config_error(e);
  } catch (const hypoco::ConfigurationError& e) {
    return config_error(e);
  }
  try {
    const auto rep = hypoco::cli::run_experiment(cfg);
    const auto j = rep.to_json();
    if (cfg.output.empty())
      std::cout << j.dump(2) << '\n';
    else
      rep.write(cfg.output);
    for (const auto& c : j["checks"])
      std::cerr << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << '\n';
    return rep.pass() ? 0 : 1;
  } catch (const hypoco::ConfigurationError& e) {
    return config_error(e);
  } catch (const hypoco::UsageError& e) {
    return config_error(e);
  } catch (const hypoco::DomainError& e) {
    return config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypocoercivity bounds, simulators and checks"};
  app.require_subcommand(1);
  Overrides ov;
  std::string config;

  const auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("config", config, "experiment config (INI)")->required();
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { ov.seed = s; }, "override [experiment] seed");
    sub->add_option_function<std::string>("--out", [&](const std::string& o) { ov.out = o; }, "override report path");
    sub->add_option_function<unsigned>("--workers", [&](unsigned w) { ov.workers = w; }, "override worker count");
  };
  auto* run = app.add_subcommand("run", "run an experiment and write its JSON report");
  add_overrides(run);
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  add_overrides(validate);
  auto* schema = app.add_subcommand("schema", "print the report JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (*schema) {
    std::cout << hypoco::cli::report_schema().dump(2) << '\n';
    return 0;
  }
  if (*validate) return do_validate(config, ov);
  return do_run(config, ov);
}
