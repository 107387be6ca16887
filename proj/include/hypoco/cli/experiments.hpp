#pragma once

// The nine experiment kinds. Each reads its resolved parameters, runs the
// library, fills report results and named checks, and leaves exit-status
// policy to the caller.

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "hypoco/assumptions.hpp"
#include "hypoco/bounds.hpp"
#include "hypoco/cli/config.hpp"
#include "hypoco/cli/report.hpp"
#include "hypoco/dirichlet.hpp"
#include "hypoco/dms.hpp"
#include "hypoco/expmv.hpp"
#include "hypoco/grid.hpp"
#include "hypoco/io.hpp"
#include "hypoco/montecarlo.hpp"
#include "hypoco/processes.hpp"

namespace hypoco::cli {

namespace detail {

struct RhoSource {
  double rho = 0.0;
  std::string origin;
};

/// ρ from the `rho` key, a spectral-rho report named by `rho_file`, or a fresh
/// skew-grid solve at (nx, nu, R, ε).
inline RhoSource resolve_rho(const ExperimentConfig& cfg, Report& rep) {
  if (cfg.parameters.count("rho")) return {cfg.get_double("rho"), "config"};
  const std::string file = cfg.get_string("rho_file");
  if (!file.empty()) {
    const auto path = cfg.resolve(file);
    std::ifstream is(path);
    if (!is) throw ConfigurationError("rho_file: cannot open " + path.string());
    json j;
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigurationError("rho_file: " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!validate_report(j).empty() || j["kind"] != "spectral-rho")
      throw ConfigurationError("rho_file: " + path.string() + " is not a spectral-rho report");
    const auto& r = j["results"]["rho"];
    if (!r.is_number() || !(r.get<double>() > 0.0))
      throw ConfigurationError("rho_file: report carries no positive rho");
    if (!j["pass"].get<bool>()) rep.warn("rho_file comes from a report whose checks failed");
    return {r.get<double>(), "file:" + path.string()};
  }
  const GridOperator g = build_rtorus_generator(static_cast<int>(cfg.get_int("nx")), static_cast<int>(cfg.get_int("nu")),
                                                cfg.get_double("R"));
  const DMSOperators d(g, cfg.get_double("epsilon"));
  const RhoEstimate est = estimate_rho(d);
  if (!est.positive) throw SolveError("computed rho is not positive; no deviation bound is available");
  return {est.rho, "computed"};
}

inline ProcessSpec langevin_spec(const ExperimentConfig& cfg) {
  const int dim = static_cast<int>(ExperimentConfig::parse_int("dim", cfg.process_value("dim", "1")));
  if (dim < 1 || dim > 8) throw ConfigurationError("[process] dim must lie in [1, 8]");
  const auto coeffs = ExperimentConfig::parse_list("potential", cfg.process_value("potential", "0 0 0.5"));
  return ProcessSpec::kinetic_langevin(dim, Polynomial(coeffs));
}

inline std::vector<double> theta_grid(double h, const std::vector<double>& fractions) {
  std::vector<double> out;
  for (double f : fractions) out.push_back(f * h);
  return out;
}

/// Smallest multiple of dt at or above t.
inline double round_up_to_step(double t, double dt) { return std::ceil(t / dt - 1e-9) * dt; }

inline json grid_summary(const GridOperator& g) {
  return {{"nx", g.nx},
          {"nv", g.nv},
          {"x_range", {g.x_lo, g.x_hi}},
          {"v_range", {g.v_lo, g.v_hi}},
          {"scheme", to_string(g.scheme)},
          {"boundary_weight", num(g.boundary_weight)}};
}

}  // namespace detail

inline void run_bound_eval(const ExperimentConfig& cfg, Report& rep) {
  bounds::BoundInputs<double> in{cfg.get_double("rho"), cfg.get_double("v_l2"), cfg.get_double("v_inf"),
                                 cfg.get_double("prefactor")};
  in.validate();
  const auto rs = cfg.get_list("r");
  const auto ts = cfg.get_list("t");
  auto& res = rep.results();
  const auto l0 = bounds::lambda0(in);
  const auto lu = bounds::lambda_upper(in);
  res["lambda0"] = l0.is_infinite() ? json("inf") : json(l0.value());
  res["lambda_upper"] = lu.is_infinite() ? json("inf") : json(lu.value());
  res["beta"] = in.v_inf > 0 ? json(bounds::beta(in)) : json("undefined");
  res["decay_rate"] = 2.0 * in.rho / 3.0;
  res["decay_prefactor"] = std::sqrt(3.0);
  json rows = json::array();
  for (double r : rs) {
    json row;
    row["r"] = r;
    const double h = bounds::h_rate(r, in);
    row["h"] = h;
    using boost::multiprecision::cpp_rational;
    const bounds::BoundInputs<cpp_rational> qin{cpp_rational(in.rho), cpp_rational(in.v_l2), cpp_rational(in.v_inf),
                                                cpp_rational(in.prefactor)};
    row["h_exact"] = bounds::h_rate(cpp_rational(r), qin).str();
    if (in.v_inf > 0) {
      const double lr = bounds::legendre_rate(r, l0.value(), bounds::beta(in));
      row["legendre_rate"] = lr;
      const double floor = l0.value() * r * r / (4.0 * (bounds::beta(in) + r));
      rep.check("legendre_dominates_quadratic_floor(r=" + std::to_string(r) + ")", lr >= floor * (1 - 1e-12), lr,
                floor, ">=");
      rep.check("h_below_legendre_rate(r=" + std::to_string(r) + ")", h <= lr * (1 + 1e-12), h, lr, "<=");
    }
    json dev = json::array();
    for (double t : ts) dev.push_back({{"t", t}, {"bound", bounds::deviation_bound(t, r, in)}});
    row["deviation_bound"] = dev;
    rows.push_back(row);
  }
  res["rates"] = rows;
  if (cfg.has("mu_U")) {
    const double mu = cfg.get_double("mu_U");
    const double h = bounds::hitting_rate(in.rho, mu);
    res["hitting_rate"] = h;
    json hb = json::array();
    for (double theta : detail::theta_grid(h, cfg.get_list("theta_fractions")))
      hb.push_back({{"theta", theta}, {"bound", bounds::hitting_bound(theta, mu, in.rho, in.prefactor)}});
    res["hitting_bound"] = hb;
  }
}

inline void run_deviation(const ExperimentConfig& cfg, Report& rep) {
  const auto rho = detail::resolve_rho(cfg, rep);
  const std::string obs = cfg.get_string("observable");
  StateFunction V;
  if (obs == "cos_u")
    V = [](std::span<const double> s) { return std::cos(s[1]); };
  else if (obs == "sin_u")
    V = [](std::span<const double> s) { return std::sin(s[1]); };
  else
    throw ConfigurationError("observable must be cos_u or sin_u");
  // Under μ the angle is uniform: mean 0, ‖V‖₂ = 1/√2, ‖V‖∞ = 1.
  const bounds::BoundInputs<double> in{rho.rho, std::sqrt(0.5), 1.0, 1.0};
  const double t = cfg.get_double("t");
  const auto n = static_cast<std::size_t>(cfg.get_int("n_traj"));
  const McOptions opt{cfg.get_double("dt"), cfg.seed, cfg.workers};
  const double level = cfg.get_double("level");
  const auto run = simulate_time_averages(ProcessSpec::rtorus(), V, 0.0, t, n, opt);
  auto& res = rep.results();
  res["rho"] = rho.rho;
  res["rho_source"] = rho.origin;
  res["observable"] = obs;
  res["norms"] = {{"mean", 0.0}, {"l2", in.v_l2}, {"sup", in.v_inf}, {"prefactor", in.prefactor}};
  json rows = json::array();
  for (double r : cfg.get_list("r")) {
    const auto e = run.estimate(r, level);
    const double bound = bounds::deviation_bound(t, r, in);
    rows.push_back({{"r", r},
                    {"h", bounds::h_rate(r, in)},
                    {"successes", e.successes},
                    {"trials", e.trials},
                    {"frequency", e.point},
                    {"ci_upper", e.ci_upper},
                    {"bound", bound}});
    rep.check("tail_upper_confidence_below_bound(r=" + std::to_string(r) + ")", e.ci_upper <= bound, e.ci_upper,
              bound, "<=");
  }
  res["tails"] = rows;
  res["level"] = level;
}

inline void run_hitting(const ExperimentConfig& cfg, Report& rep) {
  const auto rho = detail::resolve_rho(cfg, rep);
  const ProcessSpec spec = ProcessSpec::rtorus();
  const double hw = cfg.get_double("U_halfwidth");
  const Region U = Region::slab(0, -hw, hw);
  const double mu = U.mass(spec);
  const double h = bounds::hitting_rate(rho.rho, mu);
  const double dt = cfg.get_double("dt");
  const double t_cap = detail::round_up_to_step(cfg.get_double("t_cap_factor") / h, dt);
  const auto n = static_cast<std::size_t>(cfg.get_int("n_traj"));
  const McOptions opt{dt, cfg.seed, cfg.workers};
  const auto samples = hitting_times(spec, U, n, t_cap, opt);
  const std::string csv = cfg.get_string("hitting_csv");
  if (!csv.empty()) io::write_hitting_csv(csv, samples);

  auto& res = rep.results();
  res["rho"] = rho.rho;
  res["rho_source"] = rho.origin;
  res["U"] = U.describe();
  res["mu_U"] = mu;
  res["hitting_rate"] = h;
  res["t_cap"] = t_cap;
  json rows = json::array();
  for (double theta : detail::theta_grid(h, cfg.get_list("theta_fractions"))) {
    const auto e = exp_moment(samples, theta);
    const double bound = bounds::hitting_bound(theta, mu, rho.rho);
    rows.push_back({{"theta", theta},
                    {"theta_over_h", theta / h},
                    {"mean", e.mean},
                    {"std_error", e.std_error},
                    {"censored_fraction", e.censored_fraction},
                    {"censored_mass", num(e.censored_mass)},
                    {"bound", bound}});
    const std::string tag = "(theta/h=" + std::to_string(theta / h) + ")";
    rep.check("censored_mass_gate" + tag, e.censoring_valid(bound), e.censored_mass, 0.01 * bound, "<=");
    rep.check("exp_moment_below_bound" + tag, e.mean + 3.0 * e.std_error <= bound, e.mean + 3.0 * e.std_error,
              bound, "<=");
  }
  res["moments"] = rows;
}

inline void run_growth(const ExperimentConfig& cfg, Report& rep) {
  const auto rho = detail::resolve_rho(cfg, rep);
  const ProcessSpec spec = ProcessSpec::rtorus();
  const double hw = cfg.get_double("U_halfwidth");
  const Region U = Region::slab(0, -hw, hw);
  const double mu = U.mass(spec);
  const double h = bounds::hitting_rate(rho.rho, mu);
  const double theta = cfg.get_double("theta_fraction") * h;
  const double dt = cfg.get_double("dt");
  const double t_cap = detail::round_up_to_step(cfg.get_double("t_cap_factor") / h, dt);
  const auto xs = cfg.get_list("x_points");
  const McOptions opt{dt, cfg.seed, cfg.workers};
  const auto g = growth_profile(spec, U, theta, xs, static_cast<std::size_t>(cfg.get_int("n_traj")), t_cap, opt);

  auto& res = rep.results();
  res["rho"] = rho.rho;
  res["rho_source"] = rho.origin;
  res["mu_U"] = mu;
  res["hitting_rate"] = h;
  res["theta"] = theta;
  res["t_cap"] = t_cap;
  json rows = json::array();
  for (const auto& p : g.points)
    rows.push_back({{"x", p.x},
                    {"W", p.W},
                    {"std_error", p.std_error},
                    {"censored_fraction", p.censored_fraction},
                    {"ratio", p.ratio},
                    {"ratio_error", p.ratio_error}});
  res["profile"] = rows;
  res["argmax_x"] = g.points.empty() ? 0.0 : g.points[g.argmax].x;
  res["max_ratio"] = g.max_ratio;
  double censored = 0.0;
  for (const auto& p : g.points) censored = std::max(censored, p.censored_fraction);
  rep.check("no_upward_trend_in_ratio", g.no_upward_trend, g.max_ratio, g.max_ratio, "outer <= inner max + 3SE");
  rep.check("no_censoring", censored == 0.0, censored, 0.0, "==");
  if (!g.monotone) rep.warn("estimated W is not monotone in |x| within 3SE");
}

inline void run_spectral_rho(const ExperimentConfig& cfg, Report& rep) {
  const int nx = static_cast<int>(cfg.get_int("nx"));
  const int nu = static_cast<int>(cfg.get_int("nu"));
  const double R = cfg.get_double("R");
  const double eps = cfg.get_double("epsilon");
  const bool rtorus = cfg.process_type() == "rtorus";
  std::function<double(double)> potential;
  std::function<GridOperator(int, int)> build;
  if (rtorus) {
    potential = rtorus_potential;
    build = [R](int a, int b) { return build_rtorus_generator(a, b, R); };
  } else {
    const ProcessSpec spec = detail::langevin_spec(cfg);
    if (spec.dim() != 1) throw ConfigurationError("spectral-rho on kinetic-langevin supports dim = 1");
    const Polynomial P = spec.potential().profile();
    const double Rv = cfg.get_double("Rv");
    potential = [P](double x) { return P(x); };
    build = [R, Rv, P](int a, int b) { return build_langevin_generator(a, b, R, Rv, P); };
  }
  const GridOperator g = build(nx, nu);
  const DMSOperators d(g, eps);
  const auto contracts = check_contracts(d, static_cast<int>(cfg.get_int("n_probes")), cfg.seed);
  const auto scan = scan_epsilon(g);
  const RhoEstimate est = estimate_rho(d);
  RhoOptions neg;
  neg.negative_control = true;
  const RhoEstimate ctrl = estimate_rho(d, neg);
  const auto pc = poincare_constants(d, potential);

  auto& res = rep.results();
  res["process"] = cfg.process_type();
  res["grid"] = detail::grid_summary(g);
  res["epsilon"] = eps;
  res["rho"] = est.rho;
  res["rho_residual"] = est.residual;
  res["lanczos_iterations"] = est.iterations;
  res["negative_control"] = ctrl.rho;
  res["contracts"] = {{"conservation", contracts.conservation},
                      {"invariance", contracts.invariance},
                      {"tpit", contracts.tpit},
                      {"pitpi", contracts.pitpi},
                      {"s_symmetry", contracts.s_symmetry},
                      {"s_norm", contracts.s_norm},
                      {"b_lower", contracts.b_lower},
                      {"b_upper", contracts.b_upper},
                      {"projection_idempotence", contracts.projection_idempotence},
                      {"t_antisymmetry", contracts.t_antisymmetry}};
  json sn = json::array();
  for (const auto& [e, s] : scan.norms) sn.push_back({{"epsilon", e}, {"s_norm", s}});
  res["epsilon_scan"] = {{"norms", sn}, {"largest_passing", scan.largest_passing}};
  res["poincare"] = {{"gap_u", pc.gap_u},
                     {"C_P", pc.C_P},
                     {"macroscopic_min", pc.macroscopic_min},
                     {"velocity_moment", pc.velocity_moment},
                     {"identity_defect", pc.identity_defect}};

  rep.check("conservation", contracts.conservation <= 1e-10, contracts.conservation, 1e-10, "<=");
  rep.check("invariance", contracts.invariance <= 1e-8, contracts.invariance, 1e-8, "<=");
  rep.check("pi_t_pi_vanishes", contracts.pitpi <= 1e-8, contracts.pitpi, 1e-8, "<=");
  rep.check("s_symmetric", contracts.s_symmetry <= 1e-10, contracts.s_symmetry, 1e-10, "<=");
  rep.check("s_norm", contracts.s_norm <= 0.5 + 1e-10, contracts.s_norm, 0.5 + 1e-10, "<=");
  rep.check("b_norm_lower", contracts.b_lower >= 0.5, contracts.b_lower, 0.5, ">=");
  rep.check("b_norm_upper", contracts.b_upper <= 1.5, contracts.b_upper, 1.5, "<=");
  rep.check("rho_positive", est.rho > 0.0, est.rho, 0.0, ">");
  rep.check("rho_residual", est.residual <= 1e-8, est.residual, 1e-8, "<=");
  rep.check("negative_control", ctrl.rho <= 1e-3, ctrl.rho, 1e-3, "<=");
  const double macro_floor = 0.95 * pc.velocity_moment * pc.C_P;
  rep.check("macroscopic_coercivity", pc.macroscopic_min >= macro_floor, pc.macroscopic_min, macro_floor, ">=");
  if (cfg.get_bool("refine")) {
    const GridOperator g2 = build(2 * nx, 2 * nu);
    const DMSOperators d2(g2, eps);
    const RhoEstimate est2 = estimate_rho(d2);
    const double change = std::abs(est2.rho - est.rho) / std::abs(est.rho);
    res["refined"] = {{"grid", detail::grid_summary(g2)}, {"rho", est2.rho}, {"relative_change", change}};
    rep.check("rho_stable_under_refinement", change < 0.05, change, 0.05, "<");
  }
  const std::string mdir = cfg.get_string("matrix_dir");
  if (!mdir.empty()) {
    io::write_coo(std::filesystem::path(mdir) / "L.coo", g.L);
    io::write_weights(std::filesystem::path(mdir) / "w.txt", g.w);
  }
}

inline void run_decay(const ExperimentConfig& cfg, Report& rep) {
  const int nx = static_cast<int>(cfg.get_int("nx"));
  const int nu = static_cast<int>(cfg.get_int("nu"));
  const double R = cfg.get_double("R");
  GridOperator g;
  if (cfg.process_type() == "rtorus") {
    g = build_rtorus_generator(nx, nu, R);
  } else {
    const ProcessSpec spec = detail::langevin_spec(cfg);
    if (spec.dim() != 1) throw ConfigurationError("decay on kinetic-langevin supports dim = 1");
    g = build_langevin_generator(nx, nu, R, cfg.get_double("Rv"), spec.potential().profile());
  }
  const DMSOperators d(g, cfg.get_double("epsilon"));
  const RhoEstimate est = estimate_rho(d);
  if (!est.positive) throw SolveError("decay: rho estimate is not positive");
  const double tol = cfg.get_double("tolerance");
  const auto dr = decay_check(d, est.rho, cfg.get_list("times"), static_cast<int>(cfg.get_int("n_random")), cfg.seed,
                              tol);
  auto& res = rep.results();
  res["grid"] = detail::grid_summary(g);
  res["rho"] = est.rho;
  res["times"] = dr.times;
  res["envelope_ratio"] = num_array(dr.envelope_ratio);
  res["b_norm_ratio"] = num_array(dr.b_norm_ratio);
  res["dissipation_ratio"] = num_array(dr.dissipation_ratio);
  json viol = json::array();
  for (const auto& v : dr.violations) viol.push_back({{"t", v.t}, {"index", v.index}, {"ratio", v.ratio}});
  res["violations"] = viol;
  for (std::size_t k = 0; k < dr.times.size(); ++k) {
    const std::string tag = "(t=" + std::to_string(dr.times[k]) + ")";
    rep.check("envelope" + tag, dr.envelope_ratio[k] <= 1.0 + tol, dr.envelope_ratio[k], 1.0 + tol, "<=");
    rep.check("b_norm_contraction" + tag, dr.b_norm_ratio[k] <= 1.0 + tol, dr.b_norm_ratio[k], 1.0 + tol, "<=");
  }
}

inline void run_dirichlet(const ExperimentConfig& cfg, Report& rep) {
  const auto rho = detail::resolve_rho(cfg, rep);
  const ProcessSpec spec = ProcessSpec::rtorus();
  const double hw = cfg.get_double("U_halfwidth");
  const Region U = Region::slab(0, -hw, hw);
  const double mu = U.mass(spec);
  const double h = bounds::hitting_rate(rho.rho, mu);
  const double theta = cfg.get_double("theta_fraction") * h;
  const int nx = static_cast<int>(cfg.get_int("grid_nx"));
  const int nu = static_cast<int>(cfg.get_int("grid_nu"));
  const double R = cfg.get_double("R");

  const GridOperator fine = build_rtorus_generator(nx, nu, R, Scheme::Upwind);
  const GridOperator coarse = build_rtorus_generator(nx / 2, nu / 2, R, Scheme::Upwind);
  const auto Wf = solve_dirichlet(fine, -hw, hw, theta, h);
  const auto Wc = solve_dirichlet(coarse, -hw, hw, theta, h);
  const auto W0 = solve_dirichlet(fine, -hw, hw, 0.0, h);
  const double w0_defect = (W0.W.array() - 1.0).abs().maxCoeff();

  const double dt = cfg.get_double("dt");
  const double t_cap = detail::round_up_to_step(cfg.get_double("t_cap_factor") / h, dt);
  const auto probes = cfg.get_list("probes");
  const McOptions opt{dt, cfg.seed, cfg.workers};
  const auto mc = growth_profile(spec, U, theta, probes, static_cast<std::size_t>(cfg.get_int("n_traj")), t_cap, opt);
  const auto cv = crossvalidate(Wf, Wc, mc);

  auto& res = rep.results();
  res["rho"] = rho.rho;
  res["rho_source"] = rho.origin;
  res["mu_U"] = mu;
  res["hitting_rate"] = h;
  res["theta"] = theta;
  res["grid"] = detail::grid_summary(fine);
  res["coarse_grid"] = detail::grid_summary(coarse);
  res["residual"] = Wf.residual;
  res["lyapunov_C"] = num(Wf.lyapunov_C);
  res["min_W"] = Wf.min_W;
  res["monotone"] = Wf.monotone;
  res["W_at_theta_zero_defect"] = w0_defect;
  const auto [ratio, where] = Wf.max_growth_ratio();
  res["max_growth_ratio"] = {{"ratio", ratio}, {"x", where}};
  json rows = json::array();
  for (const auto& p : cv.points) {
    rows.push_back({{"x", p.x},
                    {"W_pde", p.W_pde},
                    {"W_coarse", p.W_coarse},
                    {"richardson_delta", p.delta_disc},
                    {"W_mc", p.W_mc},
                    {"std_error", p.std_error},
                    {"pass", p.pass}});
    rep.check("pde_matches_mc(x=" + std::to_string(p.x) + ")", p.pass, std::abs(p.W_pde - p.W_mc),
              3.0 * p.std_error + p.delta_disc, "<=");
  }
  res["crossvalidation"] = rows;
  rep.check("lyapunov_constant_finite", std::isfinite(Wf.lyapunov_C), Wf.lyapunov_C, 0.0, "finite");
  rep.check("dirichlet_residual", Wf.residual <= 1e-6, Wf.residual, 1e-6, "<=");
  rep.check("W_identically_one_at_theta_zero", w0_defect == 0.0, w0_defect, 0.0, "==");
  for (const auto& w : Wf.warnings) rep.warn(w);
  const std::string csv = cfg.get_string("W_csv");
  if (!csv.empty()) io::write_grid_csv(csv, fine, Wf.W, "W");
}

inline void run_hormander(const ExperimentConfig& cfg, Report& rep) {
  const double X = cfg.get_double("X");
  const int nx = static_cast<int>(cfg.get_int("nx"));
  const int nu = static_cast<int>(cfg.get_int("nu"));
  const double alpha = cfg.get_double("alpha");
  const double a1 = cfg.has("a1") ? cfg.get_double("a1") : FieldFamily::a1();
  const auto main = hormander_check(FieldFamily::weighted(a1), X, nx, nu, alpha, cfg.workers);
  constexpr double kControlWeight = 0.25;
  const auto ctrl = hormander_check(FieldFamily::weighted(kControlWeight), X, nx, nu, alpha, cfg.workers);
  const double bracket = bracket_consistency(X, std::min(nx, 200), std::min(nu, 100));
  const double btol = cfg.get_double("bracket_tolerance");
  auto& res = rep.results();
  res["a1"] = a1;
  res["vprime_sup"] = kVPrimeSup;
  res["min_eigenvalue"] = main.min_eigenvalue;
  res["argmin"] = {main.argmin_x, main.argmin_u};
  res["control"] = {{"a1", kControlWeight}, {"min_eigenvalue", ctrl.min_eigenvalue}};
  res["bracket_error"] = bracket;
  rep.check("uniform_hormander_bound", main.pass, main.min_eigenvalue, alpha - 1e-6, ">=");
  rep.check("bracket_closed_forms", bracket <= btol, bracket, btol, "<=");
  rep.check("control_weight_detects_deficit", ctrl.min_eigenvalue < alpha, ctrl.min_eigenvalue, alpha, "<");
}

inline void run_langevin_conditions(const ExperimentConfig& cfg, Report& rep) {
  const ProcessSpec spec = detail::langevin_spec(cfg);
  const int dim = spec.dim();
  const double box = cfg.get_double("box");
  int points = static_cast<int>(cfg.get_int("points"));
  if (points == 0) points = dim == 1 ? 2001 : dim == 2 ? 401 : dim == 3 ? 101 : 21;
  const double ball = cfg.has("ball_radius") ? cfg.get_double("ball_radius") : 0.5 * box;
  const auto lc = langevin_conditions(PotentialEvaluator::from(spec.potential()), box, points, ball);
  auto& res = rep.results();
  res["dim"] = dim;
  res["potential"] = spec.potential().profile().to_string();
  res["box"] = box;
  res["points_per_axis"] = lc.points_per_axis;
  res["ball_radius"] = ball;
  res["condition_i"] = {{"min", num(lc.cond1_min)}, {"argmin", lc.cond1_argmin}, {"holds", lc.cond1}};
  res["condition_ii"] = {{"c1", lc.c1}, {"c2", lc.c2}, {"holds", lc.cond2}};
  res["condition_iii"] = {{"c3", num(lc.c3)}, {"holds", lc.cond3}};
  rep.check("condition_i", lc.cond1, lc.cond1_min, 0.0, ">");
  rep.check("condition_ii", lc.cond2, lc.c2, 0.99, "<=");
  rep.check("condition_iii", lc.cond3, lc.c3, std::numeric_limits<double>::infinity(), "<");
}

/// Validates and runs one experiment; library errors propagate.
inline Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep(cfg);
  const auto start = std::chrono::steady_clock::now();
  const std::string& k = cfg.kind;
  if (k == "bound-eval")
    run_bound_eval(cfg, rep);
  else if (k == "deviation")
    run_deviation(cfg, rep);
  else if (k == "hitting")
    run_hitting(cfg, rep);
  else if (k == "growth")
    run_growth(cfg, rep);
  else if (k == "spectral-rho")
    run_spectral_rho(cfg, rep);
  else if (k == "decay")
    run_decay(cfg, rep);
  else if (k == "dirichlet")
    run_dirichlet(cfg, rep);
  else if (k == "hormander")
    run_hormander(cfg, rep);
  else
    run_langevin_conditions(cfg, rep);
  rep.set_elapsed(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return rep;
}

}  // namespace hypoco::cli
