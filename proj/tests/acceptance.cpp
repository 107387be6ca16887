// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hypoco/assumptions.hpp"
#include "hypoco/bounds.hpp"
#include "hypoco/cli/experiments.hpp"
#include "hypoco/dirichlet.hpp"
#include "hypoco/dms.hpp"
#include "hypoco/grid.hpp"
#include "hypoco/montecarlo.hpp"
#include "hypoco/processes.hpp"
#include "hypoco/stats.hpp"

using namespace hypoco;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, const mp& b) {
  const mp d = abs(mp(a) - b);
  return static_cast<double>(b == 0 ? d : d / abs(b));
}

// Shared across criteria 4–8: the certificate at reference resolution.
double g_rho = 0.0;

Outcome criterion1() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double rho = 0.01 + 5.0 * U(gen);
    const double vinf = 0.1 + 5.0 * U(gen);
    const double vl2 = vinf * (0.01 + 0.99 * U(gen));
    const double pref = 0.1 + 10.0 * U(gen);
    const double r = 0.01 + 2.0 * U(gen);
    const double t = 0.1 + 20.0 * U(gen);
    const double mu = 0.01 + 0.99 * U(gen);
    const bounds::BoundInputs<double> in{rho, vl2, vinf, pref};
    // Oracle: the formulas written out in 50-digit arithmetic.
    const mp Rho(rho), L2(vl2), Inf(vinf), P(pref), R(r), T(t), Mu(mu);
    const mp h = Rho * R * R / (25 * L2 * L2 + 6 * Inf * R);
    worst = std::max(worst, rel(bounds::h_rate(r, in), h));
    if (3 * vinf < 2 * rho)
      worst = std::max(worst, rel(bounds::lambda_upper(in).value(), 25 * L2 * L2 / (4 * Rho - 6 * Inf)));
    else if (!bounds::lambda_upper(in).is_infinite())
      return {false, "lambda_upper finite outside its range"};
    const double l0 = bounds::lambda0(in).value();
    const double be = bounds::beta(in);
    worst = std::max(worst, rel(l0, 2 * Rho / (3 * Inf)));
    worst = std::max(worst, rel(be, 25 * L2 * L2 / (6 * Inf)));
    const mp L0(l0), Be(be);
    worst = std::max(worst, rel(bounds::legendre_rate(r, l0, be), L0 * R * R / (Be * pow(1 + sqrt(1 + R / Be), 2))));
    worst = std::max(worst, rel(bounds::deviation_bound(t, r, in), sqrt(mp(2)) * P * exp(-T * h)));
    const mp hu = Rho * Mu / 31;
    const double theta = 0.5 * static_cast<double>(hu) * (0.05 + 1.9 * U(gen));
    worst = std::max(worst, rel(bounds::hitting_bound(theta, mu, rho, pref),
                                1 + sqrt(mp(2)) * P * mp(theta) / (hu - mp(theta))));
    worst = std::max(worst, rel(bounds::decay_envelope(t, rho), sqrt(mp(3)) * exp(-2 * Rho * T / 3)));
  }
  using boost::multiprecision::cpp_rational;
  const bounds::BoundInputs<cpp_rational> q{1, 1, 1, 1};
  const cpp_rational h1 = bounds::h_rate(cpp_rational(1), q);
  const bool exact = h1 == cpp_rational(1, 31);
  return {worst <= 1e-12 && exact,
          "max rel err " + fmt("%.2e", worst) + ", exact h(1) = " + h1.str()};
}

Outcome criterion2() {
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  bool dominates = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const double l0 = 0.01 + 10.0 * U(gen);
    const double be = 0.01 + 10.0 * U(gen);
    const double r = 0.001 + 10.0 * U(gen);
    const auto f = [&](long double lam) { return lam * r - be * lam * lam / (l0 - lam); };
    long double a = 0.0L, b = l0;
    const long double phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    long double c = b - phi * (b - a), d = a + phi * (b - a);
    long double fc = f(c), fd = f(d);
    for (int it = 0; it < 200; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = f(d);
      }
    }
    const double numeric = static_cast<double>(std::max(fc, fd));
    const double closed = bounds::legendre_rate(r, l0, be);
    worst = std::max(worst, std::abs(closed - numeric) / std::max(1.0, std::abs(numeric)));
    if (closed < l0 * r * r / (4.0 * (be + r))) dominates = false;
  }
  return {worst <= 1e-9 && dominates,
          "max deviation from golden section " + fmt("%.2e", worst) + (dominates ? ", dominates floor" : ", floor violated")};
}

Outcome criterion3() {
  const GridOperator g = build_rtorus_generator(128, 64, 40.0);
  const DMSOperators d(g, 0.5);
  const auto c = check_contracts(d, 100, 303);
  std::vector<std::string> failed;
  if (!(c.conservation <= 1e-10)) failed.push_back("L1");
  if (!(c.invariance <= 1e-8)) failed.push_back("wL");
  if (!(c.tpit <= 1e-8)) failed.push_back("TPiT=" + fmt("%.3g", c.tpit));
  if (!(c.s_symmetry <= 1e-10)) failed.push_back("S-symmetry");
  if (!(c.s_norm <= 0.5 + 1e-10)) failed.push_back("|S|");
  if (!(c.b_lower >= 0.5 && c.b_upper <= 1.5)) failed.push_back("B-equivalence");
  std::ostringstream os;
  os << "L1 " << fmt("%.1e", c.conservation) << ", wL " << fmt("%.1e", c.invariance) << ", TPiT "
     << fmt("%.3g", c.tpit) << " (PiTPi " << fmt("%.1e", c.pitpi) << "), S-sym " << fmt("%.1e", c.s_symmetry)
     << ", |S| " << fmt("%.6f", c.s_norm) << ", B in [" << fmt("%.4f", c.b_lower) << ", " << fmt("%.4f", c.b_upper)
     << "]";
  if (!failed.empty()) {
    os << "; failed:";
    for (const auto& f : failed) os << ' ' << f;
  }
  return {failed.empty(), os.str()};
}

Outcome criterion4() {
  const GridOperator g = build_rtorus_generator(128, 64, 40.0);
  const DMSOperators d(g, 0.5);
  const auto est = estimate_rho(d);
  RhoOptions neg;
  neg.negative_control = true;
  const auto ctrl = estimate_rho(d, neg);
  const GridOperator g2 = build_rtorus_generator(256, 128, 40.0);
  const DMSOperators d2(g2, 0.5);
  const auto est2 = estimate_rho(d2);
  g_rho = est.rho;
  const double change = std::abs(est2.rho - est.rho) / est.rho;
  std::ostringstream os;
  os << "rho " << fmt("%.6g", est.rho) << ", control " << fmt("%.2e", ctrl.rho) << ", doubled " << fmt("%.6g", est2.rho)
     << " (" << fmt("%.2f", 100 * change) << "%)";
  return {est.rho > 0 && ctrl.rho <= 1e-3 && change < 0.05, os.str()};
}

Outcome criterion5() {
  const GridOperator g = build_rtorus_generator(128, 64, 40.0);
  const DMSOperators d(g, 0.5);
  const auto rep = decay_check(d, g_rho, {0.5, 1.0, 2.0, 5.0}, 20, 505, 1e-8);
  double worst = 0.0;
  for (double r : rep.envelope_ratio) worst = std::max(worst, r);
  return {rep.pass, "max ||e^{tL}f|| / envelope " + fmt("%.4f", worst) + ", " +
                        std::to_string(rep.violations.size()) + " violations"};
}

Outcome criterion6() {
  const ProcessSpec spec = ProcessSpec::rtorus();
  const McOptions opt{0.01, 606, workers()};
  const auto run =
      simulate_time_averages(spec, [](std::span<const double> s) { return std::cos(s[1]); }, 0.0, 10.0, 100000, opt);
  const bounds::BoundInputs<double> in{g_rho, std::sqrt(0.5), 1.0, 1.0};
  bool pass = true;
  std::ostringstream os;
  for (double r : {0.1, 0.2, 0.3, 0.4}) {
    const auto e = run.estimate(r, 0.999);
    const double bound = bounds::deviation_bound(10.0, r, in);
    pass = pass && e.ci_upper <= bound;
    os << "r=" << r << ": " << fmt("%.4f", e.ci_upper) << " <= " << fmt("%.4f", bound) << "; ";
  }
  return {pass, os.str()};
}

Outcome criterion7() {
  const ProcessSpec spec = ProcessSpec::rtorus();
  const Region U = Region::slab(0, -1.0, 1.0);
  const double mu = U.mass(spec);
  const double h = bounds::hitting_rate(g_rho, mu);
  const double t_cap = std::ceil(50.0 / h / 0.01) * 0.01;
  const auto samples = hitting_times(spec, U, 10000, t_cap, McOptions{0.01, 707, workers()});
  bool pass = true;
  std::ostringstream os;
  for (double f : {0.25, 0.5, 0.75}) {
    const auto e = exp_moment(samples, f * h);
    const double bound = bounds::hitting_bound(f * h, mu, g_rho);
    pass = pass && e.censoring_valid(bound) && e.mean + 3 * e.std_error <= bound;
    os << f << "h: " << fmt("%.6f", e.mean + 3 * e.std_error) << " <= " << fmt("%.4f", bound) << "; ";
  }
  return {pass, os.str()};
}

Outcome criterion8() {
  const ProcessSpec spec = ProcessSpec::rtorus();
  const Region U = Region::slab(0, -1.0, 1.0);
  const double mu = U.mass(spec);
  const double h = bounds::hitting_rate(g_rho, mu);
  const double theta = 0.5 * h;
  const GridOperator fine = build_rtorus_generator(256, 128, 40.0, Scheme::Upwind);
  const GridOperator coarse = build_rtorus_generator(128, 64, 40.0, Scheme::Upwind);
  const auto Wf = solve_dirichlet(fine, -1.0, 1.0, theta, h);
  const auto Wc = solve_dirichlet(coarse, -1.0, 1.0, theta, h);
  const auto W0 = solve_dirichlet(fine, -1.0, 1.0, 0.0, h);
  bool ones = true;
  for (int a = 0; a < W0.W.size(); ++a) ones = ones && W0.W[a] == 1.0;
  const std::vector<double> probes = {1.5, 2.0, 3.0, 4.0, 6.0};
  const double t_cap = std::ceil(50.0 / h / 0.01) * 0.01;
  const auto mc = growth_profile(spec, U, theta, probes, 4000, t_cap, McOptions{0.01, 808, workers()});
  const auto cv = crossvalidate(Wf, Wc, mc);
  std::ostringstream os;
  for (const auto& p : cv.points)
    os << "x=" << p.x << ": " << fmt("%.2e", std::abs(p.W_pde - p.W_mc)) << " <= "
       << fmt("%.2e", 3 * p.std_error + p.delta_disc) << "; ";
  os << "C " << fmt("%.3g", Wf.lyapunov_C) << ", residual " << fmt("%.1e", Wf.residual)
     << (ones ? ", W = 1 at theta = 0" : ", W != 1 at theta = 0");
  return {cv.pass && std::isfinite(Wf.lyapunov_C) && Wf.residual <= 1e-6 && ones, os.str()};
}

Outcome criterion9() {
  const ProcessSpec spec = ProcessSpec::rtorus();
  const Region U = Region::slab(0, -1.0, 1.0);
  const double h = bounds::hitting_rate(g_rho, U.mass(spec));
  const double t_cap = std::ceil(50.0 / h / 0.01) * 0.01;
  const std::vector<double> xs = {2.0, 4.0, 6.0, 8.0};
  const auto g = growth_profile(spec, U, 0.5 * h, xs, 2000, t_cap, McOptions{0.01, 909, workers()});
  std::ostringstream os;
  os << "ratios";
  for (const auto& p : g.points) os << ' ' << fmt("%.4f", p.ratio);
  os << ", max at x=" << g.points[g.argmax].x;
  return {g.no_upward_trend, os.str()};
}

Outcome criterion10() {
  const auto rep = hormander_check(FieldFamily::weighted(), 20.0, 400, 200, 0.5, workers());
  const double br = bracket_consistency(20.0, 400, 200);
  return {rep.pass && br <= 1e-6,
          "min eigenvalue " + fmt("%.6f", rep.min_eigenvalue) + ", bracket error " + fmt("%.1e", br)};
}

Outcome criterion11() {
  bool pass = true;
  std::ostringstream os;
  for (int d = 1; d <= 3; ++d) {
    const SeparablePotential U(d, Polynomial({0.0, 0.0, 0.5}));
    const int n = d == 1 ? 2001 : d == 2 ? 401 : 101;
    const auto r = langevin_conditions(PotentialEvaluator::from(U), 10.0, n, 5.0);
    const bool ok = r.pass && std::abs(r.c1 - d) <= 1e-9 && r.c2 == 0.0 && std::abs(r.c3 - 1.0) <= 1e-9;
    pass = pass && ok;
    os << "d=" << d << ": c1 " << r.c1 << " c2 " << r.c2 << " c3 " << r.c3 << "; ";
  }
  const SeparablePotential flat(2, Polynomial({3.0}));
  const auto f = langevin_conditions(PotentialEvaluator::from(flat), 10.0, 101, 5.0);
  pass = pass && !f.cond1;
  os << (f.cond1 ? "constant U passes (i)" : "constant U fails (i)");
  return {pass, os.str()};
}

Outcome criterion12() {
  std::ostringstream os;
  bool pass = true;
  const std::size_t n = 10000;
  // Kinetic Langevin, U = x²/2: v at t = 10 from μ.
  {
    const ProcessSpec spec = ProcessSpec::kinetic_langevin(1, Polynomial({0.0, 0.0, 0.5}));
    std::vector<double> v2(n);
    parallel_for(n, workers(), [&](std::size_t i) {
      const auto tr = simulate(spec, FromInvariant{}, 10.0, 0.01, 1212, {}, i);
      const double v = tr.state(tr.size() - 1)[1];
      v2[i] = v * v;
    });
    const auto m = mean_and_error(v2);
    const bool ok = std::abs(m.mean - 1.0) <= 0.02 + 3 * m.std_error;
    pass = pass && ok;
    os << "E v^2 " << fmt("%.4f", m.mean) << " +- " << fmt("%.4f", m.std_error) << "; ";
  }
  // Self-interacting on 𝕋²: U_j variances at t = 10.
  {
    const std::vector<FourierMode> modes = {{{1, 0}, false, 1.0}, {{0, 1}, true, 2.0}, {{1, 1}, false, 0.5}};
    const ProcessSpec spec = ProcessSpec::self_interacting(2, modes);
    std::vector<std::vector<double>> u(modes.size(), std::vector<double>(n));
    parallel_for(n, workers(), [&](std::size_t i) {
      const auto tr = simulate(spec, FromInvariant{}, 10.0, 0.01, 1213, {}, i);
      const auto s = tr.state(tr.size() - 1);
      for (std::size_t j = 0; j < modes.size(); ++j) u[j][i] = s[2 + j];
    });
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const auto mean = mean_and_error(u[j]).mean;
      std::vector<double> sq(n);
      for (std::size_t i = 0; i < n; ++i) sq[i] = (u[j][i] - mean) * (u[j][i] - mean);
      const auto var = mean_and_error(sq);
      const double target = modes[j].invariant_variance();
      const bool ok = std::abs(var.mean - target) <= 0.05 * target + 3 * var.std_error;
      pass = pass && ok;
      os << "var U" << j << " " << fmt("%.4f", var.mean) << " vs " << fmt("%.4f", target) << "; ";
    }
  }
  // Angle of the ℝ×𝕋 process at t = 10 from μ: uniform on [0, 2π).
  {
    const ProcessSpec spec = ProcessSpec::rtorus();
    std::vector<double> angles(n), xs(n);
    parallel_for(n, workers(), [&](std::size_t i) {
      const auto tr = simulate(spec, FromInvariant{}, 10.0, 0.01, 1214, {}, i);
      angles[i] = tr.state(tr.size() - 1)[1];
      xs[i] = sample_invariant(spec, 1215, i)[0];
    });
    std::sort(angles.begin(), angles.end());
    std::sort(xs.begin(), xs.end());
    const double ks = ks_statistic(angles, [](double a) { return a / (2.0 * std::numbers::pi); });
    const auto& marg = spec.position_marginal();
    const double ksx = ks_statistic(xs, [&](double x) { return marg.cdf(x); });
    const double crit = ks_critical(n, 0.01);
    pass = pass && ks <= crit && ksx <= crit;
    os << "KS angle " << fmt("%.4f", ks) << ", KS x-sampler " << fmt("%.4f", ksx) << " (crit " << fmt("%.4f", crit)
       << ")";
  }
  return {pass, os.str()};
}

Outcome criterion13() {
  using cli::ExperimentConfig;
  const auto make = [](const std::string& text) { return cli::parse_config_text(text); };
  const std::vector<std::string> configs = {
      "[experiment]\nkind = deviation\nseed = 13\n[process]\ntype = rtorus\n[parameters]\nrho = 0.027\n"
      "r = 0.1 0.2\nn_traj = 3000\nt = 5\n",
      "[experiment]\nkind = hitting\nseed = 14\n[process]\ntype = rtorus\n[parameters]\nrho = 0.027\n"
      "n_traj = 3000\n",
      "[experiment]\nkind = growth\nseed = 15\n[process]\ntype = rtorus\n[parameters]\nrho = 0.027\n"
      "x_points = 2 4\nn_traj = 300\n",
      "[experiment]\nkind = hormander\nseed = 16\n[parameters]\nnx = 200\nnu = 100\n",
      "[experiment]\nkind = spectral-rho\nseed = 17\n[process]\ntype = rtorus\n[parameters]\nnx = 32\nnu = 16\n"
      "refine = false\nn_probes = 10\n"};
  bool pass = true;
  std::ostringstream os;
  for (const auto& text : configs) {
    std::string reference;
    for (unsigned w : {1u, 4u, 8u}) {
      ExperimentConfig cfg = make(text);
      cfg.workers = w;
      const auto dump = cli::Report::deterministic_part(cli::run_experiment(cfg).to_json()).dump();
      if (w == 1)
        reference = dump;
      else if (dump != reference) {
        pass = false;
        os << cfg.kind << " differs at " << w << " workers; ";
      }
    }
    os << make(text).kind << " ok; ";
  }
  return {pass, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, 1, criterion1},     {2, 10, criterion2},    {3, 60, criterion3},    {4, 300, criterion4},
      {5, 120, criterion5},   {6, 900, criterion6},   {7, 900, criterion7},   {8, 600, criterion8},
      {9, 600, criterion9},   {10, 30, criterion10},  {11, 10, criterion11},  {12, 300, criterion12},
      {13, 300, criterion13}};
  bool all = true;
  for (const auto& [id, limit, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > limit) {
      o.pass = false;
      o.detail += " (over the " + fmt("%.0f", limit) + " s budget)";
    }
    all = all && o.pass;
    std::printf("criterion %2d: %s  [%.1f s]  %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
