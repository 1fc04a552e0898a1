#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/kuzmak.hpp"
#include "p2asym/oracle.hpp"

using namespace p2asym;
using std::numbers::pi;

namespace {

const DegenerationConstants& constants() {
  static const DegenerationConstants c = solve_k();
  return c;
}

const KuzmakTable& table() {
  static const KuzmakTable t = solve_phase(constants());
  return t;
}

double E_star() { return critical_point().E_star; }

// Independent reference: tanh-sinh on 2 int_beta^alpha sqrt(F).
double reference_I0(double t, double E) {
  const QuarticRoots r = quartic_factor(t, E);
  boost::math::quadrature::tanh_sinh<double> ts;
  auto F = [&](double x) { return std::sqrt(std::max(0.0, -x * x * x * x - t * x * x + 2 * x + E)); };
  return 2 * ts.integrate(F, r.beta, r.alpha);
}

}  // namespace

TEST_CASE("transcendental equation for k") {
  const DegenerationConstants& c = constants();
  CHECK(c.k >= 0.460);
  CHECK(c.k <= 0.466);
  CHECK(c.k == doctest::Approx(0.4620527968540813).epsilon(1e-12));
  CHECK(std::abs(c_of_k(c.k)) < 1e-10);
  CHECK(c_of_k(0.3) * c_of_k(0.6) < 0);
  for (double k : {0.3, c.k, 0.6}) CHECK(std::abs(c_of_k(k, 1) - c_of_k(k, 2)) < 1e-10);
}

TEST_CASE("c(0.463) is not within 5e-3 |c(0.3)| of zero" * doctest::should_fail()) {
  CHECK(std::abs(c_of_k(0.463)) < 5e-3 * std::abs(c_of_k(0.3)));
}

TEST_CASE("degeneration constants") {
  const DegenerationConstants& c = constants();
  CHECK(c.C_star == doctest::Approx(3.98250224271).epsilon(1e-10));
  CHECK(c.T > 0);
  CHECK(c.T == doctest::Approx(4.1421573368).epsilon(1e-9));
  CHECK(c.nu1 == doctest::Approx(0.7336949735).epsilon(1e-9));
  CHECK(c.mu1 == doctest::Approx(0.1130019382).epsilon(1e-9));
  CHECK(c.gamma1 == doctest::Approx(u_star() * u_star()));
  // closed forms at the quoted k = 0.463
  const double k = 0.463, nu = std::sqrt(3 / (2 * (3 - k * k)));
  CHECK(nu == doctest::Approx(0.73382).epsilon(2e-5));
  CHECK(k / 3 * nu == doctest::Approx(0.11325).epsilon(1e-4));
}

TEST_CASE("C*(k) against exp-sinh quadrature") {
  const double k = constants().k;
  boost::math::quadrature::exp_sinh<double> es;
  // y = s^2
  const double ref = es.integrate([&](double s) { return 2 / std::sqrt((s * s - k) * (s * s - k) + 1); }, 0.0,
                                  std::numeric_limits<double>::infinity());
  CHECK(std::abs(C_star_of_k(k) - ref) < 1e-9);
}

TEST_CASE("action at degeneration and the Beta-function closed form") {
  CHECK(std::abs(action_I0(t_star(), E_star()) - 2 * pi) < 1e-8);
  CHECK(action_I0_degenerate_closed_form() == doctest::Approx(2 * pi).epsilon(1e-14));
  const double L = -4 * u_star();
  CHECK(L * L * L == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(L * L * L * boost::math::beta(2.5, 1.5) == doctest::Approx(pi).epsilon(1e-14));
}

TEST_CASE("action quadrature against tanh-sinh, monotonicity in E") {
  for (double eta : {0.01, 0.5, 1.0}) {
    const double t = t_star() + eta;
    const double E = solve_E(t, E_guess_near_degeneration(t)).E;
    CHECK(std::abs(action_I0(t, E) - reference_I0(t, E)) < 1e-9);
    const double h = 1e-5;
    const double d = (action_I0(t, E + h) - action_I0(t, E - h)) / (2 * h);
    CHECK(d > 0);
    CHECK(d == doctest::Approx(period_J(t, E)).epsilon(1e-4));
  }
}

TEST_CASE("quartic roots") {
  const QuarticRoots d = quartic_factor(t_star(), E_star());
  const double us = u_star();
  CHECK(d.alpha == doctest::Approx(-3 * us).epsilon(1e-12));
  CHECK(std::abs(d.beta - us) < 1e-4);
  CHECK(std::abs(d.m - us) < 1e-4);
  CHECK(d.n < 1e-4);
  for (auto [t, E] : {std::pair{t_star() + 0.3, 0.9}, std::pair{-1.0, 2.0}, std::pair{t_star() + 1e-3, E_star() + 1e-4}}) {
    const QuarticRoots r = quartic_factor(t, E);
    CHECK(std::abs(r.alpha + r.beta + 2 * r.m) < 1e-10);
    CHECK(std::abs(r.alpha * r.beta * (r.m * r.m + r.n * r.n) + E) < 1e-9);
    // -(x - a)(x - b)((x - m)^2 + n^2) = -x^4 - t x^2 + 2x + E
    const double q = r.m * r.m + r.n * r.n, ab = r.alpha * r.beta, s = r.alpha + r.beta;
    CHECK(std::abs(ab + q + 2 * r.m * s - t) < 1e-10);
    CHECK(std::abs(s * q + 2 * r.m * ab - 2) < 1e-10);
  }
}

TEST_CASE("energy near degeneration") {
  const DegenerationConstants& c = constants();
  for (double eta : {1e-4, 1e-5}) {
    const ModulationState s = solve_E(t_star() + eta, E_guess_near_degeneration(t_star() + eta));
    CHECK((s.E - E_star()) / eta == doctest::Approx(c.gamma1).epsilon(0.05));
    CHECK(s.n / std::sqrt(eta) == doctest::Approx(c.nu1).epsilon(0.05));
  }
  const ModulationState s = solve_E(t_star() + 0.5, 0.9);
  CHECK(std::abs(action_I0(s.t, s.E) - 2 * pi) < 1e-8);
  CHECK_THROWS_AS(solve_E(t_star() - 0.1, 0.5), OutOfValidity);
}

TEST_CASE("phase function near degeneration") {
  const KuzmakTable& tab = table();
  const double eta = 1e-3;
  const ModulationState s = tab.at(t_star() + eta);
  const double ratio = s.S / (0.8 * std::pow(eta, 1.25));
  CHECK(ratio >= 0.98);
  CHECK(ratio <= 1.02);
  const double a = tab.at(t_star() + 1e-6).S_prime, b = tab.at(t_star() + 1e-4).S_prime;
  CHECK(std::log(b / a) / std::log(100.0) == doctest::Approx(0.25).epsilon(0.08));
  // S' per unit of (t - t*)^{1/4}
  CHECK(b / std::pow(1e-4, 0.25) == doctest::Approx(1.0).epsilon(0.01));
  // phase with a = 0 stays at phi(t*)
  for (double eta2 : {0.01, 0.3, 1.0}) CHECK(tab.at(t_star() + eta2).phi == 0.0);
  KuzmakOptions o;
  o.phi0 = 0.7;
  const KuzmakTable shifted = solve_phase(constants(), o);
  CHECK(shifted.at(t_star() + 0.4).phi == 0.7);
}

TEST_CASE("grid and table phase agree") {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(t_star() + 0.05 * i);
  const auto states = solve_phase(grid, constants());
  for (const auto& s : states) CHECK(s.S == doctest::Approx(table().at(s.t).S).epsilon(1e-6));
}

TEST_CASE("closed orbit U0") {
  const ModulationState s = table().at(t_star() + 0.5);
  CHECK(leading_U0(0.0, s) == doctest::Approx(s.beta).epsilon(1e-12));
  const double P = t1_period(s);
  CHECK(leading_U0(P / 2, s) == doctest::Approx(s.alpha).epsilon(1e-10));
  CHECK(leading_U0(P, s) == doctest::Approx(s.beta).epsilon(1e-8));
  CHECK(leading_U0(0.3 * P, s) == doctest::Approx(leading_U0(0.7 * P, s)).epsilon(1e-9));
  // the t1 period tends to the real period of the Boutroux lattice
  CHECK(t1_period(table().at(t_star() + 1e-6)) == doctest::Approx(5.857895083186444).epsilon(1e-3));
}

TEST_CASE("profile approaches the separatrix near t*") {
  const double us = u_star();
  for (double eta : {1e-3, 1e-4}) {
    const ModulationState s = table().at(t_star() + eta);
    const double P = t1_period(s);
    double worst = 0.0;
    for (int i = 1; i < 200; ++i) {
      const double t1 = P * i / 200.0;
      const double x = (t1 - P / 2) / s.S_prime;
      const double w0 = -4 * us / (1 + 4 * us * us * x * x);
      worst = std::max(worst, std::abs(leading_U0(t1, s) - (us + w0)));
    }
    CHECK(worst < 3 * std::sqrt(eta));
  }
}

TEST_CASE("Kuzmak evaluation validity and range") {
  const KuzmakTable& tab = table();
  const double t = t_star() + 0.5;
  const ModulationState s = tab.at(t);
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const SolutionSample v = kuzmak_eval(t, eps, tab);
    CHECK(v.regime == Regime::KuzmakIV);
    CHECK(v.u >= s.beta - 1e-12);
    CHECK(v.u <= s.alpha + 1e-12);
  }
  CHECK_THROWS_AS(kuzmak_eval(t_star() + 0.01, 1e-2, tab), OutOfValidity);
  CHECK_THROWS_AS(kuzmak_eval(t_star() + 1.5, 1e-2, tab), OutOfValidity);
  CHECK_THROWS_AS(kuzmak_eval(t, 0.0, tab), OutOfValidity);
}

TEST_CASE("oracle envelope and frequency at t* + 0.5") {
  const double t = t_star() + 0.5;
  const ModulationState s = table().at(t);
  {
    const double eps = std::sqrt(0.1);
    OracleConfig cfg;
    cfg.eps = eps;
    cfg.t0 = t_star() - 1.0;
    cfg.t1 = t + 1.0;
    const OracleRun run = solve_p2(cfg);
    const EnvelopeRow row = envelope_window(run, t - 0.3, t + 0.3);
    CHECK(row.u_max <= s.alpha + 3 * eps);
    CHECK(row.u_min >= s.beta - 3 * eps);
  }
  {
    const double eps = 1e-2;
    OracleConfig cfg;
    cfg.eps = eps;
    cfg.t0 = t_star() - 0.5;
    cfg.t1 = t + 0.2;
    const OracleRun run = solve_p2(cfg);
    std::vector<double> peaks;
    for (const auto& e : run.events)
      if (e.kind == EventKind::Peak && std::abs(e.t - t) < 0.15) peaks.push_back(e.t);
    REQUIRE(peaks.size() >= 3);
    const double spacing = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
    CHECK(spacing == doctest::Approx(eps * t1_period(s) / s.S_prime).epsilon(0.05));
    const EnvelopeRow row = envelope_window(run, t - 0.05, t + 0.05);
    CHECK(std::abs(row.u_max - s.alpha) < 3 * eps);
    CHECK(std::abs(row.u_min - s.beta) < 3 * eps);
  }
}
