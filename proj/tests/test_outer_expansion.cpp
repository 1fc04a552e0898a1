#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/oracle.hpp"
#include "p2asym/outer_expansion.hpp"

using namespace p2asym;

namespace {

double fd2(double (*f)(double), double t, double h) {
  return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h);
}

double log_slope(double x0, double y0, double x1, double y1) { return std::log(y1 / y0) / std::log(x1 / x0); }

}  // namespace

TEST_CASE("leading term is the least root and u1c = -u0''/denom") {
  const double t = t_star() - 1.0;
  const OuterTerms o = outer_terms(t);
  CHECK(o.u0 == least_root(t));
  const double u0dd_fd = fd2(&least_root, t, 1e-3);
  CHECK(std::abs(o.u0_dd - u0dd_fd) < 1e-6 * std::abs(u0dd_fd));
  CHECK(o.u1c == doctest::Approx(-o.u0_dd / o.denom).epsilon(1e-13));
}

TEST_CASE("u0'' = 2 t u0 / denom^3, so u1c = -2 t u0 / denom^4") {
  for (double d : {0.05, 0.3, 1.0}) {
    const OuterTerms o = outer_terms(t_star() - d);
    CHECK(o.u0_dd == doctest::Approx(2 * o.t * o.u0 / std::pow(o.denom, 3)).epsilon(1e-12));
    CHECK(o.u1c == doctest::Approx(-2 * o.t * o.u0 / std::pow(o.denom, 4)).epsilon(1e-12));
  }
}

TEST_CASE("u0^2 numerator does not reproduce u0''" * doctest::should_fail()) {
  const OuterTerms o = outer_terms(t_star() - 1.0);
  CHECK(o.u1c == doctest::Approx(-2 * o.t * o.u0 * o.u0 / std::pow(o.denom, 4)).epsilon(1e-6));
}

TEST_CASE("denominator near t_star") {
  for (double d : {1e-4, 1e-6}) {
    const OuterTerms o = outer_terms(t_star() - d);
    const double ref = -2 * u_star() * std::sqrt(6.0) * std::sqrt(d);
    CHECK(o.denom == doctest::Approx(ref).epsilon(3 * std::sqrt(d)));
  }
}

TEST_CASE("u1c grows like (t_star - t)^{-2}") {
  const double a = outer_terms(t_star() - 1e-5).u1c;
  const double b = outer_terms(t_star() - 1e-3).u1c;
  CHECK(log_slope(1e-5, std::abs(a), 1e-3, std::abs(b)) == doctest::Approx(-2.0).epsilon(0.05));
  // Closed-form leading coefficient -(1/3) 2^{-10/3}.
  CHECK(a * 1e-10 == doctest::Approx(-std::pow(2.0, -10.0 / 3.0) / 3.0).epsilon(0.01));
}

TEST_CASE("outer_terms refuses t >= t_star") {
  CHECK_THROWS_AS(outer_terms(t_star()), DegenerateBranch);
  CHECK_THROWS_AS(outer_terms(t_star() + 0.1), DegenerateBranch);
}

TEST_CASE("eps = 0 collapses to the least root with zero residual") {
  const double t = t_star() - 0.5;
  const SolutionSample s = outer_eval(t, 0.0);
  CHECK(s.u == least_root(t));
  CHECK(outer_residual(t, 0.0) == 0.0);
}

TEST_CASE("residual scaling") {
  const double t = t_star() - 0.3;
  const double r1 = std::abs(outer_residual(t, 2e-3));
  const double r2 = std::abs(outer_residual(t, 1e-3));
  CHECK(r1 / r2 == doctest::Approx(64.0).epsilon(0.2));
  const double s = log_slope(1e-2, std::abs(outer_residual(t_star() - 1e-2, 1e-3)), 1e-1,
                             std::abs(outer_residual(t_star() - 1e-1, 1e-3)));
  CHECK(std::abs(s + 6.5) < 0.5);
  // t_star - 0.5, eps = 1e-3: of order eps^6 (t_star - t)^{-13/2}.
  const double r = std::abs(outer_residual(t_star() - 0.5, 1e-3));
  const double scale = 1e-18 * std::pow(0.5, -6.5);
  CHECK(r > 1e-3 * scale);
  CHECK(r < 1e3 * scale);
}

TEST_CASE("substitution check of the residual") {
  static double eps_now = 0.0;
  auto sum = [](double t) { return outer_sum(t, eps_now); };
  for (double eps : {0.05, 0.03, 0.02}) {
    eps_now = eps;
    for (double d : {0.3, 0.5, 1.0}) {
      const double t = t_star() - d, h = 1e-3;
      const double dd = (-sum(t - 2 * h) + 16 * sum(t - h) - 30 * sum(t) + 16 * sum(t + h) - sum(t + 2 * h)) / (12 * h * h);
      const double u = sum(t);
      const double sub = eps * eps * dd + 2 * u * u * u + t * u - 1;
      const double r = outer_residual(t, eps);
      CHECK(std::abs(sub - r) < 0.1 * std::abs(r));
    }
  }
}

TEST_CASE("validity margins") {
  CHECK(outer_validity(t_star() - 1.0, 1e-3).valid);
  for (double eps : {1e-2, 1e-3, 1e-4}) CHECK_FALSE(outer_validity(t_star() - std::pow(eps, 0.8), eps).valid);
  const Validity v = outer_validity(t_star() - 0.1, 1e-2);
  CHECK_FALSE(v.valid);
  CHECK(v.margin == doctest::Approx(0.1 * std::pow(10.0, 1.6)).epsilon(1e-12));
  CHECK_THROWS_AS(outer_eval(t_star() - 0.1, 1e-2), OutOfValidity);
  CHECK_THROWS_AS(outer_eval(t_star() - 1.5, 1e-2), OutOfValidity);
}

TEST_CASE("oracle converges to the outer sum at order eps^4") {
  const double t = t_star() - 0.5;
  std::vector<double> err;
  const std::vector<double> epss = {1e-2, 5e-3, 2.5e-3};
  for (double eps : epss) {
    OracleConfig cfg;
    cfg.eps = eps;
    cfg.t0 = t_star() - 1.0;
    cfg.t1 = t;
    cfg.tol = 1e-13;
    const OracleRun run = solve_p2(cfg);
    err.push_back(std::abs(run.samples.back().u - outer_sum(t, eps)));
  }
  CHECK(log_slope(epss[0], err[0], epss[2], err[2]) >= 3.5);
}
