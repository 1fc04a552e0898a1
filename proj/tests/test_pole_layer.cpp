#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/kuzmak.hpp"
#include "p2asym/oracle.hpp"
#include "p2asym/p1_layer.hpp"
#include "p2asym/pole_layer.hpp"

using namespace p2asym;

namespace {

const P1Trajectory& trajectory() {
  static const P1Trajectory tr = [] {
    P1Trajectory t = integrate_p1(-30, 9);
    first_correction(t);
    return t;
  }();
  return tr;
}

const PoleLayerFrame& frame1() {
  static const PoleLayerFrame f = make_frame(trajectory().poles.at(0));
  return f;
}

template <class F>
double fd2(F f, double x, double h) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

}  // namespace

TEST_CASE("leading profile") {
  const double us = u_star();
  CHECK(w0_eval(0.0) == doctest::Approx(-4 * us).epsilon(1e-15));
  CHECK(w0_eval(0.0) == doctest::Approx(2.5198421).epsilon(1e-7));
  CHECK(w0_eval(1e4) * us * 1e8 == doctest::Approx(-1.0).epsilon(1e-6));
  for (int i = 0; i <= 80; ++i) {
    const double th = -20 + 0.5 * i;
    const double w = w0_eval(th);
    CHECK(std::abs(fd2(w0_eval, th, 1e-3) + 6 * us * w * w + 2 * w * w * w) < 1e-8);
    CHECK(std::abs(w0_prime(th) - (w0_eval(th + 1e-5) - w0_eval(th - 1e-5)) / 2e-5) < 1e-8);
  }
}

TEST_CASE("peak u* + w0(0) = -3u* is the outer quartic root at degeneration") {
  const double peak = u_star() + w0_eval(0.0);
  CHECK(peak == doctest::Approx(-3 * u_star()).epsilon(1e-15));
  const QuarticRoots r = quartic_factor(t_star(), critical_point().E_star);
  CHECK(std::abs(peak - r.alpha) < 1e-10);
}

TEST_CASE("homogeneous pair of the linearized equation") {
  const double us = u_star();
  for (double th : {-7.0, -1.3, 0.2, 2.0, 9.0}) {
    const double w = w0_eval(th);
    const double pot = 12 * us * w + 6 * w * w;
    CHECK(std::abs(fd2(hom1, th, 1e-3) + pot * hom1(th)) < 1e-8 * std::max(1.0, std::abs(hom1(th))));
    CHECK(std::abs(fd2(hom2, th, 1e-3) + pot * hom2(th)) < 1e-8 * std::max(1.0, std::abs(hom2(th))));
    CHECK(hom1(th) * hom2_prime(th) - hom1_prime(th) * hom2(th) == doctest::Approx(hom_wronskian()).epsilon(1e-10));
  }
  CHECK(hom1(-2.0) == doctest::Approx(-hom1(2.0)));
  CHECK(hom2(-2.0) == doctest::Approx(hom2(2.0)));
}

TEST_CASE("first correction far field and parity") {
  const PoleLayerFrame& f = frame1();
  const double us = u_star();
  CHECK(correction_w(1, 50.0, f) / 2500.0 == doctest::Approx(f.tau_k * us / 10).epsilon(1e-4));
  CHECK(std::isfinite(correction_w(1, 0.0, f)));
  for (double th : {0.3, 2.0, 11.0}) CHECK(correction_w(1, th, f) == doctest::Approx(correction_w(1, -th, f)).epsilon(1e-12));
  // Constant of the far field: tau_k / (120 u*) with the sign fixed by the chain.
  const double th = 200.0;
  const double rest = correction_w(1, th, f) - f.tau_k * us / 10 * th * th;
  CHECK(rest == doctest::Approx(-f.tau_k / (120 * us)).epsilon(1e-3));
}

TEST_CASE("second and third corrections far field") {
  const PoleLayerFrame& f = frame1();
  const double us = u_star(), th = 60.0;
  CHECK(correction_w(2, th, f) / std::pow(th, 3) == doctest::Approx(us / 6).epsilon(1e-3));
  CHECK(correction_w(3, th, f) / std::pow(th, 4) == doctest::Approx(f.c_k).epsilon(0.05));
}

TEST_CASE("w4 theta^4 coefficient is continuous across the layer") {
  const PoleLayerFrame& f = frame1();
  const double left = w4_theta4_coeff(f, -1), right = w4_theta4_coeff(f, +1);
  CHECK(std::abs(right - left) < 1e-6 * std::max(1.0, std::abs(left)));
}

TEST_CASE("stated w4 theta^4 jump -11 u* tau_k^2 / 2100" * doctest::should_fail()) {
  const PoleLayerFrame& f = frame1();
  const double jump = w4_theta4_coeff(f, +1) - w4_theta4_coeff(f, -1);
  CHECK(jump == doctest::Approx(-11 * u_star() * f.tau_k * f.tau_k / 2100).epsilon(0.02));
}

TEST_CASE("inner2 at the pole, validity and frame checks") {
  const double eps = 1e-3;
  const PoleLayerFrame& f = frame1();
  const double t = InnerScale{eps}.t_of_tau(f.tau_k);
  const SolutionSample s = inner2_eval(t, eps, f);
  CHECK(s.regime == Regime::PoleIII);
  CHECK(std::abs(s.u + 3 * u_star()) < 0.05);
  CHECK_THROWS_AS(inner2_eval(t, 0.0, f), OutOfValidity);
  CHECK_THROWS_AS(inner2_eval(InnerScale{eps}.t_of_tau(f.tau_k + 2.0), eps, f), OutOfValidity);
  CHECK_THROWS_AS(inner2_eval(t, eps, PoleLayerFrame{}), FrameIncomplete);
}

TEST_CASE("inner2 and inner1 agree in their overlap") {
  const PoleLayerFrame& f = frame1();
  // theta = 10 fits inside |theta tau_k^{1/5}| < M2 eps^{-1/5} only for eps <~ 1e-4
  for (auto [eps, theta] : {std::pair{1e-3, 6.0}, std::pair{1e-4, 10.0}, std::pair{1e-6, 10.0}}) {
    const InnerScale sc{eps};
    for (int side : {-1, 1}) {
      const double t = sc.t_of_tau(f.tau_k + side * theta * std::pow(eps, 0.2));
      const SolutionSample a = inner2_eval(t, eps, f), b = inner1_eval(t, eps, trajectory());
      CHECK(std::abs(a.u - b.u) < 5 * (a.residual + b.residual));
    }
  }
}

TEST_CASE("overlap mismatch at tiny eps is the theta^{-6} truncation of inner1") {
  const PoleLayerFrame& f = frame1();
  const double eps = 1e-10;
  for (double theta : {6.0, 12.0, 24.0})
    for (int side : {-1, 1}) {
      const double t = InnerScale{eps}.t_of_tau(f.tau_k + side * theta * std::pow(eps, 0.2));
      const double d = inner1_eval(t, eps, trajectory()).u - inner2_eval(t, eps, f).u;
      CHECK(-d * std::pow(theta, 6) > 0.3);
      CHECK(-d * std::pow(theta, 6) < 1.0);
    }
}

TEST_CASE("oracle peak near the first pole") {
  const double eps = 1e-3;
  const InnerScale sc{eps};
  const double tk = sc.t_of_tau(frame1().tau_k);
  OracleConfig cfg;
  cfg.eps = eps;
  cfg.t0 = t_star() - 0.5;
  cfg.t1 = tk + 3 * std::pow(eps, 0.8 + 0.2);
  cfg.tol = 1e-11;
  const OracleRun run = solve_p2(cfg);
  double peak = -INFINITY;
  for (const auto& e : run.events)
    if (e.kind == EventKind::Peak) peak = std::max(peak, e.u);
  REQUIRE(std::isfinite(peak));
  CHECK(std::abs(peak + 3 * u_star()) < 3 * std::pow(eps, 0.8));
}
