#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/oracle.hpp"
#include "p2asym/outer_expansion.hpp"

using namespace p2asym;

namespace {

OracleRun run(double eps, double t0, double t1, double tol = 1e-10) {
  OracleConfig cfg;
  cfg.eps = eps;
  cfg.t0 = t0;
  cfg.t1 = t1;
  cfg.tol = tol;
  return solve_p2(cfg);
}

}  // namespace

TEST_CASE("initial condition on the slow branch") {
  const double t0 = t_star() - 1.0;
  const auto [u, du] = initial_condition(t0, 1e-2);
  CHECK(std::abs(u - least_root(t0)) < 2e-4);
  CHECK(du > 0);  // the least root increases towards t*
  const auto [u0, du0] = initial_condition(t0, 0.0);
  CHECK(u0 == least_root(t0));
  CHECK(du0 == 0.0);
  CHECK_THROWS_AS(initial_condition(t_star() - 0.1, 1e-2), DegenerateBranch);
}

TEST_CASE("oracle follows the outer expansion on the slow branch") {
  const double eps = 1e-2;
  const OracleRun r = run(eps, t_star() - 1.0, t_star() - 0.3, 1e-12);
  double worst = 0.0;
  for (const auto& s : r.samples) worst = std::max(worst, std::abs(s.u - outer_sum(s.t, eps)));
  CHECK(worst < 10 * std::pow(eps, 4));
  CHECK(r.events.empty());
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(run(0.0, -3.0, -2.5), OutOfValidity);
  CHECK_THROWS_AS(run(1e-2, -2.5, -3.0), OutOfValidity);
}

TEST_CASE("hard loss of stability at eps^2 = 0.1") {
  const double eps = std::sqrt(0.1);
  const OracleRun r = run(eps, t_star() - 1.0, t_star() + 1.5);
  int before = 0, after = 0;
  for (const auto& e : r.events) (e.t < t_star() ? before : after)++;
  CHECK(before == 0);
  CHECK(after >= 1);
  double amp = 0.0;
  for (const auto& s : r.samples)
    if (s.t > t_star() + 0.2) amp = std::max(amp, s.u - u_star());
  CHECK(amp > 1.0);
  CHECK(r.energy_drift < 1e-8);
}

TEST_CASE("peak values survive tolerance halving") {
  const double eps = std::sqrt(0.1);
  const OracleRun a = run(eps, t_star() - 1.0, t_star() + 1.5, 1e-10);
  const OracleRun b = run(eps, t_star() - 1.0, t_star() + 1.5, 5e-11);
  std::vector<double> pa, pb;
  for (const auto& e : a.events)
    if (e.kind == EventKind::Peak) pa.push_back(e.u);
  for (const auto& e : b.events)
    if (e.kind == EventKind::Peak) pb.push_back(e.u);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(std::abs(pa[i] - pb[i]) < 1e-3);
}

TEST_CASE("first peak at eps = 1e-2 sits near -3u*") {
  const double eps = 1e-2;
  const OracleRun r = run(eps, t_star() - 1.0, t_star() + 0.3);
  const auto it = std::find_if(r.events.begin(), r.events.end(), [](const OracleEvent& e) { return e.kind == EventKind::Peak; });
  REQUIRE(it != r.events.end());
  CHECK(std::abs(it->u + 3 * u_star()) < 3 * std::pow(eps, 0.8));
}

TEST_CASE("global error scales with the tolerance") {
  const double eps = 0.1, t1 = t_star() + 0.6;
  const double ref = run(eps, t_star() - 1.0, t1, 1e-13).samples.back().u;
  const double e1 = std::abs(run(eps, t_star() - 1.0, t1, 1e-7).samples.back().u - ref);
  const double e2 = std::abs(run(eps, t_star() - 1.0, t1, 2.5e-8).samples.back().u - ref);
  const double slope = std::log(e1 / e2) / std::log(4.0);
  MESSAGE("error-vs-tol slope " << slope);
  CHECK(slope > 0.5);
  CHECK(slope < 1.5);
}

TEST_CASE("dense output reproduces the accepted steps") {
  const OracleRun r = run(0.1, t_star() - 1.0, t_star() + 1.0);
  for (std::size_t i = 0; i < r.samples.size(); i += 37) {
    const auto [u, du] = r.eval(r.samples[i].t);
    CHECK(u == doctest::Approx(r.samples[i].u).epsilon(1e-12));
    CHECK(du == doctest::Approx(r.samples[i].du).epsilon(1e-10));
  }
  for (const auto& e : r.events) CHECK(std::abs(r.eval(e.t).second) < 1e-6);
}

TEST_CASE("envelope extraction") {
  const double eps = 1e-2;
  const OracleRun r = run(eps, t_star() - 1.0, t_star() + 0.6);
  // slow region: a single value
  const EnvelopeRow slow = envelope_window(r, t_star() - 0.9, t_star() - 0.8);
  CHECK(slow.u_min == slow.u_max);
  CHECK(slow.u_min == doctest::Approx(r.eval(t_star() - 0.85).first));
  // shorter than one oscillation
  std::vector<double> peaks;
  for (const auto& e : r.events)
    if (e.kind == EventKind::Peak && e.t > t_star() + 0.3) peaks.push_back(e.t);
  REQUIRE(peaks.size() >= 2);
  CHECK_THROWS_AS(envelope_window(r, peaks[0] + 0.01 * (peaks[1] - peaks[0]), peaks[0] + 0.2 * (peaks[1] - peaks[0])),
                  EmptyWindow);
  CHECK_THROWS_AS(extract_envelope(r, 0.0), EmptyWindow);
  // a window that catches the first peak without the following trough
  const auto first = std::find_if(r.events.begin(), r.events.end(), [](const OracleEvent& e) { return e.kind == EventKind::Peak; });
  REQUIRE(first + 1 < r.events.end());
  CHECK_THROWS_AS(envelope_window(r, t_star() - 0.5, 0.5 * (first->t + (first + 1)->t)), EmptyWindow);
  const auto rows = extract_envelope(r, 0.2);
  CHECK(rows.size() == 8);
  CHECK(rows.front().u_min == rows.front().u_max);
  CHECK(rows.back().u_max - rows.back().u_min > 1.0);
}
