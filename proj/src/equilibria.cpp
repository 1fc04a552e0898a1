#include "p2asym/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "p2asym/errors.hpp"

namespace p2asym {

CriticalData critical_point() {
  const double ts = -3.0 * std::pow(2.0, -1.0 / 3.0);
  const double us = -std::pow(4.0, -1.0 / 3.0);
  // F(x) = -x^4 - t x^2 + 2x + E has a triple root at u_star when
  // E = 3 u_star^4 = (3/4) 2^{-2/3}.
  const double Es = 0.75 * std::pow(2.0, -2.0 / 3.0);
  return {ts, us, Es, -3.0 * us};
}

double t_star() { return -3.0 * std::pow(2.0, -1.0 / 3.0); }
double u_star() { return -std::pow(4.0, -1.0 / 3.0); }

double discriminant(double t) {
  const double a = t / 6.0;
  return a * a * a + 1.0 / 16.0;
}

namespace {

double polish(double u, double t) {
  const double f = 2 * u * u * u + t * u - 1;
  const double df = 6 * u * u + t;
  if (std::abs(df) < 1e-6) return u;
  return u - f / df;
}

}  // namespace

EquilibriumSet equilibrium_roots(double t) {
  EquilibriumSet out{t, {}, discriminant(t)};
  // u^3 + p u + q = 0 with p = t/2, q = -1/2.
  const double p = 0.5 * t, q = -0.5;
  const double D = out.discriminant;
  if (std::abs(D) <= 1e-15) {
    const double simple = 3 * q / p;
    const double dbl = -1.5 * q / p;
    out.roots = {dbl, dbl, simple};
  } else if (D < 0) {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      out.roots.push_back(polish(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0), t));
  } else {
    const double s = std::sqrt(D);
    out.roots.push_back(polish(std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s), t));
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

double least_root(double t) {
  const auto set = equilibrium_roots(t);
  if (set.roots.size() < 3)
    throw DegenerateBranch("no slow branch for t=" + std::to_string(t) + " > t_star");
  return set.roots.front();
}

Stability classify_branch(double t, int j) {
  const auto set = equilibrium_roots(t);
  if (j < 1 || j > static_cast<int>(set.roots.size()))
    throw OutOfValidity("branch index " + std::to_string(j) + " not present at t=" + std::to_string(t));
  const double u = set.roots[static_cast<std::size_t>(j - 1)];
  const double s = 6 * u * u + t;
  if (std::abs(s) < kDegenerateThreshold) return Stability::Degenerate;
  return s > 0 ? Stability::Stable : Stability::Unstable;
}

}  // namespace p2asym
