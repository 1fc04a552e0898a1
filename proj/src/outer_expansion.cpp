#include "p2asym/outer_expansion.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"

namespace p2asym {

namespace {

// Truncated Taylor series in h = t' - t.
using Jet = std::vector<double>;
constexpr std::size_t kOrder = 9;

Jet mul(const Jet& a, const Jet& b) {
  Jet c(kOrder, 0.0);
  for (std::size_t i = 0; i < kOrder; ++i)
    for (std::size_t j = 0; i + j < kOrder; ++j) c[i + j] += a[i] * b[j];
  return c;
}

Jet div(const Jet& a, const Jet& b) {
  Jet c(kOrder, 0.0);
  for (std::size_t n = 0; n < kOrder; ++n) {
    double s = a[n];
    for (std::size_t k = 1; k <= n; ++k) s -= b[k] * c[n - k];
    c[n] = s / b[0];
  }
  return c;
}

Jet second_derivative(const Jet& a) {
  Jet c(kOrder, 0.0);
  for (std::size_t n = 0; n + 2 < kOrder; ++n) c[n] = static_cast<double>((n + 1) * (n + 2)) * a[n + 2];
  return c;
}

Jet scale(Jet a, double s) {
  for (double& x : a) x *= s;
  return a;
}

Jet add(Jet a, const Jet& b) {
  for (std::size_t i = 0; i < kOrder; ++i) a[i] += b[i];
  return a;
}

struct Jets {
  Jet u0, u1, u2, denom;
};

Jets build(double t) {
  Jets j;
  j.u0.assign(kOrder, 0.0);
  j.u0[0] = least_root(t);
  Jet tt(kOrder, 0.0);
  tt[0] = t;
  tt[1] = 1.0;
  const double d0 = 6 * j.u0[0] * j.u0[0] + t;
  // order-by-order solve of 2u^3 + t u - 1 = 0
  for (std::size_t n = 1; n < kOrder; ++n) {
    const Jet f = add(scale(mul(mul(j.u0, j.u0), j.u0), 2.0), mul(tt, j.u0));
    j.u0[n] = -f[n] / d0;
  }
  j.denom = add(scale(mul(j.u0, j.u0), 6.0), tt);
  j.u1 = scale(div(second_derivative(j.u0), j.denom), -1.0);
  const Jet num = add(scale(mul(j.u0, mul(j.u1, j.u1)), 6.0), second_derivative(j.u1));
  j.u2 = scale(div(num, j.denom), -1.0);
  return j;
}

}  // namespace

OuterTerms outer_terms(double t) {
  if (!(t < t_star())) throw DegenerateBranch("outer terms need t < t_star, got t=" + std::to_string(t));
  const Jets j = build(t);
  return {t, j.u0[0], j.u1[0], j.u2[0], j.denom[0], 2 * j.u0[2], 2 * j.u1[2], 2 * j.u2[2]};
}

Validity outer_validity(double t, double eps, const OuterOptions& opt) {
  const double ts = t_star();
  if (t < ts - opt.a) return {false, 0.0, "t >= t_star - a"};
  if (!(t < ts)) return {false, 0.0, "(t_star - t) eps^{-4/5} >> 1"};
  const double margin = eps > 0 ? (ts - t) * std::pow(eps, -0.8) : INFINITY;
  if (margin <= opt.M_outer) return {false, margin, "(t_star - t) eps^{-4/5} >> 1"};
  return {true, margin, ""};
}

double outer_sum(double t, double eps) {
  const auto o = outer_terms(t);
  const double e2 = eps * eps;
  return o.u0 + e2 * o.u1c + e2 * e2 * o.u2c;
}

double outer_residual(double t, double eps) {
  const auto o = outer_terms(t);
  const double e2 = eps * eps, e6 = e2 * e2 * e2;
  const double u0 = o.u0, u1 = o.u1c, u2 = o.u2c;
  const double c6 = o.u2c_dd + 12 * u0 * u1 * u2 + 2 * u1 * u1 * u1;
  const double c8 = 6 * u1 * u1 * u2 + 6 * u0 * u2 * u2;
  const double c10 = 6 * u1 * u2 * u2;
  const double c12 = 2 * u2 * u2 * u2;
  return e6 * (c6 + e2 * (c8 + e2 * (c10 + e2 * c12)));
}

SolutionSample outer_eval(double t, double eps, const OuterOptions& opt) {
  const auto v = outer_validity(t, eps, opt);
  if (!v.valid)
    throw OutOfValidity("outer region: violated " + v.violated + " (margin " + std::to_string(v.margin) + ")");
  return {t, outer_sum(t, eps), Regime::OuterI, std::abs(outer_residual(t, eps))};
}

}  // namespace p2asym
