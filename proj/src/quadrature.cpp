#include "p2asym/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "p2asym/errors.hpp"

namespace p2asym::quad {

double adaptive(const Fn& f, double a, double b, double rel_tol, double* err, double abs_tol) {
  if (a == b) return 0.0;
  double e = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol, &e, &l1);
  if (!std::isfinite(v)) throw QuadratureFailure("non-finite integral on [" + std::to_string(a) + "," + std::to_string(b) + "]");
  if (e > 1e3 * std::max({rel_tol * l1, abs_tol, 1e-300}))
    throw QuadratureFailure("error estimate " + std::to_string(e) + " exceeds tolerance");
  if (err) *err = e;
  return v;
}

double composite_gauss(const Fn& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    s += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + h);
  }
  return s;
}

double finite_part(const Fn& regular, double a, double b, double z0,
                   const std::vector<std::pair<int, double>>& pole_terms) {
  if (z0 < a || z0 > b) throw RegularizationFailure("pole outside the integration interval");
  double s = 0.0;
  if (z0 > a) s += adaptive(regular, a, z0);
  if (z0 < b) s += adaptive(regular, z0, b);
  for (auto [m, c] : pole_terms) {
    if (m >= 0) throw RegularizationFailure("pole term with non-negative power");
    const double lb = b - z0, la = a - z0;
    if (m == -1) {
      const double fb = lb != 0.0 ? std::log(std::abs(lb)) : 0.0;
      const double fa = la != 0.0 ? std::log(std::abs(la)) : 0.0;
      s += c * (fb - fa);
    } else {
      const double fb = lb != 0.0 ? std::pow(lb, m + 1) / (m + 1) : 0.0;
      const double fa = la != 0.0 ? std::pow(la, m + 1) / (m + 1) : 0.0;
      s += c * (fb - fa);
    }
  }
  if (!std::isfinite(s)) throw RegularizationFailure("non-finite finite part");
  return s;
}

}  // namespace p2asym::quad
