#include "p2asym/laurent.hpp"

#include <cmath>

namespace p2asym::laurent {

std::vector<double> p1_coeffs(double us, double tau_k, double c_k, int n, const double* a4_override) {
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);
  a[0] = -1.0 / us;
  for (int j = 1; j < n; ++j) {
    if (j == 6) {
      a[6] = c_k;
      continue;
    }
    if (j == 4 && a4_override) {
      a[4] = *a4_override;
      continue;
    }
    double s = 0.0;
    for (int i = 1; i < j; ++i) s += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j - i)];
    double r = -6.0 * us * s;
    if (j == 4) r -= us * tau_k;
    if (j == 5) r -= us;
    a[static_cast<std::size_t>(j)] = r / static_cast<double>((j - 6) * (j + 1));
  }
  return a;
}

V1Series v1_coeffs(double us, double tau_k, const std::vector<double>& a, bool forced, double d1, double d8, int n) {
  V1Series out;
  auto& d = out.d;
  d.assign(static_cast<std::size_t>(n), 0.0);
  auto A = [&](int i) { return (i >= 0 && i < static_cast<int>(a.size())) ? a[static_cast<std::size_t>(i)] : 0.0; };
  // cube convolution of a
  std::vector<double> a2(static_cast<std::size_t>(n), 0.0), a3(static_cast<std::size_t>(n), 0.0);
  if (forced) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) a2[static_cast<std::size_t>(j)] += A(i) * A(j - i);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) a3[static_cast<std::size_t>(j)] += A(i) * a2[static_cast<std::size_t>(j - i)];
  }
  for (int j = 0; j < n; ++j) {
    double r = 0.0;
    for (int i = 1; i <= j; ++i) r -= 12.0 * us * A(i) * d[static_cast<std::size_t>(j - i)];
    if (forced) r += -tau_k * A(j - 4) - A(j - 5) - 2.0 * a3[static_cast<std::size_t>(j)];
    const int k = (j - 1) * (j - 8);
    if (j == 1) {
      out.defect1 = r;
      d[1] = d1;
    } else if (j == 8) {
      out.defect8 = r;
      d[8] = d8;
    } else {
      d[static_cast<std::size_t>(j)] = r / static_cast<double>(k);
    }
  }
  return out;
}

Value eval(const std::vector<double>& c, int shift, double x) {
  double y = 0.0, dy = 0.0;
  // Horner in x on the regular part, then divide by x^shift
  const int n = static_cast<int>(c.size());
  double p = 0.0, dp = 0.0;
  for (int j = n - 1; j >= 0; --j) {
    dp = dp * x + p;
    p = p * x + c[static_cast<std::size_t>(j)];
  }
  const double xs = std::pow(x, -shift);
  y = p * xs;
  dy = dp * xs - shift * p * xs / x;
  return {y, dy};
}

}  // namespace p2asym::laurent
