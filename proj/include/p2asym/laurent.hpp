#pragma once

#include <vector>

namespace p2asym::laurent {

// Local series of v'' + 6 u* v^2 + u* tau = 0 at a double pole tau_k:
//   v = sum_j a_j x^{j-2},  x = tau - tau_k,
// with a_0 = -1/u*, a_4 = tau_k u*/10, a_5 = u*/6 and a_6 = c_k free.
// If a4_override is given it replaces the recursion value of a_4
// (used to test that the data selects the recursion value).
std::vector<double> p1_coeffs(double us, double tau_k, double c_k, int n, const double* a4_override = nullptr);

// Local series of the linearized first-correction equation
//   v1'' + 12 u* v0 v1 = -tau v0 - 2 v0^3      (forced = true)
//   v1'' + 12 u* v0 v1 = 0                      (forced = false)
// as v1 = sum_j d_j x^{j-4}. Indices 1 and 8 are resonant and take the
// free values d1, d8. The defects record the solvability residual at the
// resonances (zero means no logarithmic terms are needed).
struct V1Series {
  std::vector<double> d;
  double defect1 = 0.0;
  double defect8 = 0.0;
};
V1Series v1_coeffs(double us, double tau_k, const std::vector<double>& a, bool forced, double d1, double d8, int n);

struct Value {
  double y;
  double dy;
};

// Evaluates sum_j c_j x^{j - shift} and its derivative.
Value eval(const std::vector<double>& c, int shift, double x);

}  // namespace p2asym::laurent
