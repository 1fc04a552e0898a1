#pragma once

#include <string>

#include "p2asym/sample.hpp"

namespace p2asym {

// Coefficients of u = u0 + eps^2 u1c + eps^4 u2c on the least branch.
struct OuterTerms {
  double t;
  double u0;
  double u1c;
  double u2c;
  double denom;  // 6 u0^2 + t
  double u0_dd;  // second derivatives, exact through Taylor jets
  double u1c_dd;
  double u2c_dd;
};

OuterTerms outer_terms(double t);

struct OuterOptions {
  double M_outer = 5.0;  // margin on (t_star - t) eps^{-4/5}
  double a = 1.0;        // left end of the region: t >= t_star - a
};

struct Validity {
  bool valid;
  double margin;
  std::string violated;  // empty when valid
};

Validity outer_validity(double t, double eps, const OuterOptions& opt = {});

// Truncated sum without any validity check.
double outer_sum(double t, double eps);

// Defect of the three-term sum in eps^2 u'' + 2u^3 + t u - 1, assembled
// order by order so no cancellation of the O(1) parts occurs.
double outer_residual(double t, double eps);

SolutionSample outer_eval(double t, double eps, const OuterOptions& opt = {});

}  // namespace p2asym
