#pragma once

#include <cmath>
#include <tuple>
#include <utility>
#include <vector>

#include "p2asym/ode.hpp"
#include "p2asym/sample.hpp"

namespace p2asym {

// First inner layer: v'' + 6 u* v^2 + u* tau = 0, with
// u = u* + eps^{2/5} v and t = t* + eps^{4/5} tau.

struct PoleData {
  int k = 0;
  double tau_k = NAN;
  double c_k = NAN;
  double a1_minus = NAN, b1_minus = NAN;
  double a1_plus = NAN, b1_plus = NAN;
  double fit_residual = NAN;
  // Two-sided diagnostics: Laurent data refitted after continuing the
  // solution around the pole along a half circle in the complex tau plane.
  double tau_k_right = NAN, c_k_right = NAN, fit_residual_right = NAN;
  // First-correction constants of the same continuation (no jump imposed).
  double a1_plus_arc = NAN, b1_plus_arc = NAN;
};

struct InnerScale {
  double eps;
  double t_of_tau(double tau) const;
  double tau_of_t(double t) const;
  double u_of_v(double v) const;
  double v_of_u(double u) const;
};

struct P1Options {
  double tol = 1e-11;
  double v_max = 1e6;
  int max_poles = 8;
  double w_coeff = 0.2;  // pole window half-width w = w_coeff |tau_k|^{-1/5}
  // v1 projection annulus 2w' < |tau - tau_k| < 4w', w' = proj_coeff |tau_k|^{-1/5};
  // at w' = w the x^4 mode sits below the integration noise of the x^-4 part
  double proj_coeff = 0.2;
  int laurent_terms = 40;
  double fit_inner = 0.04;  // fit samples with fit_inner <= |x| <= fit_outer
  double fit_outer = 0.5;
  double fit_threshold = 1e-6;
  bool two_sided = true;  // refit each pole after a complex half-circle detour
  double arc_radius = 0.4;
  bool enforce_jump = false;  // restart v1 with b+ = b- + Delta_k instead of b+ = b-
};

struct PoleFitSample {
  double tau, v;
};

struct PoleFit {
  double tau_k, c_k, residual;
  double a4 = NAN;  // only for the free-coefficient refit
};

// Jump of the x^4 coefficient of v1 across pole k: -22 u*^3 tau_k^2 / 75.
double jump_delta(double tau_k);

double w_pole(double tau_k, const P1Options& opt = {});

std::pair<double, double> p1_seed(double tau0);
std::pair<double, double> v1_seed(double tau0);

// Least-squares fit of (tau_k, c_k). model_terms == 5 uses exactly the
// terms x^{-2}, x^2, x^3, x^4 with fixed x^2, x^3 coefficients; larger
// values use that many terms of the full local recursion.
PoleFit locate_pole(const std::vector<PoleFitSample>& samples, int model_terms = 5);

// Same fit with the x^2 coefficient released as a third unknown.
PoleFit locate_pole_free_a4(const std::vector<PoleFitSample>& samples, int model_terms = 40);

class P1Trajectory {
 public:
  double seed_tau = 0.0;
  double tau_end = 0.0;
  std::vector<PoleData> poles;
  P1Options options;
  bool has_v1 = false;

  // Knots of v0 between pole windows (tau, v, v').
  struct Segment {
    ode::QuinticTrack v0;
    ode::QuinticTrack v1;
  };
  std::vector<Segment> segments;

  // v0, v0' anywhere in [seed_tau, tau_end]; Laurent series inside windows.
  std::pair<double, double> v0(double tau) const;
  std::pair<double, double> v1(double tau) const;
  // Distance to the nearest recorded pole.
  double pole_distance(double tau) const;
  std::vector<std::tuple<double, double, double>> samples() const;

 private:
  const Segment* segment_for(double tau) const;
};

P1Trajectory integrate_p1(double tau0, double tau1, const P1Options& opt = {});

// Integrates the first correction alongside v0, projects onto the local
// basis at every pole and restarts after it.
void first_correction(P1Trajectory& traj);

struct InnerOptions {
  double M_pole = 5.0;   // eps^{-1/5} |tau - tau_k| > M_pole
  double M_outer = 5.0;  // |t - t*| < 1 / M_outer stands for |tau| << eps^{-4/5}
};

SolutionSample inner1_eval(double t, double eps, const P1Trajectory& traj, const InnerOptions& opt = {});

// Continues (v, v') from tau_k - R to tau_k + R along the upper half circle.
std::pair<double, double> continue_around_pole(double tau_k, double R, double v, double dv, double tol);

}  // namespace p2asym
