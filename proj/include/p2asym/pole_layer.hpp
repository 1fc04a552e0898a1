#pragma once

#include <cmath>

#include "p2asym/p1_layer.hpp"
#include "p2asym/sample.hpp"

namespace p2asym {

// Second inner layer around pole k: theta = (tau - tau_k) eps^{-1/5},
// theta_k = theta + eps^{1/5} theta1 + eps^{3/5} theta2, and
// u = u* + w0(theta_k) + eps^{4/5} w1 + eps w2 + eps^{6/5} w3 + O(eps^{8/5}).

struct PoleLayerFrame {
  int k = 0;
  double tau_k = NAN;
  double theta_shift1 = NAN;  // u* a1_k^- / 2
  double theta_shift2 = 0.0;  // u* a2_k^- / 2; a2 is not computed
  double c_k = NAN;
  double b1_minus = NAN;
};

PoleLayerFrame make_frame(const PoleData& p);

// w0 = -16 u* / (4 + 16 u*^2 theta^2) and its derivative.
double w0_eval(double theta);
double w0_prime(double theta);

// Homogeneous pair of w'' + (12 u* w0 + 6 w0^2) w = 0.
// hom1 = 8 theta / (1 + 4u*^2 theta^2)^2 (odd), hom2 even with hom2 ~ theta^4.
double hom1(double theta);
double hom2(double theta);
double hom1_prime(double theta);
double hom2_prime(double theta);
double hom_wronskian();  // hom1 hom2' - hom1' hom2

// Corrections w^n, n = 1..4, evaluated at theta_k.
double correction_w(int n, double theta, const PoleLayerFrame& frame);

// Coefficient of theta^4 in the far field of w^4 on one side (side = +1 or -1),
// extracted by a least-squares fit in even powers on 15 <= |theta| <= 60.
double w4_theta4_coeff(const PoleLayerFrame& frame, int side);

struct PoleLayerOptions {
  double M2 = 2.0;       // |theta tau_k^{1/5}| < M2 eps^{-1/5}
  double M_outer = 5.0;  // |t - t*| < 1 / M_outer stands for |tau_k| << eps^{-4/5}
};

SolutionSample inner2_eval(double t, double eps, const PoleLayerFrame& frame, const PoleLayerOptions& opt = {});

}  // namespace p2asym
