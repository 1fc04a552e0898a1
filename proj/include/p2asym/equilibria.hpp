#pragma once

#include <vector>

namespace p2asym {

struct CriticalData {
  double t_star;
  double u_star;
  double E_star;      // energy of the triple-root quartic at t_star
  double alpha_star;  // opposite quartic root, -3 u_star
};

// Closed-form constants of the saddle-center point of 2u^3 + t u = 1.
CriticalData critical_point();

// Shorthands for the two constants used everywhere.
double t_star();
double u_star();

struct EquilibriumSet {
  double t;
  std::vector<double> roots;  // ascending
  double discriminant;        // (t/6)^3 + 1/16
};

double discriminant(double t);

// Real roots of 2u^3 + t u - 1 = 0 (trigonometric / Cardano form with one
// Newton polish per simple root). At t = t_star the double root is
// reported twice.
EquilibriumSet equilibrium_roots(double t);

// Least real root: the stable slow branch u_1(t) for t <= t_star.
double least_root(double t);

enum class Stability { Stable, Unstable, Degenerate };

// Classification of root j (1-based, ascending) by the sign of 6u^2 + t.
Stability classify_branch(double t, int j);

inline constexpr double kDegenerateThreshold = 1e-9;

}  // namespace p2asym
