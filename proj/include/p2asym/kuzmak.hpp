#pragma once

#include <cmath>
#include <vector>

#include "p2asym/sample.hpp"

namespace p2asym {

// Fast oscillating regime t > t*: u ~ U0(t1, t), t1 = S(t)/eps + phi(t), with
//   (S')^2 (dU0/dt1)^2 = -U0^4 - t U0^2 + 2 U0 + E(t) =: F(U0).

struct DegenerationConstants {
  double k = NAN;
  double C_star = NAN;  // int_0^inf dy / sqrt(y((y-k)^2 + 1))
  double T = NAN;       // period constant fixing S'(t) ~ (t - t*)^{1/4}
  double mu1 = NAN, nu1 = NAN, gamma1 = NAN;
};

double c_of_k(double k, int panels_scale = 1);
// C*(k) with (y - k) (sign = -1) or (y + k) (sign = +1) in the integrand.
double C_star_of_k(double k, int sign = -1);
DegenerationConstants solve_k();

struct QuarticRoots {
  double alpha, beta, m, n;  // alpha > beta real, m +- i n complex pair, n >= 0
};

// Roots of -x^4 - t x^2 + 2x + E via companion-matrix eigenvalues, Newton-polished.
QuarticRoots quartic_factor(double t, double E);

// I0 = 2 int_beta^alpha sqrt(F) dx.
double action_I0(double t, double E);
// J = int_beta^alpha dx / sqrt(F) (= dI0/dE).
double period_J(double t, double E);
// I0 at (t*, E*) from the Beta function: 2 L^3 B(5/2, 3/2), L = alpha - beta.
double action_I0_degenerate_closed_form();

struct ModulationState {
  double t = NAN, E = NAN, alpha = NAN, beta = NAN, m = NAN, n = NAN;
  double S_prime = NAN, S = NAN, phi = NAN;
};

// E with I0(t, E) = 2 pi by safeguarded Newton from E_guess.
ModulationState solve_E(double t, double E_guess);

// Closed-form first guess E* + gamma1 (t - t*).
double E_guess_near_degeneration(double t);

double S_prime_of(const ModulationState& s, const DegenerationConstants& c);

struct KuzmakOptions {
  double phase_a = 0.0;  // free constant a of the phase law
  double phi0 = 0.0;     // phi(t*)
  double M_kuz = 5.0;    // (t - t*) eps^{-2/3} > M_kuz
  double a_max = 1.0;    // t <= t* + a_max
  int panels = 160;      // nodes of the S(t) table in w = (t - t*)^{1/4}
};

// S, S', phi, E on a grid; S(t*) = 0.
class KuzmakTable {
 public:
  DegenerationConstants constants;
  KuzmakOptions options;
  std::vector<double> w;  // (t - t*)^{1/4}
  std::vector<ModulationState> states;

  // State at any t in (t*, t* + a_max]; E, roots and S' are solved exactly,
  // S and phi interpolated (cubic Hermite in w).
  ModulationState at(double t) const;
};

KuzmakTable solve_phase(const DegenerationConstants& c, const KuzmakOptions& opt = {});

// States on an arbitrary ascending grid in (t*, ...], with S by quadrature from t*.
std::vector<ModulationState> solve_phase(const std::vector<double>& t_grid, const DegenerationConstants& c,
                                         const KuzmakOptions& opt = {});

// Oscillation period in t1: 2 S' J.
double t1_period(const ModulationState& s);

// U0 with U0 = beta at t1 = 0 and U0 = alpha at half period.
double leading_U0(double t1, const ModulationState& s);

SolutionSample kuzmak_eval(double t, double eps, const KuzmakTable& table);

}  // namespace p2asym
