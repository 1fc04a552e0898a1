#pragma once

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "p2asym/ode.hpp"
#include "p2asym/p1_layer.hpp"
#include "p2asym/sample.hpp"

namespace p2asym {

// Elliptic regime tau -> +infinity of the first inner layer:
//   v0 ~ sqrt(tau) rho0(s),  rho0 = -wp(s; g2, g3) / u*,  s = (4/5) tau^{5/4} + sigma0(chi).
// The curve omega^2 = lambda^3 + lambda/2 - g3n/4 is the normalized form
// (g2 = -2); physical invariants are g2 = -2u*^2, g3 = |u*|^3 g3n and
// wp(s; g2, g3) = |u*| wp(|u*|^{1/2} s; -2, g3n).

// Integral of omega from the real branch point e1 to the upper complex
// branch point of the normalized curve. path = 0: straight segment;
// path = 1: along the real axis to Re(c), then vertically.
std::complex<double> boutroux_half_cycle(double g3n, int path = 0);

class WeierstrassP;
struct LameTracks;

struct EllipticParams {
  double g2 = 0.0;
  double g3 = 0.0;
  double omega_real = 0.0;  // real period
  double u_star = 0.0;
  double g3n = 0.0;        // normalized invariant
  double e1 = 0.0;         // real root of 4x^3 - g2 x - g3 (value of wp at omega/2)
  double cycle_residual = 0.0;  // |Re half cycle| at the solved g3n
  std::shared_ptr<const WeierstrassP> wp;
  std::shared_ptr<const LameTracks> lame;  // second Lame solution on [z1, Omega/2]
};

EllipticParams solve_g3();

// Dense representation of wp on the real axis for real invariants with a
// single real branch point: Laurent series near lattice points, integrated
// ODE wp'' = 6 wp^2 - g2/2 in between.
class WeierstrassP {
 public:
  WeierstrassP(double g2, double g3, double omega);
  // (wp, wp') at s; throws NearPole within 1e-6 of a lattice point.
  std::pair<double, double> eval(double s) const;
  // Laurent coefficients: wp = z^{-2} + sum_{j>=1} c[j] z^{2j-2} (c[0] = 1).
  const std::vector<double>& laurent() const { return c_; }
  double omega() const { return omega_; }
  double g2() const { return g2_; }
  double g3() const { return g3_; }
  double seed_radius() const { return z0_; }

 private:
  double g2_, g3_, omega_, z0_;
  std::vector<double> c_;
  ode::QuinticTrack p_;
};

// Real period 2 int_{e1}^inf dx / sqrt(4x^3 - g2 x - g3).
double real_period(double g2, double g3);

std::pair<double, double> wp_eval(double s, const EllipticParams& params);

// rho0 = -wp/u* and its first two derivatives.
struct Rho0 {
  double rho, drho, ddrho;
};
Rho0 rho0_eval(double s, const EllipticParams& params);

// Lame solutions p1 = rho0' and p2 (p2 even about omega/2, W(p1, p2) = 1),
// the constant C in p2(s + Omega) = C p1(s) + p2(s), and the regularized
// integrals entering the phase-shift law.
struct LameData {
  double C = 0.0;
  double alpha = 0.0;     // odd-part coefficient of p2 at the lattice point Omega
  double rp_p1_full = 0.0;  // R.P. int_0^Omega (rho0 + 2 rho0^3) p1
  double rp_p2_full = 0.0;  // R.P. int_0^Omega (rho0 + 2 rho0^3) p2
  double rp_p1_half = 0.0;  // R.P. int_0^{Omega/2} (rho0 + 2 rho0^3) p1
  double rp_p2_half = 0.0;  // R.P. int_0^{Omega/2} (rho0 + 2 rho0^3) p2
};
LameData lame_data(const EllipticParams& params);

// (p1, p2, p2') at s in (0, Omega/2].
struct LamePair {
  double p1, p2, dp2;
};
LamePair lame_eval(double s, const EllipticParams& params);

struct PhaseSegment {
  double chi_begin, chi_end;  // chi_end = +inf for the last one
  double sigma_begin;         // sigma0 at chi_begin
  double slope;
  int pole_index;             // 0 for the segment before the first pole
  bool fallback;              // slope from the regularized integral alone
};

struct PhaseShiftState {
  double chi, sigma0, sigma0_prime;
  int segment;
};

class PhaseShiftTable {
 public:
  std::vector<PhaseSegment> segments;
  PhaseShiftState at(double chi) const;
};

// chi_k = eps^{2/5} (5/7) tau_k^{7/4}.
double chi_of_tau(double tau, double eps);

// sigma_initial is sigma0 at chi = 0, the free constant of the phase law.
PhaseShiftTable sigma0_solve(double chi_max, double eps, const std::vector<PoleData>& poles,
                             const EllipticParams& params, const LameData& lame, double sigma_initial = 0.0);

struct EllipticEvalOptions {
  double M_pole = 5.0;
  double M_outer = 5.0;
  double tau_min = 1.0;
};

SolutionSample elliptic_leading_eval(double t, double eps, const EllipticParams& params,
                                     const PhaseShiftTable* phase = nullptr, const EllipticEvalOptions& opt = {});

// Lattice offset (s(tau_k) mod Omega) / Omega in [0, 1) for each pole, with sigma0 = 0.
std::vector<double> lattice_offsets(const std::vector<PoleData>& poles, const EllipticParams& params);

// Shift sigma in [0, Omega) placing the poles k >= k_min on lattice points
// (circular mean of the offsets).
double lattice_phase_shift(const std::vector<PoleData>& poles, const EllipticParams& params, int k_min = 5);

}  // namespace p2asym
