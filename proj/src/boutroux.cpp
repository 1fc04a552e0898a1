#include "p2asym/boutroux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/quadrature.hpp"

namespace p2asym {

struct LameTracks {
  double z1 = 0.0;
  ode::QuinticTrack p2;  // on [z1, Omega/2]
  double p2_mid = 0.0;
};

namespace {

using cd = std::complex<double>;

constexpr double kTol = 1e-13;
constexpr int kLaurentTerms = 24;
constexpr int kLameTerms = 24;

// Real root and upper complex root of lambda^3 + lambda/2 - g3n/4.
std::pair<double, cd> normalized_roots(double g3n) {
  const double p = 0.5, q = -g3n / 4.0;
  const double D = q * q / 4.0 + p * p * p / 27.0;
  const double e1 = std::cbrt(-q / 2.0 + std::sqrt(D)) + std::cbrt(-q / 2.0 - std::sqrt(D));
  return {e1, cd(-e1 / 2.0, std::sqrt(0.75 * e1 * e1 + p))};
}

// Largest real root of 4x^3 - g2 x - g3 (Newton-polished).
double real_branch_point(double g2, double g3) {
  const double p = -g2 / 4.0, q = -g3 / 4.0;
  const double D = q * q / 4.0 + p * p * p / 27.0;
  double x;
  if (D >= 0) {
    x = std::cbrt(-q / 2.0 + std::sqrt(D)) + std::cbrt(-q / 2.0 - std::sqrt(D));
  } else {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    x = r * std::cos(std::acos(3.0 * q / (p * r)) / 3.0);
  }
  for (int i = 0; i < 3; ++i) x -= (4 * x * x * x - g2 * x - g3) / (12 * x * x - g2);
  return x;
}

cd gauss_complex(const std::function<cd(double)>& f, double a, double b) {
  const double re = quad::composite_gauss([&](double x) { return f(x).real(); }, a, b, 32);
  const double im = quad::composite_gauss([&](double x) { return f(x).imag(); }, a, b, 32);
  return {re, im};
}

// Truncated Laurent series sum_{m} coef[m] z^m.
using Series = std::map<int, double>;

Series mul(const Series& a, const Series& b, int max_pow) {
  Series r;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b)
      if (i + j <= max_pow) r[i + j] += x * y;
  return r;
}

// Local Frobenius solution of p'' = 12 wp p with leading power e.
Series lame_series(const std::vector<double>& c, int e, int terms) {
  std::vector<double> f(static_cast<std::size_t>(terms), 0.0);
  f[0] = 1.0;
  for (int j = 1; j < terms; ++j) {
    double s = 0.0;
    for (int i = 1; i <= j && i < static_cast<int>(c.size()); ++i) s += c[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(j - i)];
    const double k = (e + 2.0 * j) * (e + 2.0 * j - 1.0) - 12.0;
    f[static_cast<std::size_t>(j)] = 12.0 * s / k;
  }
  Series out;
  for (int j = 0; j < terms; ++j) out[e + 2 * j] = f[static_cast<std::size_t>(j)];
  return out;
}

std::pair<double, double> series_eval(const Series& s, double z) {
  double y = 0.0, dy = 0.0;
  for (const auto& [m, a] : s) {
    y += a * std::pow(z, m);
    if (m != 0) dy += a * m * std::pow(z, m - 1);
  }
  return {y, dy};
}

LameTracks build_lame(const EllipticParams& P) {
  const auto& W = *P.wp;
  const double half = P.omega_real / 2.0;
  const double wpp_mid = 6 * P.e1 * P.e1 - P.g2 / 2.0;
  const double us = P.u_star;
  const double dp1_mid = -wpp_mid / us;
  LameTracks L;
  L.z1 = W.seed_radius();
  L.p2_mid = -1.0 / dp1_mid;
  auto rhs = [g2 = P.g2](const ode::State<4>& x, ode::State<4>& dx, double) {
    dx[0] = x[1];
    dx[1] = 6 * x[0] * x[0] - g2 / 2.0;
    dx[2] = x[3];
    dx[3] = 12 * x[0] * x[2];
  };
  // no max_dt here: odeint clamps it with a positive sign, which would reverse the direction
  ode::DenseSolver<4> s(rhs, kTol, kTol);
  s.initialize({P.e1, 0.0, L.p2_mid, 0.0}, half, -1e-3);
  std::vector<std::array<double, 4>> knots;  // (s, p2, p2', p2'')
  knots.push_back({half, L.p2_mid, 0.0, 12 * P.e1 * L.p2_mid});
  while (s.t() > L.z1) {
    s.step();
    const auto x = s.t() <= L.z1 ? s.at(L.z1) : s.x();
    const double t = std::max(s.t(), L.z1);
    knots.push_back({t, x[2], x[3], 12 * x[0] * x[2]});
  }
  std::reverse(knots.begin(), knots.end());
  for (const auto& k : knots) L.p2.push(k[0], k[1], k[2], k[3]);
  return L;
}

const LameTracks& lame_tracks(const EllipticParams& P) {
  if (!P.lame) throw FrameIncomplete("elliptic parameters not solved");
  return *P.lame;
}

}  // namespace

std::complex<double> boutroux_half_cycle(double g3n, int path) {
  const auto [e1, c] = normalized_roots(g3n);
  const cd cb = std::conj(c);
  if (path == 0) {
    const cd k = std::sqrt(c - e1) * std::sqrt(cd(e1) - c) * (c - e1);
    return gauss_complex(
        [&](double phi) {
          const double sn = std::sin(phi), cs = std::cos(phi);
          const double s = sn * sn;
          const cd lam = e1 + s * (c - e1);
          return 2.0 * s * cs * cs * k * std::sqrt(lam - cb);
        },
        0.0, std::numbers::pi / 2);
  }
  const double a = c.real(), b = c.imag();
  const cd horiz = gauss_complex(
      [&](double q) {
        const double lam = e1 + (a - e1) * q * q;
        return 2.0 * (a - e1) * q * q * std::sqrt(a - e1) * std::sqrt(cd(lam) - c) * std::sqrt(cd(lam) - cb);
      },
      0.0, 1.0);
  const cd vert = gauss_complex(
      [&](double r) {
        const cd lam(a, b * (1 - r * r));
        return cd(0, 2 * b) * r * r * std::sqrt(cd(0, -b)) * std::sqrt(lam - e1) * std::sqrt(lam - cb);
      },
      0.0, 1.0);
  return horiz + vert;
}

double real_period(double g2, double g3) {
  const double e1 = real_branch_point(g2, g3);
  auto f = [&](double v) {
    const double w = v / (1 - v);
    const double x = e1 + w * w;
    const double Q = 4 * x * x + 4 * e1 * x + 4 * e1 * e1 - g2;
    return 4.0 / ((1 - v) * (1 - v) * std::sqrt(Q));
  };
  return quad::adaptive(f, 0.0, 1.0, 1e-14);
}

EllipticParams solve_g3() {
  auto re = [](double g) { return boutroux_half_cycle(g, 0).real(); };
  double lo = -1.0, hi = 0.0;
  const double flo = re(lo), fhi = re(hi);
  if (flo * fhi > 0) throw BracketFailure("no sign change of the cycle integral on [-1, 0]");
  boost::uintmax_t it = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-15; };
  const auto r = boost::math::tools::toms748_solve(re, lo, hi, flo, fhi, tol, it);
  EllipticParams P;
  P.g3n = 0.5 * (r.first + r.second);
  P.u_star = u_star();
  const double au = std::abs(P.u_star);
  P.g2 = -2.0 * P.u_star * P.u_star;
  P.g3 = au * au * au * P.g3n;
  P.e1 = real_branch_point(P.g2, P.g3);
  P.omega_real = real_period(P.g2, P.g3);
  P.cycle_residual = std::abs(re(P.g3n));
  P.wp = std::make_shared<WeierstrassP>(P.g2, P.g3, P.omega_real);
  P.lame = std::make_shared<LameTracks>(build_lame(P));
  return P;
}

WeierstrassP::WeierstrassP(double g2, double g3, double omega) : g2_(g2), g3_(g3), omega_(omega) {
  c_.assign(kLaurentTerms, 0.0);
  c_[0] = 1.0;
  c_[2] = g2 / 20.0;
  c_[3] = g3 / 28.0;
  for (int k = 4; k < kLaurentTerms; ++k) {
    double s = 0.0;
    for (int m = 2; m <= k - 2; ++m) s += c_[static_cast<std::size_t>(m)] * c_[static_cast<std::size_t>(k - m)];
    c_[static_cast<std::size_t>(k)] = 3.0 * s / ((2.0 * k + 1.0) * (k - 3.0));
  }
  z0_ = std::min(0.25, 0.05 * omega);
  double y = 0.0, dy = 0.0;
  for (int j = 0; j < kLaurentTerms; ++j) {
    const int m = 2 * j - 2;
    y += c_[static_cast<std::size_t>(j)] * std::pow(z0_, m);
    if (m != 0) dy += c_[static_cast<std::size_t>(j)] * m * std::pow(z0_, m - 1);
  }
  auto rhs = [g2](const ode::State<2>& x, ode::State<2>& dx, double) {
    dx[0] = x[1];
    dx[1] = 6 * x[0] * x[0] - g2 / 2.0;
  };
  ode::DenseSolver<2> s(rhs, kTol, kTol, 0.02);
  s.initialize({y, dy}, z0_, 1e-4);
  p_.push(z0_, y, dy, 6 * y * y - g2 / 2.0);
  const double half = omega / 2.0;
  while (s.t() < half) {
    s.step();
    const double t = std::min(s.t(), half);
    const auto x = s.t() >= half ? s.at(half) : s.x();
    p_.push(t, x[0], x[1], 6 * x[0] * x[0] - g2 / 2.0);
  }
}

std::pair<double, double> WeierstrassP::eval(double s) const {
  double r = std::fmod(s, omega_);
  if (r < 0) r += omega_;
  double sign = 1.0;
  if (r > omega_ / 2) {
    r = omega_ - r;
    sign = -1.0;
  }
  if (r < 1e-6) throw NearPole("s within 1e-6 of a lattice point");
  if (r < z0_) {
    double y = 0.0, dy = 0.0;
    for (int j = 0; j < kLaurentTerms; ++j) {
      const int m = 2 * j - 2;
      y += c_[static_cast<std::size_t>(j)] * std::pow(r, m);
      if (m != 0) dy += c_[static_cast<std::size_t>(j)] * m * std::pow(r, m - 1);
    }
    return {y, sign * dy};
  }
  const auto [y, dy] = p_.eval(r);
  return {y, sign * dy};
}

std::pair<double, double> wp_eval(double s, const EllipticParams& params) {
  if (!params.wp) throw FrameIncomplete("elliptic parameters not solved");
  return params.wp->eval(s);
}

Rho0 rho0_eval(double s, const EllipticParams& P) {
  const auto [w, dw] = wp_eval(s, P);
  return {-w / P.u_star, -dw / P.u_star, -(6 * w * w - P.g2 / 2.0) / P.u_star};
}

LamePair lame_eval(double s, const EllipticParams& P) {
  const auto& L = lame_tracks(P);
  if (s < L.z1 || s > P.omega_real / 2) throw OutOfValidity("lame_eval needs s in [z1, Omega/2]");
  const auto [p2, dp2] = L.p2.eval(s);
  return {rho0_eval(s, P).drho, p2, dp2};
}

LameData lame_data(const EllipticParams& P) {
  const auto& L = lame_tracks(P);
  const auto& c = P.wp->laurent();
  const double us = P.u_star;
  const Series Fm3 = lame_series(c, -3, kLameTerms);
  const Series F4 = lame_series(c, 4, kLameTerms);
  // Near the lattice point Omega (z = s - Omega = -r): p2 = alpha F_{-3} + beta F4.
  const double r = L.z1;
  const auto [p2r, dp2r] = L.p2.eval(r);
  const double p2z = p2r, dp2z = -dp2r;  // p2(Omega - r) and d/dz there
  const auto [f4, df4] = series_eval(F4, -r);
  const auto [fm, dfm] = series_eval(Fm3, -r);
  LameData D;
  D.alpha = (f4 * dp2z - df4 * p2z) / (f4 * dfm - df4 * fm);
  const double beta = (fm * dp2z - dfm * p2z) / (fm * df4 - dfm * f4);
  D.C = D.alpha * us;

  // Series of (rho0 + 2 rho0^3) p_i for z -> 0+.
  const int max_pow = 2 * kLameTerms - 6;
  Series rho;
  for (std::size_t j = 0; j < c.size(); ++j) rho[2 * static_cast<int>(j) - 2] = -c[j] / us;
  Series g = rho;
  for (const auto& [m, a] : mul(mul(rho, rho, max_pow + 6), rho, max_pow + 3)) g[m] += 2 * a;
  Series p1s, p2s;
  for (const auto& [m, a] : Fm3) {
    p1s[m] = 2.0 / us * a;
    p2s[m] = -D.alpha * a;
  }
  for (const auto& [m, a] : F4) p2s[m] += beta * a;
  auto fp_half = [&](const Series& ps, int which) {
    const Series f = mul(g, ps, max_pow);
    std::vector<std::pair<int, double>> poles;
    Series reg;
    for (const auto& [m, a] : f) {
      if (m < 0)
        poles.emplace_back(m, a);
      else
        reg[m] = a;
    }
    const double near = quad::finite_part([&](double z) { return series_eval(reg, z).first; }, 0.0, r, 0.0, poles);
    const double far = quad::adaptive(
        [&](double s) {
          const auto rh = rho0_eval(s, P);
          const double pv = which == 1 ? rh.drho : L.p2.eval(s).first;
          return (rh.rho + 2 * rh.rho * rh.rho * rh.rho) * pv;
        },
        r, P.omega_real / 2, 1e-13);
    return near + far;
  };
  D.rp_p1_half = fp_half(p1s, 1);
  D.rp_p2_half = fp_half(p2s, 2);
  // rho0 is even about Omega/2, p1 odd and p2 even.
  D.rp_p1_full = 0.0;
  D.rp_p2_full = 2.0 * D.rp_p2_half;
  return D;
}

double chi_of_tau(double tau, double eps) { return std::pow(eps, 0.4) * (5.0 / 7.0) * std::pow(tau, 1.75); }

PhaseShiftTable sigma0_solve(double chi_max, double eps, const std::vector<PoleData>& poles, const EllipticParams& P,
                             const LameData& D, double sigma_initial) {
  if (!std::isfinite(D.rp_p2_full)) throw RegularizationFailure("regularized integral is not finite");
  PhaseShiftTable tab;
  double chi = 0.0, sigma = sigma_initial;
  auto push = [&](double c0, double c1, double slope, int k, bool fb) {
    tab.segments.push_back({c0, c1, sigma, slope, k, fb});
    if (std::isfinite(c1)) sigma += slope * (c1 - c0);
  };
  const double fallback = D.rp_p2_full;
  double slope = fallback;
  int k = 0;
  bool fb = true;
  for (const auto& p : poles) {
    const double ck = chi_of_tau(p.tau_k, eps);
    if (ck >= chi_max) break;
    push(chi, ck, slope, k, fb);
    chi = ck;
    k = p.k;
    fb = !std::isfinite(p.b1_plus);
    if (fb) {
      slope = fallback;
    } else {
      const double B = P.u_star * p.b1_plus / (14.0 * p.tau_k) - D.rp_p1_half;
      slope = D.C * B + D.rp_p2_full;
    }
  }
  push(chi, std::numeric_limits<double>::infinity(), slope, k, fb);
  return tab;
}

PhaseShiftState PhaseShiftTable::at(double chi) const {
  if (segments.empty()) throw FrameIncomplete("empty phase table");
  if (chi < 0) throw OutOfValidity("chi must be nonnegative");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (chi >= s.chi_begin && chi < s.chi_end)
      return {chi, s.sigma_begin + s.slope * (chi - s.chi_begin), s.slope, static_cast<int>(i)};
  }
  const auto& s = segments.back();
  return {chi, s.sigma_begin + s.slope * (chi - s.chi_begin), s.slope, static_cast<int>(segments.size() - 1)};
}

SolutionSample elliptic_leading_eval(double t, double eps, const EllipticParams& P, const PhaseShiftTable* phase,
                                     const EllipticEvalOptions& opt) {
  if (!(eps > 0)) throw OutOfValidity("elliptic regime needs eps > 0");
  const double tau = (t - t_star()) * std::pow(eps, -0.8);
  if (tau < opt.tau_min) throw OutOfValidity("violated tau >> 1");
  if (std::abs(t - t_star()) >= 1.0 / opt.M_outer) throw OutOfValidity("violated tau << eps^{-4/5}");
  const double sigma = 0.8 * std::pow(tau, 1.25);
  const double s = sigma + (phase ? phase->at(chi_of_tau(tau, eps)).sigma0 : 0.0);
  double r = std::fmod(s, P.omega_real);
  const double dist = std::min(r, P.omega_real - r);
  // distance in tau to the nearest profile pole is dist / tau^{1/4}
  if (std::pow(eps, -0.2) * dist / std::sqrt(tau) <= opt.M_pole)
    throw OutOfValidity("violated eps^{-1/5}|tau - tau_k| tau_k^{-1/4} >> 1");
  const auto rho = rho0_eval(s, P);
  const double u = P.u_star + std::pow(eps, 0.4) * std::sqrt(tau) * rho.rho;
  // dropped terms: eps^{2/5} sigma^{2/5} rho1 relative to rho0, plus the tau^{-1} drift terms
  const double res = std::pow(eps, 0.8) * tau + std::pow(eps, 0.4) / std::sqrt(tau);
  return {t, u, Regime::EllipticII_inf, res};
}

std::vector<double> lattice_offsets(const std::vector<PoleData>& poles, const EllipticParams& P) {
  std::vector<double> out;
  for (const auto& p : poles) {
    const double s = 0.8 * std::pow(p.tau_k, 1.25);
    out.push_back(std::fmod(s, P.omega_real) / P.omega_real);
  }
  return out;
}

double lattice_phase_shift(const std::vector<PoleData>& poles, const EllipticParams& P, int k_min) {
  double cs = 0.0, sn = 0.0;
  const auto off = lattice_offsets(poles, P);
  int used = 0;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (poles[i].k < k_min) continue;
    cs += std::cos(2 * std::numbers::pi * off[i]);
    sn += std::sin(2 * std::numbers::pi * off[i]);
    ++used;
  }
  if (used == 0) throw FrameIncomplete("no poles with k >= " + std::to_string(k_min));
  double mean = std::atan2(sn, cs) / (2 * std::numbers::pi);
  if (mean < 0) mean += 1.0;
  double shift = (1.0 - mean) * P.omega_real;
  return shift >= P.omega_real ? shift - P.omega_real : shift;
}

}  // namespace p2asym
