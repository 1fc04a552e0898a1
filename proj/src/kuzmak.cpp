#include "p2asym/kuzmak.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/quadrature.hpp"

namespace p2asym {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double root_bracket(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) throw BracketFailure("no sign change on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  boost::uintmax_t it = 300;
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, [tol](double l, double h) { return std::abs(h - l) <= tol; }, it);
  return 0.5 * (r.first + r.second);
}

// Gauss-Legendre 3-point nodes on [-1, 1].
constexpr double kG3x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kG3w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Pieces of J on both sides of the midpoint of [beta, alpha].
struct JParts {
  double left, right;
};

double left_integrand(double y, const QuarticRoots& r) {
  const double x = r.beta + r.n * y * y;
  const double kap = (r.m - r.beta) / r.n;
  const double q = y * y - kap;
  return 2.0 / (std::sqrt(r.n) * std::sqrt(r.alpha - x) * std::sqrt(q * q + 1.0));
}

double right_integrand(double s, const QuarticRoots& r) {
  const double x = r.alpha - s * s;
  return 2.0 / std::sqrt((x - r.beta) * ((x - r.m) * (x - r.m) + r.n * r.n));
}

// Fixed Gauss rule on [a, b] split at the ascending interior points `cuts`.
double piecewise(const quad::Fn& f, double a, double b, const std::vector<double>& cuts, int panels) {
  double v = 0.0, lo = a;
  for (double c : cuts) {
    if (c <= lo || c >= b) continue;
    v += quad::composite_gauss(f, lo, c, panels);
    lo = c;
  }
  return v + quad::composite_gauss(f, lo, b, panels);
}

// int_beta^{beta + n Y^2} dx / sqrt(F); the integrand varies on scale 1 near
// sqrt(kappa) and decays like y^-2 beyond, so the cuts double outward.
double left_integral(double Y, const QuarticRoots& r) {
  const double kap = (r.m - r.beta) / r.n;
  std::vector<double> cuts;
  const double y0 = std::sqrt(std::max(kap, 0.0));
  for (double d = -2.0; d <= 2.0; d += 0.5)
    if (y0 + d > 0) cuts.push_back(y0 + d);
  for (double y = y0 + 4.0; y < Y; y *= 2.0) cuts.push_back(y);
  return piecewise([&](double y) { return left_integrand(y, r); }, 0.0, Y, cuts, 2);
}

double right_integral(double S, const QuarticRoots& r) {
  return quad::composite_gauss([&](double s) { return right_integrand(s, r); }, 0.0, S, 4);
}

JParts j_parts(const QuarticRoots& r) {
  if (!(r.n > 0)) throw QuadratureFailure("period integral diverges at n = 0");
  const double xc = 0.5 * (r.alpha + r.beta);
  return {left_integral(std::sqrt((xc - r.beta) / r.n), r), right_integral(std::sqrt(r.alpha - xc), r)};
}

}  // namespace

double c_of_k(double k, int panels_scale) {
  if (!(k > 0 && k < 1)) throw OutOfValidity("c(k) needs k in (0, 1)");
  // y = s^2 on [0, 10]; y = 1/v^2 on the tail
  auto f = [k](double y) {
    const double d = (y - k) * (y - k) + 1.0;
    return (-k * y + k * k + 1.0) * std::pow(y, 2.5) / std::pow(d, 2.5);
  };
  const double head = quad::composite_gauss([&](double s) { return f(s * s) * 2.0 * s; }, 0.0, std::sqrt(10.0),
                                            16 * panels_scale);
  const double tail = quad::composite_gauss(
      [&](double v) {
        if (v == 0.0) return 0.0;
        const double y = 1.0 / (v * v);
        return f(y) * 2.0 / (v * v * v);
      },
      0.0, 1.0 / std::sqrt(10.0), 16 * panels_scale);
  return -1.6 * (head + tail);
}

double C_star_of_k(double k, int sign) {
  const double sk = sign * k;
  // y = s^2, then s = 1/v beyond s = 4
  const double head = quad::composite_gauss(
      [&](double s) {
        const double q = s * s + sk;
        return 2.0 / std::sqrt(q * q + 1.0);
      },
      0.0, 4.0, 32);
  const double tail = quad::composite_gauss(
      [&](double v) {
        const double q = 1.0 + sk * v * v;
        return 2.0 / std::sqrt(q * q + std::pow(v, 4));
      },
      0.0, 0.25, 16);
  return head + tail;
}

DegenerationConstants solve_k() {
  DegenerationConstants c;
  c.k = root_bracket([](double k) { return c_of_k(k); }, 0.3, 0.6, 1e-15);
  c.C_star = C_star_of_k(c.k, -1);
  const double us = u_star();
  c.T = std::sqrt(2.0) * c.C_star / (2.0 * std::sqrt(std::abs(us))) * std::pow(3.0 / (6.0 - 2.0 * c.k * c.k), -0.25);
  c.nu1 = std::sqrt(3.0 / (2.0 * (3.0 - c.k * c.k)));
  c.mu1 = c.k / 3.0 * c.nu1;
  c.gamma1 = us * us;
  return c;
}

QuarticRoots quartic_factor(double t, double E) {
  if (t < t_star() - 1e-12) throw RootStructureError("quartic_factor needs t >= t*");
  // x^4 + t x^2 - 2x - E = 0
  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  comp(0, 3) = E;
  comp(1, 3) = 2.0;
  comp(2, 3) = -t;
  comp(3, 3) = 0.0;
  const Eigen::Vector4cd ev = Eigen::EigenSolver<Eigen::Matrix4d>(comp, false).eigenvalues();
  double alpha = -1e300;
  for (int i = 0; i < 4; ++i)
    if (std::abs(ev[i].imag()) < 1e-6 * std::max(1.0, std::abs(ev[i]))) alpha = std::max(alpha, ev[i].real());
  if (alpha < -1e299) throw RootStructureError("no real root");
  auto p = [&](double x) { return x * x * x * x + t * x * x - 2 * x - E; };
  auto dp = [&](double x) { return 4 * x * x * x + 2 * t * x - 2; };
  for (int i = 0; i < 4; ++i) alpha -= p(alpha) / dp(alpha);
  // deflate: x^3 + alpha x^2 + (alpha^2 + t) x + (alpha^3 + alpha t - 2)
  const double b2 = alpha, b1 = alpha * alpha + t, b0 = alpha * alpha * alpha + alpha * t - 2.0;
  const double sh = b2 / 3.0;
  const double P = b1 - b2 * b2 / 3.0;
  const double Q = 2.0 * b2 * b2 * b2 / 27.0 - b2 * b1 / 3.0 + b0;
  const double D = Q * Q / 4.0 + P * P * P / 27.0;
  const double scale = std::max({std::abs(Q * Q / 4.0), std::abs(P * P * P / 27.0), 1e-300});
  if (D < -1e-12 * scale) throw RootStructureError("four real roots at t=" + std::to_string(t));
  const double sd = std::sqrt(std::max(D, 0.0));
  double beta = std::cbrt(-Q / 2.0 + sd) + std::cbrt(-Q / 2.0 - sd) - sh;
  auto q3 = [&](double x) { return ((x + b2) * x + b1) * x + b0; };
  auto dq3 = [&](double x) { return (3 * x + 2 * b2) * x + b1; };
  for (int i = 0; i < 3; ++i) {
    const double d = dq3(beta);
    if (d == 0.0) break;
    const double nb = beta - q3(beta) / d;
    if (std::abs(q3(nb)) >= std::abs(q3(beta))) break;
    beta = nb;
  }
  if (beta > alpha) throw RootStructureError("real roots out of order");
  const double m = -(alpha + beta) / 2.0;
  const double mn = -b0 / beta;  // m^2 + n^2
  double n2 = mn - m * m;
  if (n2 < 0) {
    if (n2 < -1e-10) throw RootStructureError("complex pair collapsed to real roots");
    n2 = 0.0;
  }
  return {alpha, beta, m, std::sqrt(n2)};
}

double action_I0(double t, double E) {
  const auto r = quartic_factor(t, E);
  const double L = r.alpha - r.beta;
  auto f = [&](double phi) {
    const double sn = std::sin(phi), cs = std::cos(phi);
    const double x = r.beta + L * sn * sn;
    return 4.0 * L * L * sn * sn * cs * cs * std::sqrt((x - r.m) * (x - r.m) + r.n * r.n);
  };
  // near-kink of width n at x = m: cuts at m +- n 4^j, mapped to phi
  std::vector<double> xs{r.m};
  for (double d = std::max(r.n, 1e-300); d < L; d *= 4.0) {
    xs.push_back(r.m - d);
    xs.push_back(r.m + d);
  }
  for (int j = 1; j < 16; ++j) xs.push_back(r.beta + L * j / 16.0);
  std::vector<double> cuts;
  for (double x : xs)
    if (x > r.beta && x < r.alpha) cuts.push_back(std::asin(std::sqrt((x - r.beta) / L)));
  std::sort(cuts.begin(), cuts.end());
  return piecewise(f, 0.0, std::numbers::pi / 2, cuts, 1);
}

double period_J(double t, double E) {
  const auto p = j_parts(quartic_factor(t, E));
  return p.left + p.right;
}

double action_I0_degenerate_closed_form() {
  const double L = -4.0 * u_star();
  return 2.0 * L * L * L * boost::math::beta(2.5, 1.5);
}

double E_guess_near_degeneration(double t) {
  const double us = u_star();
  return critical_point().E_star + us * us * (t - t_star());
}

ModulationState solve_E(double t, double E_guess) {
  if (!(t > t_star())) throw OutOfValidity("solve_E needs t > t*");
  double E = E_guess;
  double res = action_I0(t, E) - kTwoPi;
  for (int it = 0; it < 60; ++it) {
    const double J = period_J(t, E);
    double step = -res / J;
    double En = E + step, rn = NAN;
    for (int h = 0; h < 30; ++h) {
      try {
        rn = action_I0(t, En) - kTwoPi;
        if (std::abs(rn) < std::abs(res) || std::abs(rn) < 1e-13) break;
      } catch (const RootStructureError&) {
      }
      step /= 2;
      En = E + step;
      rn = NAN;
    }
    // below ~1e-10 the residual is quadrature noise; the last iterate stands
    const bool stalled = !std::isfinite(rn);
    if (stalled && std::abs(res) > 1e-10) throw BracketFailure("Newton safeguard failed at t=" + std::to_string(t));
    if (!stalled) {
      E = En;
      res = rn;
    }
    if (stalled || std::abs(step) < 1e-15 * std::max(1.0, std::abs(E)) || std::abs(res) < 1e-13) {
      const auto r = quartic_factor(t, E);
      ModulationState s;
      s.t = t;
      s.E = E;
      s.alpha = r.alpha;
      s.beta = r.beta;
      s.m = r.m;
      s.n = r.n;
      return s;
    }
  }
  throw BracketFailure("E iteration did not converge at t=" + std::to_string(t));
}

double S_prime_of(const ModulationState& s, const DegenerationConstants& c) {
  return c.T / (std::sqrt(2.0) * period_J(s.t, s.E));
}

namespace {

double phi_rate(const ModulationState& s, const DegenerationConstants& c, double a) {
  if (a == 0.0) return 0.0;
  const double h = 1e-6 * std::max(1e-3, std::abs(s.E));
  const double Jp = period_J(s.t, s.E + h), Jm = period_J(s.t, s.E - h);
  const double J = period_J(s.t, s.E);
  const double dSp = -c.T / std::sqrt(2.0) * (Jp - Jm) / (2 * h) / (J * J);
  return a * dSp / J;  // phi' = a dS'/dE / dI0/dE, dI0/dE = J
}

ModulationState degenerate_state(const KuzmakOptions& opt) {
  const auto cp = critical_point();
  ModulationState s;
  s.t = cp.t_star;
  s.E = cp.E_star;
  s.alpha = cp.alpha_star;
  s.beta = s.m = cp.u_star;
  s.n = 0.0;
  s.S_prime = 0.0;
  s.S = 0.0;
  s.phi = opt.phi0;
  return s;
}

constexpr double kW_floor = 0.01;  // (t - t*) = 1e-8

// Advances (S, phi) from w_a to w_b with 3-point Gauss on panels of width <= hmax.
void advance(double wa, double wb, double& E_guess, double& S, double& phi, const DegenerationConstants& c,
             const KuzmakOptions& opt) {
  const double ts = t_star();
  const int m = std::max(1, static_cast<int>(std::ceil((wb - wa) / 0.005)));
  const double h = (wb - wa) / m;
  for (int p = 0; p < m; ++p) {
    const double a = wa + p * h;
    for (int g = 0; g < 3; ++g) {
      const double w = a + 0.5 * h * (1.0 + kG3x[g]);
      const double t = ts + std::pow(w, 4);
      const double jac = 4 * w * w * w;
      if (w < kW_floor) {
        // roots of the near-triple quartic are noise-limited here; S' ~ (t - t*)^{1/4}
        S += 0.5 * h * kG3w[g] * jac * w;
        continue;
      }
      const auto st = solve_E(t, E_guess < 0 ? E_guess_near_degeneration(t) : E_guess);
      E_guess = st.E;
      S += 0.5 * h * kG3w[g] * jac * S_prime_of(st, c);
      if (opt.phase_a != 0.0) phi += 0.5 * h * kG3w[g] * jac * phi_rate(st, c, opt.phase_a);
    }
  }
}

ModulationState full_state(double t, double E_guess, double S, double phi, const DegenerationConstants& c) {
  auto st = solve_E(t, E_guess);
  st.S_prime = S_prime_of(st, c);
  st.S = S;
  st.phi = phi;
  return st;
}

}  // namespace

KuzmakTable solve_phase(const DegenerationConstants& c, const KuzmakOptions& opt) {
  KuzmakTable tab;
  tab.constants = c;
  tab.options = opt;
  const double ts = t_star();
  const double wmax = std::pow(opt.a_max, 0.25);
  const int N = opt.panels;
  tab.w.push_back(0.0);
  tab.states.push_back(degenerate_state(opt));
  double S = 0.0, phi = opt.phi0, Eg = -1.0;
  for (int i = 1; i <= N; ++i) {
    const double wa = wmax * (i - 1) / N, wb = wmax * i / N;
    advance(wa, wb, Eg, S, phi, c, opt);
    tab.w.push_back(wb);
    tab.states.push_back(full_state(ts + std::pow(wb, 4), Eg, S, phi, c));
  }
  return tab;
}

std::vector<ModulationState> solve_phase(const std::vector<double>& t_grid, const DegenerationConstants& c,
                                         const KuzmakOptions& opt) {
  const double ts = t_star();
  std::vector<ModulationState> out;
  double S = 0.0, phi = opt.phi0, Eg = -1.0, w_prev = 0.0;
  for (double t : t_grid) {
    if (!(t > ts)) throw OutOfValidity("phase grid must lie above t*");
    const double w = std::pow(t - ts, 0.25);
    if (w < w_prev) throw OutOfValidity("phase grid must be ascending");
    advance(w_prev, w, Eg, S, phi, c, opt);
    out.push_back(full_state(t, Eg, S, phi, c));
    w_prev = w;
  }
  return out;
}

ModulationState KuzmakTable::at(double t) const {
  const double ts = t_star();
  if (!(t > ts) || t > ts + options.a_max) throw OutOfValidity("t outside (t*, t* + a_max]");
  const double w = std::pow(t - ts, 0.25);
  const double h = this->w.back() / (static_cast<double>(this->w.size()) - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(w / h), this->w.size() - 2);
  const auto& A = states[i];
  const auto& B = states[i + 1];
  const double wa = this->w[i], wb = this->w[i + 1];
  const double s = (w - wa) / (wb - wa);
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  const double dA = 4 * wa * wa * wa * A.S_prime, dB = 4 * wb * wb * wb * B.S_prime;
  const double S = h00 * A.S + h10 * (wb - wa) * dA + h01 * B.S + h11 * (wb - wa) * dB;
  double phi = options.phi0;
  if (options.phase_a != 0.0) {
    const double pA = 4 * wa * wa * wa * phi_rate(A, constants, options.phase_a);
    const double pB = 4 * wb * wb * wb * phi_rate(B, constants, options.phase_a);
    phi = h00 * A.phi + h10 * (wb - wa) * pA + h01 * B.phi + h11 * (wb - wa) * pB;
  }
  const double Eg = i == 0 ? E_guess_near_degeneration(t) : A.E + (B.E - A.E) * s;
  return full_state(t, Eg, S, phi, constants);
}

double t1_period(const ModulationState& s) { return 2.0 * s.S_prime * period_J(s.t, s.E); }

double leading_U0(double t1, const ModulationState& st) {
  if (!std::isfinite(st.S_prime) || !(st.n > 0)) throw OutOfValidity("leading_U0 needs a solved state with t > t*");
  const QuarticRoots r{st.alpha, st.beta, st.m, st.n};
  const auto parts = j_parts(r);
  const double J = parts.left + parts.right;
  const double P = 2.0 * st.S_prime * J;
  double x = std::fmod(t1, P);
  if (x < 0) x += P;
  if (x > P / 2) x = P - x;
  const double target = x / st.S_prime;  // int_beta^U dx / sqrt(F)
  const double xc = 0.5 * (r.alpha + r.beta);
  if (target <= parts.left) {
    if (target <= 0) return r.beta;
    const double Ymax = std::sqrt((xc - r.beta) / r.n);
    const double Y = root_bracket([&](double y) { return left_integral(y, r) - target; }, 0.0, Ymax, 1e-14 * Ymax);
    return r.beta + r.n * Y * Y;
  }
  const double rest = J - target;  // int_U^alpha dx / sqrt(F)
  if (rest <= 0) return r.alpha;
  const double Smax = std::sqrt(r.alpha - xc);
  const double S = root_bracket([&](double s) { return right_integral(s, r) - rest; }, 0.0, Smax, 1e-14 * Smax);
  return r.alpha - S * S;
}

SolutionSample kuzmak_eval(double t, double eps, const KuzmakTable& table) {
  if (!(eps > 0)) throw OutOfValidity("Kuzmak regime needs eps > 0");
  const double eta = t - t_star();
  if (!(eta * std::pow(eps, -2.0 / 3.0) > table.options.M_kuz)) throw OutOfValidity("violated (t - t*) eps^{-2/3} >> 1");
  if (eta > table.options.a_max) throw OutOfValidity("violated t < t* + a");
  const auto st = table.at(t);
  const double u = leading_U0(st.S / eps + st.phi, st);
  const double res = eps * eps * std::pow(eta, -2.75) + eps * eps * eps * std::pow(eta, -4.25);
  return {t, u, Regime::KuzmakIV, res};
}

}  // namespace p2asym
