#include "p2asym/pole_layer.hpp"

#include <Eigen/Dense>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/quadrature.hpp"

namespace p2asym {

namespace {

double den(double th) {
  const double u = u_star();
  return 1.0 + 4.0 * u * u * th * th;
}

// Closed-form particular solutions of
//   L w = -tau_k (u* + w0)  (per unit tau_k)   and   L w = theta (u* + w0).
double w1_unit(double th) {
  const double u = u_star();
  const double t2 = th * th, d = den(th);
  return (1.0 / (8 * u) - u * t2 / 2 + 2 * u * u * u * t2 * t2 / 3 + 8 * std::pow(u, 5) * t2 * t2 * t2 / 5) / (d * d);
}

double w2_part(double th) {
  const double u = u_star();
  const double t2 = th * th, d = den(th);
  return (u * th * t2 / 2 + 2 * u * u * u * th * t2 * t2 + 8 * std::pow(u, 5) * th * t2 * t2 * t2 / 3) / (d * d);
}

// Variation of constants for L y = f with y(0) = y'(0) = 0 (base point 0).
double particular(const quad::Fn& f, double th) {
  if (th == 0.0) return 0.0;
  const int panels = 8 + static_cast<int>(std::abs(th));
  const double i2 = quad::composite_gauss([&](double s) { return hom2(s) * f(s); }, 0.0, th, panels);
  const double i1 = quad::composite_gauss([&](double s) { return hom1(s) * f(s); }, 0.0, th, panels);
  return (-hom1(th) * i2 + hom2(th) * i1) / hom_wronskian();
}

double w4_forcing(double s, const PoleLayerFrame& fr) {
  const double u = u_star();
  const double w1 = fr.tau_k * w1_unit(s);
  return -6.0 * (u + w0_eval(s)) * w1 * w1 - fr.tau_k * w1 + fr.theta_shift2 * (u + w0_eval(s));
}

double w4_particular(double th, const PoleLayerFrame& fr) {
  return particular([&](double s) { return w4_forcing(s, fr); }, th);
}

double theta4_fit(const PoleLayerFrame& fr, int side, bool particular_only) {
  const int m = 40;
  Eigen::MatrixXd A(m, 6);
  Eigen::VectorXd y(m);
  const int powers[6] = {6, 4, 2, 0, -2, -4};
  for (int i = 0; i < m; ++i) {
    const double a = 15.0 + 45.0 * i / (m - 1);
    const double th = side * a;
    for (int j = 0; j < 6; ++j) A(i, j) = std::pow(a, powers[j] - 4);
    y(i) = (particular_only ? w4_particular(th, fr) : correction_w(4, th, fr)) / std::pow(a, 4);
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  return c(1);
}

}  // namespace

PoleLayerFrame make_frame(const PoleData& p) {
  PoleLayerFrame f;
  f.k = p.k;
  f.tau_k = p.tau_k;
  f.theta_shift1 = u_star() * p.a1_minus / 2.0;
  f.c_k = p.c_k;
  f.b1_minus = p.b1_minus;
  return f;
}

double w0_eval(double theta) {
  const double u = u_star();
  return -16.0 * u / (4.0 + 16.0 * u * u * theta * theta);
}

double w0_prime(double theta) {
  const double u = u_star();
  const double d = den(theta);
  return 32.0 * u * u * u * theta / (d * d);
}

double hom1(double theta) {
  const double d = den(theta);
  return 8.0 * theta / (d * d);
}

double hom1_prime(double theta) {
  const double u = u_star();
  const double d = den(theta);
  return 8.0 / (d * d) - 128.0 * u * u * theta * theta / (d * d * d);
}

// 16 u^4 (th^8 + 7th^6/(5u^2) + 7th^4/(8u^4) + 7th^2/(16u^6) - 7/(256u^8)) / den^2
double hom2(double theta) {
  const double u = u_star(), u2 = u * u;
  const double t2 = theta * theta, d = den(theta);
  const double p = t2 * t2 * t2 * t2 + 7 * t2 * t2 * t2 / (5 * u2) + 7 * t2 * t2 / (8 * u2 * u2) +
                   7 * t2 / (16 * u2 * u2 * u2) - 7 / (256 * u2 * u2 * u2 * u2);
  return 16 * u2 * u2 * p / (d * d);
}

double hom2_prime(double theta) {
  const double u = u_star(), u2 = u * u;
  const double t2 = theta * theta, d = den(theta);
  const double p = t2 * t2 * t2 * t2 + 7 * t2 * t2 * t2 / (5 * u2) + 7 * t2 * t2 / (8 * u2 * u2) +
                   7 * t2 / (16 * u2 * u2 * u2) - 7 / (256 * u2 * u2 * u2 * u2);
  const double dp = theta * (8 * t2 * t2 * t2 + 42 * t2 * t2 / (5 * u2) + 7 * t2 / (2 * u2 * u2) + 7 / (8 * u2 * u2 * u2));
  return 16 * u2 * u2 * (dp / (d * d) - 16 * u2 * theta * p / (d * d * d));
}

double hom_wronskian() {
  const double u = u_star();
  return 7.0 / (2.0 * u * u * u * u);
}

double correction_w(int n, double theta, const PoleLayerFrame& fr) {
  if (!std::isfinite(fr.tau_k)) throw FrameIncomplete("frame has no tau_k");
  switch (n) {
    case 1:
      return fr.tau_k * w1_unit(theta);
    case 2:
      return w2_part(theta);
    case 3:
      if (!std::isfinite(fr.c_k) || !std::isfinite(fr.theta_shift1))
        throw FrameIncomplete("w3 needs c_k and the first shift");
      // L w3 = theta1 (u* + w0): particular part is -theta1 w1_unit
      return fr.c_k * hom2(theta) - fr.theta_shift1 * w1_unit(theta);
    case 4: {
      if (!std::isfinite(fr.b1_minus)) throw FrameIncomplete("w4 needs b1_k^-");
      // theta^4 coefficient equals b1_k^- as theta -> -infinity
      const double shift = fr.b1_minus - theta4_fit(fr, -1, true);
      return w4_particular(theta, fr) + shift * hom2(theta);
    }
    default:
      throw FrameIncomplete("correction order must be 1..4");
  }
}

double w4_theta4_coeff(const PoleLayerFrame& frame, int side) {
  if (!std::isfinite(frame.b1_minus)) throw FrameIncomplete("w4 needs b1_k^-");
  const double shift = frame.b1_minus - theta4_fit(frame, -1, true);
  return theta4_fit(frame, side, true) + shift;
}

SolutionSample inner2_eval(double t, double eps, const PoleLayerFrame& fr, const PoleLayerOptions& opt) {
  if (!(eps > 0)) throw OutOfValidity("pole layer needs eps > 0");
  if (!std::isfinite(fr.tau_k) || !std::isfinite(fr.theta_shift1)) throw FrameIncomplete("frame lacks tau_k or shift");
  if (std::abs(t - t_star()) * opt.M_outer >= 1.0) throw OutOfValidity("violated |tau_k| << eps^{-4/5}");
  const double tau = (t - t_star()) * std::pow(eps, -0.8);
  const double theta = (tau - fr.tau_k) * std::pow(eps, -0.2);
  const double scale = std::pow(std::max(std::abs(fr.tau_k), 1.0), 0.2);
  if (std::abs(theta) * scale >= opt.M2 * std::pow(eps, -0.2))
    throw OutOfValidity("violated |theta tau_k^{1/5}| << eps^{-1/5}");
  const double th = theta + std::pow(eps, 0.2) * fr.theta_shift1 + std::pow(eps, 0.6) * fr.theta_shift2;
  // w4 enters at eps^{8/5}, the order of the remainder, and is left out.
  const double u = u_star() + w0_eval(th) + std::pow(eps, 0.8) * correction_w(1, th, fr) +
                   eps * correction_w(2, th, fr) + std::pow(eps, 1.2) * correction_w(3, th, fr);
  const double a = std::max(1.0, std::abs(th)), tk = std::max(std::abs(fr.tau_k), 1.0);
  const double res = std::pow(eps, 1.6) * (1.0 + tk * tk * std::pow(a, 4)) + std::pow(eps, 1.8) * tk * std::pow(a, 5) +
                     eps * eps * std::pow(a, 6);
  return {t, u, Regime::PoleIII, res};
}

}  // namespace p2asym
