#include "p2asym/p1_layer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/laurent.hpp"

namespace p2asym {

namespace {

constexpr double kGrid = 0.002;  // spacing of dense samples kept for fitting

struct DenseSample {
  double tau, v, dv;
};

double model_value(const std::vector<double>& a, double x) { return laurent::eval(a, 2, x).y; }

std::vector<double> five_term(double us, double tau_k, double c_k) {
  return {-1.0 / us, 0.0, 0.0, 0.0, tau_k * us / 10.0, us / 6.0, c_k};
}

std::vector<double> model_coeffs(double us, double tau_k, double c_k, int terms, const double* a4) {
  if (terms == 5) {
    auto a = five_term(us, tau_k, c_k);
    if (a4) a[4] = *a4;
    return a;
  }
  return laurent::p1_coeffs(us, tau_k, c_k, terms, a4);
}

double initial_tau_k(const std::vector<PoleFitSample>& s) {
  // 1/sqrt|v| is close to linear in tau near the pole
  std::vector<PoleFitSample> sorted = s;
  std::sort(sorted.begin(), sorted.end(), [](auto& l, auto& r) { return std::abs(l.v) > std::abs(r.v); });
  const double q1 = 1.0 / std::sqrt(std::abs(sorted[0].v));
  const double q2 = 1.0 / std::sqrt(std::abs(sorted[1].v));
  const double t1 = sorted[0].tau, t2 = sorted[1].tau;
  if (q2 == q1) throw PoleFitFailure("flat samples");
  return t1 - q1 * (t2 - t1) / (q2 - q1);
}

// Gauss-Newton on a small parameter vector with forward-difference Jacobian.
template <class Residual>
double gauss_newton(Eigen::VectorXd& p, std::size_t m, Residual&& res) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(m)), r2(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd J(static_cast<Eigen::Index>(m), p.size());
  for (int it = 0; it < 60; ++it) {
    res(p, r);
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      Eigen::VectorXd q = p;
      const double h = 1e-7 * std::max(1.0, std::abs(p[j]));
      q[j] += h;
      res(q, r2);
      J.col(j) = (r2 - r) / h;
    }
    const Eigen::VectorXd d = J.colPivHouseholderQr().solve(-r);
    if (!d.allFinite()) throw PoleFitFailure("singular fit Jacobian");
    p += d;
    if (d.cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, p.cwiseAbs().maxCoeff())) break;
  }
  res(p, r);
  return std::sqrt(r.squaredNorm() / static_cast<double>(m));
}

struct Projection {
  double a, b;
};

Projection project_v1(double us, double tau_k, double c_k, const std::vector<std::pair<double, double>>& pts) {
  const int n = 40;
  const auto a = laurent::p1_coeffs(us, tau_k, c_k, n);
  const auto P = laurent::v1_coeffs(us, tau_k, a, true, 0.0, 0.0, n).d;
  const auto H1 = laurent::v1_coeffs(us, tau_k, a, false, 1.0, 0.0, n).d;
  const auto H2 = laurent::v1_coeffs(us, tau_k, a, false, 0.0, 1.0, n).d;
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = pts[static_cast<std::size_t>(i)].first - tau_k;
    A(i, 0) = laurent::eval(H1, 4, x).y;
    A(i, 1) = laurent::eval(H2, 4, x).y;
    rhs(i) = pts[static_cast<std::size_t>(i)].second - laurent::eval(P, 4, x).y;
  }
  Eigen::Vector2d scale(A.col(0).norm(), A.col(1).norm());
  Eigen::MatrixXd As = A;
  As.col(0) /= scale(0);
  As.col(1) /= scale(1);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto sv = svd.singularValues();
  if (sv(1) <= 0 || sv(0) / sv(1) > 1e10) throw ProjectionIllConditioned("collocation basis nearly dependent");
  const Eigen::Vector2d c = svd.solve(rhs);
  return {c(0) / scale(0), c(1) / scale(1)};
}

std::vector<double> collocation_points(double lo, double hi) {
  std::vector<double> p;
  for (int i = 0; i < 12; ++i) p.push_back(lo + (hi - lo) * i / 11.0);
  return p;
}

// v1 local value from the projected constants.
laurent::Value v1_local(double us, double tau_k, double c_k, double a1, double b1, double x) {
  const int n = 40;
  const auto a = laurent::p1_coeffs(us, tau_k, c_k, n);
  const auto s = laurent::v1_coeffs(us, tau_k, a, true, a1, b1, n).d;
  return laurent::eval(s, 4, x);
}

void p1_rhs(double us, const ode::State<2>& x, ode::State<2>& dx, double tau) {
  dx[0] = x[1];
  dx[1] = -6 * us * x[0] * x[0] - us * tau;
}

void p1v1_rhs(double us, const ode::State<4>& x, ode::State<4>& dx, double tau) {
  dx[0] = x[1];
  dx[1] = -6 * us * x[0] * x[0] - us * tau;
  dx[2] = x[3];
  dx[3] = -12 * us * x[0] * x[2] - tau * x[0] - 2 * x[0] * x[0] * x[0];
}

// Integrates backward from tau_start (real state) toward the pole until
// |v| > v_max and returns dense samples of v.
std::vector<DenseSample> approach_from_right(double us, double tau_start, double v, double dv, double tau_k_guess,
                                             const P1Options& opt) {
  ode::DenseSolver<2> solver([us](const ode::State<2>& x, ode::State<2>& dx, double t) { p1_rhs(us, x, dx, t); },
                             opt.tol, opt.tol);
  solver.initialize({v, dv}, tau_start, -1e-3);
  std::vector<DenseSample> out;
  double next = tau_start;
  while (true) {
    solver.step();
    while (next >= solver.t()) {
      const auto s = solver.at(next);
      out.push_back({next, s[0], s[1]});
      next -= kGrid;
    }
    if (std::abs(solver.x()[0]) > opt.v_max) break;
    if (solver.t() < tau_k_guess - 0.5) throw PoleFitFailure("no blow-up on the right side of the pole");
  }
  return out;
}

}  // namespace

double InnerScale::t_of_tau(double tau) const { return t_star() + std::pow(eps, 0.8) * tau; }
double InnerScale::tau_of_t(double t) const { return (t - t_star()) * std::pow(eps, -0.8); }
double InnerScale::u_of_v(double v) const { return u_star() + std::pow(eps, 0.4) * v; }
double InnerScale::v_of_u(double u) const { return (u - u_star()) * std::pow(eps, -0.4); }

double jump_delta(double tau_k) {
  const double us = u_star();
  return -22.0 * us * us * us * tau_k * tau_k / 75.0;
}

namespace {

double proj_width(double tau_k, const P1Options& opt) {
  return opt.proj_coeff * std::pow(std::max(std::abs(tau_k), 1.0), -0.2);
}

// The detour must end outside the projection annulus.
double arc_radius(double tau_k, const P1Options& opt) { return std::max(opt.arc_radius, 5.0 * proj_width(tau_k, opt)); }

}  // namespace

double w_pole(double tau_k, const P1Options& opt) {
  return opt.w_coeff * std::pow(std::max(std::abs(tau_k), 1.0), -0.2);
}

std::pair<double, double> p1_seed(double tau0) {
  if (tau0 > -10) throw SeedOutOfRange("seed needs tau0 <= -10, got " + std::to_string(tau0));
  const double us = u_star();
  const double m = -tau0;
  const double c3 = 49.0 / (768.0 * std::sqrt(6.0) * us * us);
  const double v = -std::sqrt(m / 6.0) + 1.0 / (48.0 * us * tau0 * tau0) + c3 * std::pow(m, -4.5);
  const double dv = 1.0 / (2.0 * std::sqrt(6.0 * m)) - 2.0 / (48.0 * us * tau0 * tau0 * tau0) + 4.5 * c3 * std::pow(m, -5.5);
  return {v, dv};
}

std::pair<double, double> v1_seed(double tau0) {
  if (tau0 > -10) throw SeedOutOfRange("seed needs tau0 <= -10, got " + std::to_string(tau0));
  const double us = u_star();
  const double m = -tau0;
  const double c = 1.0 / (144.0 * std::sqrt(6.0) * us * us);
  return {-tau0 / (18.0 * us) + c * std::pow(m, -1.5), -1.0 / (18.0 * us) + 1.5 * c * std::pow(m, -2.5)};
}

PoleFit locate_pole(const std::vector<PoleFitSample>& samples, int model_terms) {
  if (samples.size() < 6) throw PoleFitFailure("need at least 6 samples, got " + std::to_string(samples.size()));
  const double us = u_star();
  Eigen::VectorXd p(2);
  p << initial_tau_k(samples), 0.0;
  auto res = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    const auto a = model_coeffs(us, q[0], q[1], model_terms, nullptr);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double m = model_value(a, samples[i].tau - q[0]);
      r[static_cast<Eigen::Index>(i)] = (m - samples[i].v) / std::max(1.0, std::abs(samples[i].v));
    }
  };
  const double rms = gauss_newton(p, samples.size(), res);
  if (!std::isfinite(rms)) throw PoleFitFailure("fit diverged");
  return {p[0], p[1], rms};
}

PoleFit locate_pole_free_a4(const std::vector<PoleFitSample>& samples, int model_terms) {
  if (samples.size() < 6) throw PoleFitFailure("need at least 6 samples");
  const double us = u_star();
  const PoleFit base = locate_pole(samples, model_terms);
  Eigen::VectorXd p(3);
  p << base.tau_k, base.c_k, base.tau_k * us / 10.0 * 0.9;
  auto res = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    const double a4 = q[2];
    const auto a = model_coeffs(us, q[0], q[1], model_terms, &a4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double m = model_value(a, samples[i].tau - q[0]);
      r[static_cast<Eigen::Index>(i)] = (m - samples[i].v) / std::max(1.0, std::abs(samples[i].v));
    }
  };
  const double rms = gauss_newton(p, samples.size(), res);
  PoleFit f{p[0], p[1], rms};
  f.a4 = p[2];
  return f;
}

std::pair<double, double> continue_around_pole(double tau_k, double R, double v, double dv, double tol) {
  const double us = u_star();
  using cd = std::complex<double>;
  // parameter s in [0, pi]: tau = tau_k + R exp(i (pi - s))
  auto rhs = [=](const ode::State<4>& x, ode::State<4>& dx, double s) {
    const cd tau = tau_k + R * std::exp(cd(0, std::numbers::pi - s));
    const cd dtau = cd(0, -1) * R * std::exp(cd(0, std::numbers::pi - s));
    const cd V(x[0], x[1]), dV(x[2], x[3]);
    const cd f1 = dV * dtau;
    const cd f2 = (-6.0 * us * V * V - us * tau) * dtau;
    dx = {f1.real(), f1.imag(), f2.real(), f2.imag()};
  };
  ode::DenseSolver<4> solver(rhs, tol, tol);
  solver.initialize({v, 0.0, dv, 0.0}, 0.0, 1e-3);
  while (solver.t() < std::numbers::pi) solver.step();
  const auto x = solver.at(std::numbers::pi);
  return {x[0], x[2]};
}

namespace {

// Same detour for the pair (v0, v1).
ode::State<4> continue_pair_around_pole(double tau_k, double R, const ode::State<4>& start, double tol) {
  const double us = u_star();
  using cd = std::complex<double>;
  auto rhs = [=](const ode::State<8>& x, ode::State<8>& dx, double s) {
    const cd tau = tau_k + R * std::exp(cd(0, std::numbers::pi - s));
    const cd dtau = cd(0, -1) * R * std::exp(cd(0, std::numbers::pi - s));
    const cd V(x[0], x[1]), dV(x[2], x[3]), W(x[4], x[5]), dW(x[6], x[7]);
    const cd f1 = dV * dtau;
    const cd f2 = (-6.0 * us * V * V - us * tau) * dtau;
    const cd f3 = dW * dtau;
    const cd f4 = (-12.0 * us * V * W - tau * V - 2.0 * V * V * V) * dtau;
    dx = {f1.real(), f1.imag(), f2.real(), f2.imag(), f3.real(), f3.imag(), f4.real(), f4.imag()};
  };
  ode::DenseSolver<8> solver(rhs, tol, tol);
  solver.initialize({start[0], 0, start[1], 0, start[2], 0, start[3], 0}, 0.0, 1e-3);
  while (solver.t() < std::numbers::pi) solver.step();
  const auto x = solver.at(std::numbers::pi);
  return {x[0], x[2], x[4], x[6]};
}

}  // namespace

P1Trajectory integrate_p1(double tau0, double tau1, const P1Options& opt) {
  if (!(tau1 > tau0)) throw OutOfValidity("integrate_p1 needs tau0 < tau1");
  const double us = u_star();
  P1Trajectory tr;
  tr.seed_tau = tau0;
  tr.options = opt;
  auto [v, dv] = p1_seed(tau0);
  ode::DenseSolver<2> solver([us](const ode::State<2>& x, ode::State<2>& dx, double t) { p1_rhs(us, x, dx, t); },
                             opt.tol, opt.tol);
  double ts = tau0;
  ode::State<2> state{v, dv};
  auto vpp = [us](double tau, double vv) { return -6 * us * vv * vv - us * tau; };
  while (true) {
    solver.initialize(state, ts, 1e-3);
    P1Trajectory::Segment seg;
    seg.v0.push(ts, state[0], state[1], vpp(ts, state[0]));
    std::vector<DenseSample> dense;
    double next = ts;
    bool done = false;
    while (true) {
      solver.step();
      const double t = solver.t();
      while (next <= std::min(t, tau1)) {
        const auto s = solver.at(next);
        dense.push_back({next, s[0], s[1]});
        next += kGrid;
      }
      if (t >= tau1) {
        const auto s = solver.at(tau1);
        seg.v0.push(tau1, s[0], s[1], vpp(tau1, s[0]));
        tr.tau_end = tau1;
        done = true;
        break;
      }
      const auto& x = solver.x();
      seg.v0.push(t, x[0], x[1], vpp(t, x[0]));
      if (std::abs(x[0]) > opt.v_max) break;
    }
    if (done) {
      tr.segments.push_back(std::move(seg));
      break;
    }
    // blow-up: fit the local series on the approach
    const double guess = solver.t() + 1.0 / std::sqrt(std::abs(us) * std::abs(solver.x()[0]));
    std::vector<PoleFitSample> fit_pts;
    for (const auto& d : dense) {
      const double x = d.tau - guess;
      if (x <= -opt.fit_inner && x >= -opt.fit_outer) fit_pts.push_back({d.tau, d.v});
    }
    const PoleFit fit = locate_pole(fit_pts, opt.laurent_terms);
    if (fit.residual > opt.fit_threshold)
      throw PoleFitFailure("fit residual " + std::to_string(fit.residual) + " at pole near tau=" + std::to_string(fit.tau_k));
    if (static_cast<int>(tr.poles.size()) >= opt.max_poles) {
      // stop before this pole; keep the part of the segment that is safely away from it
      const double w = w_pole(fit.tau_k, opt);
      P1Trajectory::Segment trimmed;
      const auto& tt = seg.v0.times();
      for (std::size_t i = 0; i < tt.size(); ++i) {
        if (tt[i] > fit.tau_k - w) break;
        const double vv = seg.v0.values()[i];
        trimmed.v0.push(tt[i], vv, seg.v0.slopes()[i], vpp(tt[i], vv));
      }
      tr.tau_end = trimmed.v0.t_back();
      tr.segments.push_back(std::move(trimmed));
      break;
    }
    PoleData pd;
    pd.k = static_cast<int>(tr.poles.size()) + 1;
    pd.tau_k = fit.tau_k;
    pd.c_k = fit.c_k;
    pd.fit_residual = fit.residual;
    const double w = w_pole(fit.tau_k, opt);
    const auto coeffs = laurent::p1_coeffs(us, fit.tau_k, fit.c_k, opt.laurent_terms);
    // segment ends at the window edge, continued from the series
    P1Trajectory::Segment trimmed;
    {
      const auto& tt = seg.v0.times();
      for (std::size_t i = 0; i < tt.size() && tt[i] < fit.tau_k - w; ++i) {
        const double vv = seg.v0.values()[i];
        trimmed.v0.push(tt[i], vv, seg.v0.slopes()[i], vpp(tt[i], vv));
      }
      const auto e = laurent::eval(coeffs, 2, -w);
      trimmed.v0.push(fit.tau_k - w, e.y, e.dy, vpp(fit.tau_k - w, e.y));
    }
    tr.segments.push_back(std::move(trimmed));
    if (opt.two_sided) {
      // start point on the dense grid closest to tau_k - arc_radius
      const DenseSample* start = nullptr;
      for (const auto& d : dense)
        if (!start || std::abs(d.tau - (fit.tau_k - opt.arc_radius)) < std::abs(start->tau - (fit.tau_k - opt.arc_radius)))
          start = &d;
      const double R = fit.tau_k - start->tau;
      const auto [vr, dvr] = continue_around_pole(fit.tau_k, R, start->v, start->dv, opt.tol * 1e-2);
      const auto right = approach_from_right(us, fit.tau_k + R, vr, dvr, fit.tau_k, opt);
      std::vector<PoleFitSample> rp;
      for (const auto& d : right) {
        const double x = d.tau - fit.tau_k;
        if (x >= opt.fit_inner && x <= opt.fit_outer) rp.push_back({d.tau, d.v});
      }
      const PoleFit rf = locate_pole(rp, opt.laurent_terms);
      pd.tau_k_right = rf.tau_k;
      pd.c_k_right = rf.c_k;
      pd.fit_residual_right = rf.residual;
    }
    tr.poles.push_back(pd);
    const auto e = laurent::eval(coeffs, 2, w);
    ts = fit.tau_k + w;
    state = {e.y, e.dy};
  }
  return tr;
}

const P1Trajectory::Segment* P1Trajectory::segment_for(double tau) const {
  for (const auto& s : segments)
    if (!s.v0.empty() && tau >= s.v0.t_front() && tau <= s.v0.t_back()) return &s;
  return nullptr;
}

double P1Trajectory::pole_distance(double tau) const {
  double d = INFINITY;
  for (const auto& p : poles) d = std::min(d, std::abs(tau - p.tau_k));
  return d;
}

std::pair<double, double> P1Trajectory::v0(double tau) const {
  if (tau < seed_tau || tau > tau_end) throw OutOfValidity("tau outside the integrated range");
  if (const auto* s = segment_for(tau)) return s->v0.eval(tau);
  const double us = u_star();
  for (const auto& p : poles) {
    if (std::abs(tau - p.tau_k) <= 2 * w_pole(p.tau_k, options)) {
      const auto a = laurent::p1_coeffs(us, p.tau_k, p.c_k, options.laurent_terms);
      const auto e = laurent::eval(a, 2, tau - p.tau_k);
      return {e.y, e.dy};
    }
  }
  throw OutOfValidity("tau not covered by the trajectory");
}

std::pair<double, double> P1Trajectory::v1(double tau) const {
  if (!has_v1) throw FrameIncomplete("first correction not computed");
  if (tau < seed_tau || tau > tau_end) throw OutOfValidity("tau outside the integrated range");
  if (const auto* s = segment_for(tau); s && !s->v1.empty() && tau >= s->v1.t_front() && tau <= s->v1.t_back())
    return s->v1.eval(tau);
  const double us = u_star();
  for (const auto& p : poles) {
    if (std::abs(tau - p.tau_k) <= 2 * w_pole(p.tau_k, options)) {
      const double x = tau - p.tau_k;
      const auto e = x < 0 ? v1_local(us, p.tau_k, p.c_k, p.a1_minus, p.b1_minus, x)
                           : v1_local(us, p.tau_k, p.c_k, p.a1_plus, p.b1_plus, x);
      return {e.y, e.dy};
    }
  }
  throw OutOfValidity("tau not covered by the first correction");
}

std::vector<std::tuple<double, double, double>> P1Trajectory::samples() const {
  std::vector<std::tuple<double, double, double>> out;
  for (const auto& s : segments)
    for (std::size_t i = 0; i < s.v0.size(); ++i) out.emplace_back(s.v0.times()[i], s.v0.values()[i], s.v0.slopes()[i]);
  return out;
}

void first_correction(P1Trajectory& tr) {
  const double us = u_star();
  const auto& opt = tr.options;
  auto rhs = [us](const ode::State<4>& x, ode::State<4>& dx, double t) { p1v1_rhs(us, x, dx, t); };
  ode::DenseSolver<4> solver(rhs, opt.tol, opt.tol);
  auto v1pp = [us](double tau, double v0, double v1) { return -12 * us * v0 * v1 - tau * v0 - 2 * v0 * v0 * v0; };
  const auto [v, dv] = p1_seed(tr.seed_tau);
  const auto [w, dw] = v1_seed(tr.seed_tau);
  ode::State<4> state{v, dv, w, dw};
  double ts = tr.seed_tau;
  for (std::size_t seg = 0; seg < tr.segments.size(); ++seg) {
    const bool has_pole = seg < tr.poles.size();
    const double end = has_pole ? tr.poles[seg].tau_k - w_pole(tr.poles[seg].tau_k, opt) : tr.tau_end;
    std::vector<double> left_pts, right_pts;
    std::vector<std::pair<double, double>> left_vals, right_vals;
    if (has_pole) {
      const double wp = proj_width(tr.poles[seg].tau_k, opt);
      left_pts = collocation_points(tr.poles[seg].tau_k - 4 * wp, tr.poles[seg].tau_k - 2 * wp);
    }
    if (seg > 0) {
      const double tk = tr.poles[seg - 1].tau_k, wp = proj_width(tk, opt);
      right_pts = collocation_points(tk + 2 * wp, tk + 4 * wp);
    }
    // arc start for the diagnostic detour
    const double arc_target = has_pole ? tr.poles[seg].tau_k - arc_radius(tr.poles[seg].tau_k, opt) : NAN;
    ode::State<4> arc_state{};
    bool arc_captured = false;
    auto& track = tr.segments[seg].v1;
    track = ode::QuinticTrack{};
    solver.initialize(state, ts, 1e-3);
    track.push(ts, state[2], state[3], v1pp(ts, state[0], state[2]));
    std::size_t li = 0, ri = 0;
    while (true) {
      solver.step();
      const double t = std::min(solver.t(), end);
      while (li < left_pts.size() && left_pts[li] <= t) {
        left_vals.emplace_back(left_pts[li], solver.at(left_pts[li])[2]);
        ++li;
      }
      while (ri < right_pts.size() && right_pts[ri] <= t) {
        right_vals.emplace_back(right_pts[ri], solver.at(right_pts[ri])[2]);
        ++ri;
      }
      if (has_pole && !arc_captured && solver.t() >= arc_target) {
        arc_state = solver.at(arc_target);
        arc_captured = true;
      }
      const auto x = solver.t() >= end ? solver.at(end) : solver.x();
      track.push(t, x[2], x[3], v1pp(t, x[0], x[2]));
      if (solver.t() >= end) {
        state = x;
        break;
      }
    }
    if (seg > 0) {
      auto& pp = tr.poles[seg - 1];
      const auto pr = project_v1(us, pp.tau_k, pp.c_k, right_vals);
      pp.a1_plus = pr.a;
      pp.b1_plus = pr.b;
    }
    if (!has_pole) break;
    auto& pd = tr.poles[seg];
    const auto pl = project_v1(us, pd.tau_k, pd.c_k, left_vals);
    pd.a1_minus = pl.a;
    pd.b1_minus = pl.b;
    if (opt.two_sided && arc_captured) {
      const double R = arc_radius(pd.tau_k, opt);
      const auto right = continue_pair_around_pole(pd.tau_k, R, arc_state, opt.tol * 1e-2);
      const double wp = proj_width(pd.tau_k, opt);
      const auto pts = collocation_points(pd.tau_k + 2 * wp, pd.tau_k + 4 * wp);
      ode::DenseSolver<4> back(rhs, opt.tol, opt.tol);
      back.initialize(right, pd.tau_k + R, -1e-3);
      std::vector<std::pair<double, double>> vals;
      std::size_t k = pts.size();
      while (k > 0) {
        back.step();
        while (k > 0 && pts[k - 1] >= back.t()) {
          vals.emplace_back(pts[k - 1], back.at(pts[k - 1])[2]);
          --k;
        }
      }
      const auto pa = project_v1(us, pd.tau_k, pd.c_k, vals);
      pd.a1_plus_arc = pa.a;
      pd.b1_plus_arc = pa.b;
    }
    // restart on the right edge of the window
    const double wp = w_pole(pd.tau_k, opt);
    const double b_restart = pd.b1_minus + (opt.enforce_jump ? jump_delta(pd.tau_k) : 0.0);
    const auto a = laurent::p1_coeffs(us, pd.tau_k, pd.c_k, opt.laurent_terms);
    const auto e0 = laurent::eval(a, 2, wp);
    const auto e1 = v1_local(us, pd.tau_k, pd.c_k, pd.a1_minus, b_restart, wp);
    state = {e0.y, e0.dy, e1.y, e1.dy};
    ts = pd.tau_k + wp;
  }
  tr.has_v1 = true;
}

SolutionSample inner1_eval(double t, double eps, const P1Trajectory& traj, const InnerOptions& opt) {
  if (!(eps > 0)) throw OutOfValidity("inner layer needs eps > 0");
  const double ts = t_star();
  if (std::abs(t - ts) >= 1.0 / opt.M_outer) throw OutOfValidity("violated |tau| << eps^{-4/5}");
  const InnerScale sc{eps};
  const double tau = sc.tau_of_t(t);
  if (tau < traj.seed_tau || tau > traj.tau_end) throw OutOfValidity("tau outside the integrated first-layer range");
  for (const auto& p : traj.poles)
    if (std::pow(eps, -0.2) * std::abs(tau - p.tau_k) <= opt.M_pole)
      throw OutOfValidity("violated eps^{-1/5}|tau - tau_k| >> 1 at pole " + std::to_string(p.k));
  const double v0 = traj.v0(tau).first;
  const double v1 = traj.has_v1 ? traj.v1(tau).first : 0.0;
  const double u = u_star() + std::pow(eps, 0.4) * v0 + std::pow(eps, 0.8) * v1;
  // The omitted eps^{6/5} v2 grows like |tau - tau_k|^{-6} at a pole.
  const double x = traj.poles.empty() ? INFINITY : traj.pole_distance(tau);
  const double res = std::pow(eps, 1.6) * std::max(1.0, tau * tau) + std::pow(eps, 1.2) * std::pow(x, -6);
  return {t, u, Regime::PainleveII, res};
}

}  // namespace p2asym
