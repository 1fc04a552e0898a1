#pragma once

// Thin wrapper over the odeint Dormand-Prince 5(4) dense-output stepper with
// sign-change event location on the interpolant.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "p2asym/errors.hpp"

namespace p2asym::ode {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
class DenseSolver {
 public:
  using state_type = State<N>;
  using rhs_type = std::function<void(const state_type&, state_type&, double)>;

  DenseSolver(rhs_type rhs, double rtol, double atol, double max_dt = 0.0)
      : rhs_(std::move(rhs)),
        stepper_(make_stepper(rtol, atol, max_dt)) {}

  void initialize(const state_type& x0, double t0, double dt0) {
    stepper_.initialize(x0, t0, dt0);
    steps_ = 0;
  }

  // Advances one accepted step; returns the step size actually taken.
  double step() {
    std::pair<double, double> iv;
    try {
      iv = stepper_.do_step(std::cref(rhs_));
    } catch (const boost::numeric::odeint::step_adjustment_error& e) {
      throw ToleranceFailure(e.what());
    }
    ++steps_;
    const double h = iv.second - iv.first;
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(iv.second)))
      throw StepUnderflow("step size " + std::to_string(h) + " at t=" + std::to_string(iv.second));
    for (double v : stepper_.current_state())
      if (!std::isfinite(v)) throw ToleranceFailure("non-finite state at t=" + std::to_string(iv.second));
    return h;
  }

  double t() const { return stepper_.current_time(); }
  double t_prev() const { return stepper_.previous_time(); }
  const state_type& x() const { return stepper_.current_state(); }
  const state_type& x_prev() const { return stepper_.previous_state(); }
  double dt() const { return stepper_.current_time_step(); }
  std::size_t steps() const { return steps_; }

  // Dense output inside the last accepted step.
  state_type at(double t) const {
    state_type out{};
    stepper_.calc_state(t, out);
    return out;
  }

  void derivative(const state_type& x, state_type& dx, double t) const { rhs_(x, dx, t); }

 private:
  using base_stepper = boost::numeric::odeint::runge_kutta_dopri5<state_type>;
  using dense_stepper = boost::numeric::odeint::dense_output_runge_kutta<
      boost::numeric::odeint::controlled_runge_kutta<base_stepper>>;

  static dense_stepper make_stepper(double rtol, double atol, double max_dt) {
    using boost::numeric::odeint::make_dense_output;
    if (max_dt > 0.0) return make_dense_output(atol, rtol, max_dt, base_stepper());
    return make_dense_output(atol, rtol, base_stepper());
  }

  rhs_type rhs_;
  dense_stepper stepper_;
  std::size_t steps_ = 0;
};

// Root of g(t, x(t)) inside the last accepted step, given a sign change
// between its end points. Returns the located time.
template <std::size_t N, class G>
double locate_in_step(const DenseSolver<N>& s, G&& g, double t_tol = 1e-12) {
  double a = s.t_prev(), b = s.t();
  if (a > b) std::swap(a, b);
  auto f = [&](double t) { return g(t, s.at(t)); };
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  boost::uintmax_t it = 200;
  auto tol = [t_tol](double l, double r) { return std::abs(r - l) <= t_tol; };
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, it);
  return 0.5 * (r.first + r.second);
}

// Quintic Hermite interpolation of a scalar track from (t, y, y', y'') knots.
class QuinticTrack {
 public:
  void push(double t, double y, double dy, double ddy) {
    t_.push_back(t);
    y_.push_back(y);
    d_.push_back(dy);
    dd_.push_back(ddy);
  }
  bool empty() const { return t_.empty(); }
  std::size_t size() const { return t_.size(); }
  double t_front() const { return t_.front(); }
  double t_back() const { return t_.back(); }
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return d_; }

  // Returns (y, y') at t; t must lie inside the knot range.
  std::pair<double, double> eval(double t) const;

 private:
  std::vector<double> t_, y_, d_, dd_;
};

inline std::pair<double, double> QuinticTrack::eval(double t) const {
  if (t_.empty()) throw ToleranceFailure("empty track");
  if (t < t_.front() || t > t_.back()) throw OutOfValidity("track evaluation outside stored range");
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = (it == t_.begin()) ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  if (i + 1 >= t_.size()) i = t_.size() - 2;
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h00 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double h10 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double h20 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double h01 = 10 * s3 - 15 * s4 + 6 * s5;
  const double h11 = -4 * s3 + 7 * s4 - 3 * s5;
  const double h21 = 0.5 * s3 - s4 + 0.5 * s5;
  const double y = h00 * y_[i] + h10 * h * d_[i] + h20 * h * h * dd_[i] + h01 * y_[i + 1] +
                   h11 * h * d_[i + 1] + h21 * h * h * dd_[i + 1];
  const double d00 = -30 * s2 + 60 * s3 - 30 * s4;
  const double d10 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double d20 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
  const double d01 = 30 * s2 - 60 * s3 + 30 * s4;
  const double d11 = -12 * s2 + 28 * s3 - 15 * s4;
  const double d21 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  const double dy = (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * d_[i] + d11 * d_[i + 1] +
                    h * (d20 * dd_[i] + d21 * dd_[i + 1]);
  return {y, dy};
}

}  // namespace p2asym::ode
