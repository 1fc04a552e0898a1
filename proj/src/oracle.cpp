#include "p2asym/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/outer_expansion.hpp"

namespace p2asym {

std::pair<double, double> initial_condition(double t0, double eps) {
  if (!(t0 < t_star() - 0.2))
    throw DegenerateBranch("initial point must satisfy t0 < t_star - 0.2, got " + std::to_string(t0));
  auto trunc = [eps](double t) {
    const auto o = outer_terms(t);
    return o.u0 + eps * eps * o.u1c;
  };
  const double h = 1e-3;
  const double du = (trunc(t0 - 2 * h) - 8 * trunc(t0 - h) + 8 * trunc(t0 + h) - trunc(t0 + 2 * h)) / (12 * h);
  return {trunc(t0), eps == 0.0 ? 0.0 : du};
}

std::pair<double, double> OracleRun::eval(double t) const { return track_u_.eval(t); }

void OracleRun::build_track() {
  track_u_ = ode::QuinticTrack{};
  const double e2 = eps * eps;
  for (const auto& s : samples) track_u_.push(s.t, s.u, s.du, (1 - 2 * s.u * s.u * s.u - s.t * s.u) / e2);
}

OracleRun solve_p2(const OracleConfig& cfg) {
  if (!(cfg.eps > 0)) throw OutOfValidity("oracle needs eps > 0");
  if (!(cfg.t1 > cfg.t0)) throw OutOfValidity("oracle needs t1 > t0");
  OracleRun run;
  run.eps = cfg.eps;
  run.t0 = cfg.t0;
  run.t1 = cfg.t1;
  run.tol = cfg.tol;
  const double e2 = cfg.eps * cfg.eps;
  // state (u, u', accumulated int u^2/2 dt)
  auto rhs = [e2](const ode::State<3>& x, ode::State<3>& dx, double t) {
    dx[0] = x[1];
    dx[1] = (1 - 2 * x[0] * x[0] * x[0] - t * x[0]) / e2;
    dx[2] = 0.5 * x[0] * x[0];
  };
  auto energy = [e2](double t, const ode::State<3>& x) {
    return 0.5 * e2 * x[1] * x[1] + 0.5 * std::pow(x[0], 4) + 0.5 * t * x[0] * x[0] - x[0];
  };
  ode::DenseSolver<3> solver(rhs, cfg.tol, cfg.tol * 1e-2, 0.5 * cfg.eps);
  const auto [u0, du0] = initial_condition(cfg.t0, cfg.eps);
  ode::State<3> x0{u0, du0, 0.0};
  solver.initialize(x0, cfg.t0, 0.1 * cfg.eps * 1e-2);
  if (cfg.record_samples) run.samples.push_back({cfg.t0, u0, du0});
  const double H0 = energy(cfg.t0, x0);
  auto du = [](double, const ode::State<3>& x) { return x[1]; };
  while (solver.t() < cfg.t1) {
    solver.step();
    const double tb = std::min(solver.t(), cfg.t1);
    const auto& xa = solver.x_prev();
    const ode::State<3> xb = solver.t() > cfg.t1 ? solver.at(cfg.t1) : solver.x();
    if ((xa[1] > 0) != (xb[1] > 0) && std::abs(xa[1]) + std::abs(xb[1]) > 0) {
      const double te = ode::locate_in_step(solver, du, 1e-12);
      if (te <= cfg.t1) {
        const auto xe = solver.at(te);
        run.events.push_back({te, xe[0], xa[1] > 0 ? EventKind::Peak : EventKind::Trough});
      }
    }
    if (cfg.record_samples) run.samples.push_back({tb, xb[0], xb[1]});
    if (solver.t() >= cfg.t1) {
      run.energy_drift = std::abs(energy(cfg.t1, xb) - H0 - xb[2]) / (cfg.t1 - cfg.t0);
    }
  }
  run.steps = solver.steps();
  if (cfg.record_samples) run.build_track();
  return run;
}

EnvelopeRow envelope_window(const OracleRun& run, double a, double b) {
  double pmax = -INFINITY, tmin = INFINITY;
  bool has_peak = false, has_trough = false, before = false, after = false;
  for (const auto& e : run.events) {
    if (e.t < a) {
      before = true;
      continue;
    }
    if (e.t > b) {
      after = true;
      continue;
    }
    if (e.kind == EventKind::Peak) {
      has_peak = true;
      pmax = std::max(pmax, e.u);
    } else {
      has_trough = true;
      tmin = std::min(tmin, e.u);
    }
  }
  const double mid = 0.5 * (a + b);
  if (!has_peak && !has_trough && !(before && after)) {
    const double u = run.eval(mid).first;
    return {mid, u, u};
  }
  if (!has_peak || !has_trough)
    throw EmptyWindow("window [" + std::to_string(a) + ", " + std::to_string(b) + "] is shorter than one oscillation");
  return {mid, tmin, pmax};
}

std::vector<EnvelopeRow> extract_envelope(const OracleRun& run, double window) {
  if (!(window > 0)) throw EmptyWindow("window must be positive");
  std::vector<EnvelopeRow> out;
  for (double a = run.t0; a + window <= run.t1 + 1e-12; a += window) out.push_back(envelope_window(run, a, a + window));
  return out;
}

}  // namespace p2asym
