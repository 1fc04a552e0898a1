#pragma once

#include <utility>
#include <vector>

#include "p2asym/ode.hpp"

namespace p2asym {

// Direct integration of eps^2 u'' + 2u^3 + t u = 1.

enum class EventKind { Peak, Trough };

struct OracleEvent {
  double t;
  double u;
  EventKind kind;
};

struct OracleConfig {
  double eps = 1e-2;
  double t0 = 0.0;
  double t1 = 0.0;
  double tol = 1e-10;
  bool record_samples = true;
};

struct OracleSample {
  double t, u, du;
};

class OracleRun {
 public:
  double eps = 0.0, t0 = 0.0, t1 = 0.0, tol = 0.0;
  std::vector<OracleSample> samples;
  std::vector<OracleEvent> events;
  std::size_t steps = 0;
  double energy_drift = 0.0;  // |Delta H - int dH/dt dt| / (t1 - t0)

  // (u, u') at t via quintic Hermite on the accepted steps.
  std::pair<double, double> eval(double t) const;
  void build_track();

 private:
  ode::QuinticTrack track_u_;
};

// Start on the slow branch: u = u_1 + eps^2 u1c, u' from a 5-point stencil.
std::pair<double, double> initial_condition(double t0, double eps);

OracleRun solve_p2(const OracleConfig& cfg);

struct EnvelopeRow {
  double t;  // window centre
  double u_min;
  double u_max;
};

// Per-window extremes of peaks and troughs. A window free of events with
// no events on both sides is treated as slow motion and returns u(t_mid)
// twice; an oscillatory window lacking a peak or a trough throws EmptyWindow.
std::vector<EnvelopeRow> extract_envelope(const OracleRun& run, double window);

// Envelope of a single window [a, b].
EnvelopeRow envelope_window(const OracleRun& run, double a, double b);

}  // namespace p2asym
