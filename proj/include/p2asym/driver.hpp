#pragma once

#include <memory>
#include <string>
#include <vector>

#include "p2asym/boutroux.hpp"
#include "p2asym/kuzmak.hpp"
#include "p2asym/oracle.hpp"
#include "p2asym/p1_layer.hpp"
#include "p2asym/pole_layer.hpp"
#include "p2asym/sample.hpp"

namespace p2asym {

// Every default of the CLI lives here; `--print-config` dumps it in the
// same flat `key = value` format that `--config` reads.
struct RunConfig {
  double eps = 1e-2;
  double t0 = -3.3811015779522995;  // t* - 1
  double t1 = -1.3811015779522995;  // t* + 1
  int points = 401;

  double tol_oracle = 1e-10;
  double tol_p1 = 1e-11;

  double M_outer = 5.0;
  double M_pole = 5.0;
  double M_kuz = 5.0;
  double M2 = 2.0;
  double outer_a = 1.0;   // outer region starts at t* - outer_a
  double kuzmak_a = 1.0;  // Kuzmak region ends at t* + kuzmak_a

  double phase_a = 0.0;
  double phi0 = 0.0;

  double p1_tau0 = -30.0;
  double p1_tau1 = 26.0;
  int max_poles = 8;

  std::string out = "";
  std::string format = "csv";
};

// Throws OutOfValidity for non-positive tolerances or margins below 1.
void validate(const RunConfig& cfg);

std::string config_to_text(const RunConfig& cfg);
// `key = value` lines, `#` comments; unknown keys and bad numbers throw IOFailure.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

// Regimes whose validity predicates hold at a point, innermost first.
struct RegimeTag {
  std::vector<Regime> regimes;
  bool overlap() const { return regimes.size() > 1; }
  Regime innermost() const;  // throws NoValidRegime when empty
  std::string name() const;  // "III", "Overlap(II,I)", ...
};

struct CompositeSample {
  SolutionSample sample;
  RegimeTag tag;
  std::vector<SolutionSample> candidates;  // one per valid regime
};

// Precomputed per-eps data of every regime. Immutable after construction,
// so evaluation is safe from several threads.
class Composite {
 public:
  explicit Composite(const RunConfig& cfg);

  RegimeTag classify(double t) const;
  CompositeSample eval(double t) const;
  // Evaluates on `points` equally spaced t in [t0, t1], in parallel.
  // Points without a valid regime are skipped and counted in `gaps`.
  std::vector<CompositeSample> sweep(double t0, double t1, int points, int* gaps = nullptr) const;

  const RunConfig& config() const { return cfg_; }
  const P1Trajectory& p1() const { return p1_; }
  const std::vector<PoleLayerFrame>& frames() const { return frames_; }
  const EllipticParams& elliptic() const { return elliptic_; }
  const PhaseShiftTable& phase() const { return phase_; }
  const KuzmakTable& kuzmak() const { return kuzmak_; }

 private:
  // Sample of one regime, or nothing when its validity predicate fails.
  bool try_eval(Regime r, double t, SolutionSample& out) const;

  RunConfig cfg_;
  P1Trajectory p1_;
  std::vector<PoleLayerFrame> frames_;
  EllipticParams elliptic_;
  LameData lame_;
  PhaseShiftTable phase_;
  KuzmakTable kuzmak_;
};

// Oracle run at eps^2 = 0.1 over [t* - 1, t* + t_right] with the slow-branch
// and envelope diagnostics of the figure.
struct Figure1Event {
  double t, u;
  bool peak;
  double beta, alpha;  // Kuzmak roots at t
};

struct Figure1Report {
  OracleRun run;
  double branch_deviation = 0.0;  // max |u - u_1(t)| for t < t* - 0.1
  bool branch_monotone = false;   // no extremum and fixed sign of u' there
  std::vector<Figure1Event> events;  // extrema with t > t* + 0.1
  int peaks = 0, troughs = 0;
  double envelope_excess = 0.0;  // max over extrema of the distance outside [beta - 0.1, alpha + 0.1]
  double envelope_gap = 0.0;     // max over extrema of |u - alpha| (peaks) or |u - beta| (troughs)
};

Figure1Report figure1(double tol = 1e-10, double t_right = 6.0);

}  // namespace p2asym
