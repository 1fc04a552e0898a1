#include "p2asym/driver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/outer_expansion.hpp"

namespace p2asym {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::OuterI:
      return "I";
    case Regime::PainleveII:
      return "II";
    case Regime::PoleIII:
      return "III";
    case Regime::EllipticII_inf:
      return "II_inf";
    case Regime::KuzmakIV:
      return "IV";
    case Regime::Oracle:
      return "oracle";
  }
  return "?";
}

void validate(const RunConfig& c) {
  if (!(c.eps > 0)) throw OutOfValidity("eps must be positive");
  if (!(c.tol_oracle > 0) || !(c.tol_p1 > 0)) throw OutOfValidity("tolerances must be positive");
  if (!(c.M_outer >= 1) || !(c.M_pole >= 1) || !(c.M_kuz >= 1) || !(c.M2 >= 1))
    throw OutOfValidity("margins must be >= 1");
  if (!(c.outer_a > 0) || !(c.kuzmak_a > 0)) throw OutOfValidity("region widths must be positive");
  if (c.points < 1) throw OutOfValidity("points must be >= 1");
}

namespace {

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IOFailure("bad number for " + key + ": '" + s + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& s) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IOFailure("bad integer for " + key + ": '" + s + "'");
  return v;
}

#define P2_REAL(name) \
  {#name, {[](const RunConfig& c) { return fmt(c.name); }, [](RunConfig& c, const std::string& v) { c.name = parse_double(#name, v); }}}
#define P2_INT(name) \
  {#name, {[](const RunConfig& c) { return std::to_string(c.name); }, [](RunConfig& c, const std::string& v) { c.name = parse_int(#name, v); }}}
#define P2_TEXT(name) \
  {#name, {[](const RunConfig& c) { return c.name; }, [](RunConfig& c, const std::string& v) { c.name = v; }}}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      P2_REAL(eps),      P2_REAL(t0),     P2_REAL(t1),       P2_INT(points),   P2_REAL(tol_oracle),
      P2_REAL(tol_p1),   P2_REAL(M_outer), P2_REAL(M_pole),  P2_REAL(M_kuz),   P2_REAL(M2),
      P2_REAL(outer_a),  P2_REAL(kuzmak_a), P2_REAL(phase_a), P2_REAL(phi0),   P2_REAL(p1_tau0),
      P2_REAL(p1_tau1),  P2_INT(max_poles), P2_TEXT(out),     P2_TEXT(format),
  };
  return f;
}

#undef P2_REAL
#undef P2_INT
#undef P2_TEXT

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int precedence(Regime r) {
  switch (r) {
    case Regime::PoleIII:
      return 0;
    case Regime::PainleveII:
      return 1;
    case Regime::EllipticII_inf:
      return 2;
    case Regime::KuzmakIV:
      return 3;
    case Regime::OuterI:
      return 4;
    default:
      return 5;
  }
}

constexpr Regime kAll[] = {Regime::PoleIII, Regime::PainleveII, Regime::EllipticII_inf, Regime::KuzmakIV,
                           Regime::OuterI};

}  // namespace

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, f] : fields()) os << k << " = " << f.get(cfg) << "\n";
  return os.str();
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IOFailure("line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    const auto& fs = fields();
    const auto it = std::find_if(fs.begin(), fs.end(), [&](const auto& p) { return p.first == key; });
    if (it == fs.end()) throw IOFailure("line " + std::to_string(n) + ": unknown key '" + key + "'");
    it->second.set(base, val);
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

Regime RegimeTag::innermost() const {
  if (regimes.empty()) throw NoValidRegime("no regime is valid here");
  return regimes.front();
}

std::string RegimeTag::name() const {
  if (regimes.empty()) return "none";
  if (regimes.size() == 1) return regime_name(regimes[0]);
  std::string s = "Overlap(";
  for (std::size_t i = 0; i < regimes.size(); ++i) s += (i ? "," : "") + regime_name(regimes[i]);
  return s + ")";
}

Composite::Composite(const RunConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  P1Options po;
  po.tol = cfg_.tol_p1;
  po.max_poles = cfg_.max_poles;
  p1_ = integrate_p1(cfg_.p1_tau0, cfg_.p1_tau1, po);
  first_correction(p1_);
  for (const auto& p : p1_.poles) frames_.push_back(make_frame(p));

  elliptic_ = solve_g3();
  lame_ = lame_data(elliptic_);
  const double tau_max = std::pow(cfg_.eps, -0.8) / cfg_.M_outer;
  // the phase constant is fixed by matching the lattice to the computed poles
  const double shift = p1_.poles.size() >= 5 ? lattice_phase_shift(p1_.poles, elliptic_) : 0.0;
  phase_ = sigma0_solve(chi_of_tau(tau_max, cfg_.eps), cfg_.eps, p1_.poles, elliptic_, lame_, shift);

  KuzmakOptions ko;
  ko.phase_a = cfg_.phase_a;
  ko.phi0 = cfg_.phi0;
  ko.M_kuz = cfg_.M_kuz;
  ko.a_max = cfg_.kuzmak_a;
  kuzmak_ = solve_phase(solve_k(), ko);
}

bool Composite::try_eval(Regime r, double t, SolutionSample& out) const {
  const double eps = cfg_.eps;
  try {
    switch (r) {
      case Regime::OuterI:
        out = outer_eval(t, eps, {cfg_.M_outer, cfg_.outer_a});
        return true;
      case Regime::PainleveII:
        out = inner1_eval(t, eps, p1_, {cfg_.M_pole, cfg_.M_outer});
        return true;
      case Regime::PoleIII: {
        // nearest pole whose layer is valid
        const double tau = (t - t_star()) * std::pow(eps, -0.8);
        const PoleLayerFrame* best = nullptr;
        for (const auto& f : frames_)
          if (!best || std::abs(tau - f.tau_k) < std::abs(tau - best->tau_k)) best = &f;
        if (!best) return false;
        out = inner2_eval(t, eps, *best, {cfg_.M2, cfg_.M_outer});
        return true;
      }
      case Regime::EllipticII_inf:
        out = elliptic_leading_eval(t, eps, elliptic_, &phase_, {cfg_.M_pole, cfg_.M_outer, 1.0});
        return true;
      case Regime::KuzmakIV:
        out = kuzmak_eval(t, eps, kuzmak_);
        return true;
      default:
        return false;
    }
  } catch (const OutOfValidity&) {
    return false;
  } catch (const NearPole&) {
    return false;
  }
}

RegimeTag Composite::classify(double t) const {
  RegimeTag tag;
  SolutionSample s;
  for (Regime r : kAll)
    if (try_eval(r, t, s)) tag.regimes.push_back(r);
  std::stable_sort(tag.regimes.begin(), tag.regimes.end(),
                   [](Regime a, Regime b) { return precedence(a) < precedence(b); });
  return tag;
}

CompositeSample Composite::eval(double t) const {
  CompositeSample cs;
  for (Regime r : kAll) {
    SolutionSample s;
    if (try_eval(r, t, s)) {
      cs.tag.regimes.push_back(r);
      cs.candidates.push_back(s);
    }
  }
  if (cs.candidates.empty())
    throw NoValidRegime("no regime is valid at t = " + fmt(t) + ", eps = " + fmt(cfg_.eps));
  const auto best = std::min_element(cs.candidates.begin(), cs.candidates.end(),
                                     [](const auto& a, const auto& b) { return a.residual < b.residual; });
  cs.sample = *best;
  return cs;
}

std::vector<CompositeSample> Composite::sweep(double t0, double t1, int points, int* gaps) const {
  if (points < 1) throw OutOfValidity("sweep needs at least one point");
  std::vector<CompositeSample> all(points);
  std::vector<char> ok(points, 0);
  const int nth = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errs(nth);
  std::vector<std::thread> pool;
  for (int w = 0; w < nth; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < points; i += nth) {
          const double t = points == 1 ? t0 : t0 + (t1 - t0) * i / (points - 1);
          try {
            all[i] = eval(t);
            ok[i] = 1;
          } catch (const NoValidRegime&) {
          }
        }
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  std::vector<CompositeSample> out;
  int g = 0;
  for (int i = 0; i < points; ++i) {
    if (ok[i])
      out.push_back(std::move(all[i]));
    else
      ++g;
  }
  if (gaps) *gaps = g;
  return out;
}

Figure1Report figure1(double tol, double t_right) {
  const double ts = t_star();
  OracleConfig oc;
  oc.eps = std::sqrt(0.1);
  oc.t0 = ts - 1.0;
  oc.t1 = ts + t_right;
  oc.tol = tol;
  Figure1Report r;
  r.run = solve_p2(oc);
  int sign = 0;
  r.branch_monotone = true;
  for (const auto& s : r.run.samples) {
    if (s.t >= ts - 0.1) break;
    r.branch_deviation = std::max(r.branch_deviation, std::abs(s.u - least_root(s.t)));
    const int sg = (s.du > 0) - (s.du < 0);
    if (sign != 0 && sg != 0 && sg != sign) r.branch_monotone = false;
    if (sg != 0) sign = sg;
  }
  double E = -1.0;
  for (const auto& e : r.run.events) {
    if (e.t < ts - 0.1) r.branch_monotone = false;
    if (e.t <= ts + 0.1) continue;
    const auto st = solve_E(e.t, E < 0 ? E_guess_near_degeneration(e.t) : E);
    E = st.E;
    const bool peak = e.kind == EventKind::Peak;
    r.events.push_back({e.t, e.u, peak, st.beta, st.alpha});
    (peak ? r.peaks : r.troughs)++;
    r.envelope_excess = std::max({r.envelope_excess, st.beta - 0.1 - e.u, e.u - st.alpha - 0.1});
    r.envelope_gap = std::max(r.envelope_gap, std::abs(e.u - (peak ? st.alpha : st.beta)));
  }
  return r;
}

}  // namespace p2asym
