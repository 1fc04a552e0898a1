#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "p2asym/boutroux.hpp"
#include "p2asym/driver.hpp"
#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/export.hpp"
#include "p2asym/kuzmak.hpp"
#include "p2asym/oracle.hpp"
#include "p2asym/outer_expansion.hpp"
#include "p2asym/p1_layer.hpp"
#include "p2asym/pole_layer.hpp"

using namespace p2asym;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string join(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty())
    std::cout << text;
  else
    write_text(cfg.out, text);
}

std::vector<double> grid(const RunConfig& cfg, std::optional<double> t) {
  if (t) return {*t};
  std::vector<double> g;
  for (int i = 0; i < cfg.points; ++i) g.push_back(cfg.points == 1 ? cfg.t0 : cfg.t0 + (cfg.t1 - cfg.t0) * i / (cfg.points - 1));
  return g;
}

std::string stability_name(Stability s) {
  return s == Stability::Stable ? "stable" : s == Stability::Unstable ? "unstable" : "degenerate";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic regimes of eps^2 u'' + 2u^3 + t u = 1 and a direct ODE oracle"};
  app.require_subcommand(0, 1);

  std::string config_path;
  bool print_config = false;
  std::optional<double> eps, t, t0, t1, tol, phase_a, tau0, tau1;
  std::optional<int> points, pole;
  std::optional<std::string> out, format;
  bool solve_flag = false, eval_flag = false;

  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");
  auto common = [&](CLI::App* s, bool range) {
    s->add_option("--eps", eps, "small parameter");
    s->add_option("--out", out, "output file (default stdout)");
    s->add_option("--format", format, "csv or json");
    if (range) {
      s->add_option("--t", t, "single t");
      s->add_option("--t0", t0, "left end of the t range");
      s->add_option("--t1", t1, "right end of the t range");
      s->add_option("--points", points, "number of t points");
    }
  };
  auto* c_const = app.add_subcommand("constants", "closed-form and solved constants");
  common(c_const, false);
  auto* c_eq = app.add_subcommand("equilibria", "roots of 2u^3 + t u = 1");
  common(c_eq, true);
  auto* c_outer = app.add_subcommand("outer", "region I outer expansion");
  common(c_outer, true);
  auto* c_in1 = app.add_subcommand("inner1", "Painleve-1 layer pole table");
  common(c_in1, false);
  c_in1->add_option("--tau0", tau0, "seed point");
  c_in1->add_option("--tau1", tau1, "end of integration");
  c_in1->add_option("--tol", tol, "integration tolerance");
  auto* c_in2 = app.add_subcommand("inner2", "pole layer around pole k");
  common(c_in2, true);
  c_in2->add_option("--pole", pole, "pole index k")->required();
  auto* c_bt = app.add_subcommand("boutroux", "elliptic regime");
  common(c_bt, true);
  c_bt->add_flag("--solve-g3", solve_flag, "solve the invariants and print them as JSON");
  c_bt->add_flag("--eval", eval_flag, "evaluate the leading elliptic form");
  auto* c_kz = app.add_subcommand("kuzmak", "region IV modulation");
  common(c_kz, true);
  c_kz->add_option("--phase-a", phase_a, "free constant of the phase law");
  auto* c_or = app.add_subcommand("oracle", "direct adaptive integration");
  common(c_or, true);
  c_or->add_option("--tol", tol, "local error tolerance");
  auto* c_co = app.add_subcommand("composite", "regime classification and composite evaluation");
  common(c_co, true);
  auto* c_f1 = app.add_subcommand("figure1", "figure data at eps^2 = 0.1");
  c_f1->add_option("--out", out, "output CSV (envelope rows go to <out>.envelope.csv)");
  c_f1->add_option("--tol", tol, "oracle tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (eps) cfg.eps = *eps;
    if (t0) cfg.t0 = *t0;
    if (t1) cfg.t1 = *t1;
    if (points) cfg.points = *points;
    if (phase_a) cfg.phase_a = *phase_a;
    if (out) cfg.out = *out;
    if (format) cfg.format = *format;
    if (tol) {
      if (c_in1->parsed()) cfg.tol_p1 = *tol;
      if (c_or->parsed() || c_f1->parsed()) cfg.tol_oracle = *tol;
    }
    if (cfg.format != "csv" && cfg.format != "json") throw OutOfValidity("format must be csv or json");
    validate(cfg);
    if (print_config) {
      std::cout << config_to_text(cfg);
      return 0;
    }
    const double ts = t_star();

    if (c_const->parsed()) {
      emit(cfg, manifest_json(cfg));
    } else if (c_eq->parsed()) {
      std::string s = "t,root,stability,discriminant\n";
      for (double x : grid(cfg, t)) {
        const auto e = equilibrium_roots(x);
        for (std::size_t j = 0; j < e.roots.size(); ++j)
          s += join({num(x), num(e.roots[j]), stability_name(classify_branch(x, static_cast<int>(j) + 1)), num(e.discriminant)});
      }
      emit(cfg, s);
    } else if (c_outer->parsed()) {
      std::string s = "t,u,residual,valid_flag\n";
      for (double x : grid(cfg, t)) {
        const auto v = outer_validity(x, cfg.eps, {cfg.M_outer, cfg.outer_a});
        s += join({num(x), num(outer_sum(x, cfg.eps)), num(outer_residual(x, cfg.eps)), v.valid ? "1" : "0"});
      }
      emit(cfg, s);
    } else if (c_in1->parsed()) {
      P1Options po;
      po.tol = cfg.tol_p1;
      po.max_poles = cfg.max_poles;
      auto tr = integrate_p1(tau0.value_or(cfg.p1_tau0), tau1.value_or(cfg.p1_tau1), po);
      first_correction(tr);
      std::string s = "k,tau_k,c_k,a1_minus,b1_minus,b1_plus\n";
      for (const auto& p : tr.poles)
        s += join({std::to_string(p.k), num(p.tau_k), num(p.c_k), num(p.a1_minus), num(p.b1_minus), num(p.b1_plus)});
      emit(cfg, s);
    } else if (c_in2->parsed()) {
      P1Options po;
      po.tol = cfg.tol_p1;
      po.max_poles = std::max(cfg.max_poles, *pole);
      auto tr = integrate_p1(cfg.p1_tau0, cfg.p1_tau1, po);
      first_correction(tr);
      if (*pole < 1 || *pole > static_cast<int>(tr.poles.size())) throw OutOfValidity("pole index out of range");
      const auto fr = make_frame(tr.poles[*pole - 1]);
      std::vector<ExportRow> rows;
      std::vector<double> ts_grid;
      if (t) {
        ts_grid = {*t};
      } else {
        // default window: |theta| < M2 eps^{-1/5} tau_k^{-1/5} around the pole
        const double half = 0.99 * cfg.M2 * std::pow(std::max(std::abs(fr.tau_k), 1.0), -0.2) * std::pow(cfg.eps, 0.6);
        const double tk = ts + std::pow(cfg.eps, 0.8) * fr.tau_k;
        const double a = t0.value_or(tk - half), b = t1.value_or(tk + half);
        for (int i = 0; i < cfg.points; ++i) ts_grid.push_back(cfg.points == 1 ? a : a + (b - a) * i / (cfg.points - 1));
      }
      for (double x : ts_grid) rows.push_back(to_row(inner2_eval(x, cfg.eps, fr, {cfg.M2, cfg.M_outer}), "inner2"));
      emit(cfg, rows_to_csv(rows));
    } else if (c_bt->parsed()) {
      const auto P = solve_g3();
      if (solve_flag || !eval_flag) {
        nlohmann::ordered_json j{{"g2", P.g2}, {"g3", P.g3}, {"Omega", P.omega_real}, {"g3_normalized", P.g3n},
                                 {"e1", P.e1}, {"cycle_residual", P.cycle_residual}};
        emit(cfg, j.dump(2) + "\n");
      } else {
        Composite comp(cfg);
        std::vector<ExportRow> rows;
        for (double x : grid(cfg, t))
          rows.push_back(to_row(elliptic_leading_eval(x, cfg.eps, P, &comp.phase(), {cfg.M_pole, cfg.M_outer, 1.0}),
                                "boutroux"));
        emit(cfg, rows_to_csv(rows));
      }
    } else if (c_kz->parsed()) {
      const auto dc = solve_k();
      if (cfg.format == "json") {
        nlohmann::ordered_json j{{"k", dc.k},     {"C_star", dc.C_star}, {"T", dc.T},
                                 {"mu1", dc.mu1}, {"nu1", dc.nu1},       {"gamma1", dc.gamma1}};
        emit(cfg, j.dump(2) + "\n");
      } else {
        std::vector<double> g = grid(cfg, t);
        if (!t && cfg.t0 <= ts) {
          // default range starts at the bifurcation; keep only t > t*
          std::vector<double> h;
          for (double x : g)
            if (x > ts) h.push_back(x);
          g = h;
        }
        KuzmakOptions ko;
        ko.phase_a = cfg.phase_a;
        ko.phi0 = cfg.phi0;
        const auto states = solve_phase(g, dc, ko);
        std::string s = "t,E,alpha,beta,m,n,Sprime,S\n";
        for (const auto& st : states)
          s += join({num(st.t), num(st.E), num(st.alpha), num(st.beta), num(st.m), num(st.n), num(st.S_prime), num(st.S)});
        emit(cfg, s);
      }
    } else if (c_or->parsed()) {
      OracleConfig oc;
      oc.eps = cfg.eps;
      oc.t0 = cfg.t0;
      oc.t1 = cfg.t1;
      oc.tol = cfg.tol_oracle;
      const auto run = solve_p2(oc);
      std::string s = "t,u,du,event_flag\n";
      std::size_t e = 0;
      for (const auto& smp : run.samples) {
        while (e < run.events.size() && run.events[e].t <= smp.t) {
          const auto& ev = run.events[e++];
          s += join({num(ev.t), num(ev.u), num(0.0), ev.kind == EventKind::Peak ? "1" : "-1"});
        }
        s += join({num(smp.t), num(smp.u), num(smp.du), "0"});
      }
      emit(cfg, s);
    } else if (c_co->parsed()) {
      Composite comp(cfg);
      std::vector<ExportRow> rows;
      if (t) {
        rows.push_back(to_row(comp.eval(*t)));
      } else {
        int gaps = 0;
        for (const auto& cs : comp.sweep(cfg.t0, cfg.t1, cfg.points, &gaps)) rows.push_back(to_row(cs));
        if (gaps) std::cerr << gaps << " of " << cfg.points << " points have no valid regime\n";
      }
      if (cfg.format == "json") {
        emit(cfg, manifest_json(cfg));
      } else {
        emit(cfg, rows_to_csv(rows));
        if (!cfg.out.empty()) write_text(cfg.out + ".json", manifest_json(cfg));
      }
    } else if (c_f1->parsed()) {
      const auto rep = figure1(cfg.tol_oracle);
      std::string s = "t,u,du,event_flag\n";
      for (const auto& smp : rep.run.samples) s += join({num(smp.t), num(smp.u), num(smp.du), "0"});
      std::string env = "t,u,kind,beta,alpha\n";
      for (const auto& e : rep.events) env += join({num(e.t), num(e.u), e.peak ? "peak" : "trough", num(e.beta), num(e.alpha)});
      emit(cfg, s);
      if (!cfg.out.empty()) write_text(cfg.out + ".envelope.csv", env);
      std::cerr << "slow branch max deviation " << rep.branch_deviation << (rep.branch_monotone ? " (monotone)" : " (not monotone)")
                << "; " << rep.peaks << " peaks, " << rep.troughs << " troughs after t*+0.1; envelope excess "
                << rep.envelope_excess << "\n";
    } else {
      std::cout << app.help();
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::Validity ? 2 : 3;
  }
  return 0;
}
