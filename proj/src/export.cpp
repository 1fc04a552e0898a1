#include "p2asym/export.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "p2asym/boutroux.hpp"
#include "p2asym/equilibria.hpp"
#include "p2asym/errors.hpp"
#include "p2asym/kuzmak.hpp"

namespace p2asym {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IOFailure("bad number in CSV: '" + s + "'");
  return v;
}

constexpr const char* kHeader = "t,u,regime,residual,source";

}  // namespace

ExportRow to_row(const SolutionSample& s, const std::string& source) {
  return {s.t, s.u, regime_name(s.regime), s.residual, source};
}

ExportRow to_row(const CompositeSample& s) { return {s.sample.t, s.sample.u, s.tag.name(), s.sample.residual, regime_name(s.sample.regime)}; }

std::string rows_to_csv(const std::vector<ExportRow>& rows) {
  if (rows.empty()) throw IOFailure("nothing to export");
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : rows) {
    // regime tags may contain commas ("Overlap(II,I)")
    const bool quote = r.regime.find(',') != std::string::npos;
    out += real(r.t) + "," + real(r.u) + "," + (quote ? "\"" + r.regime + "\"" : r.regime) + "," + real(r.residual) +
           "," + r.source + "\n";
  }
  return out;
}

std::vector<ExportRow> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw IOFailure("missing CSV header");
  std::vector<ExportRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    if (cells.size() != 5) throw IOFailure("CSV row with " + std::to_string(cells.size()) + " cells");
    rows.push_back({parse_real(cells[0]), parse_real(cells[1]), cells[2], parse_real(cells[3]), cells[4]});
  }
  return rows;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOFailure("cannot open " + path);
  out << text;
  if (!out) throw IOFailure("write failed for " + path);
}

void write_csv(const std::string& path, const std::vector<ExportRow>& rows) { write_text(path, rows_to_csv(rows)); }

std::string manifest_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  auto& c = j["config"];
  std::istringstream is(config_to_text(cfg));
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    c[line.substr(0, eq)] = line.substr(eq + 3);
  }
  const auto cp = critical_point();
  const auto dc = solve_k();
  const auto ep = solve_g3();
  j["constants"] = {{"t_star", cp.t_star}, {"u_star", cp.u_star}, {"E_star", cp.E_star},
                    {"k", dc.k},           {"g2", ep.g2},         {"g3", ep.g3},
                    {"Omega", ep.omega_real}, {"T", dc.T}};
  j["modules"] = {{"equilibria", "1.0"}, {"outer_expansion", "1.0"}, {"p1_layer", "1.0"}, {"pole_layer", "1.0"},
                  {"boutroux", "1.0"},   {"kuzmak", "1.0"},          {"oracle", "1.0"},   {"driver", "1.0"}};
  return j.dump(2) + "\n";
}

}  // namespace p2asym
