#pragma once

#include <string>
#include <vector>

#include "p2asym/driver.hpp"
#include "p2asym/sample.hpp"

namespace p2asym {

struct ExportRow {
  double t = 0.0;
  double u = 0.0;
  std::string regime;
  double residual = 0.0;
  std::string source;
};

ExportRow to_row(const SolutionSample& s, const std::string& source);
ExportRow to_row(const CompositeSample& s);

// Header t,u,regime,residual,source; reals as %.16e (17 significant digits).
std::string rows_to_csv(const std::vector<ExportRow>& rows);
std::vector<ExportRow> parse_csv(const std::string& text);

// Writes the text to `path`; throws IOFailure on empty input or I/O errors.
void write_csv(const std::string& path, const std::vector<ExportRow>& rows);

// Manifest with the run configuration, the constants (t*, u*, E*, k, g3, T)
// and module versions.
std::string manifest_json(const RunConfig& cfg);
void write_text(const std::string& path, const std::string& text);

}  // namespace p2asym
