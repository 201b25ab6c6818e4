#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctl/catalog.hpp"
#include "ctl/conformal.hpp"
#include "ctl/curvature.hpp"
#include "ctl/residual.hpp"

namespace ctl {

const char* tool_version();

enum class OutputFormat { Table, Json };

struct RunConfig {
  /// Exactly one of the two geometry sources.
  std::optional<std::string> catalog;
  std::optional<std::string> spec_path;
  CatalogParams params;

  /// Families ("COMM", "CONF" for the laws, ...), identity ids and law ids.
  /// With all three empty every family and every law runs.
  std::vector<std::string> suites;
  std::vector<std::string> ids;
  std::vector<std::string> laws;

  int points = 8;
  /// Sample points are drawn from mt19937_64 seeded with this value, so a
  /// run is reproducible from its config alone.
  std::uint64_t seed = 0;
  int jet_order = 6;
  /// Replacement tolerance values per class, indexed A, B, C.
  std::array<std::optional<double>, 3> tol_values;

  OutputFormat format = OutputFormat::Table;
  std::optional<std::string> out;
};

/// Defaults with jet_order taken from CTL_JET_ORDER when set.
RunConfig default_run_config();

/// Parses "A=1e-8,C=1e-4" into cfg.tol_values.
void parse_tol_classes(const std::string& text, RunConfig& cfg);

struct ReportRow {
  std::string id;
  std::string family;
  std::string paper_eq;  ///< opaque equation key
  std::string anchor;
  double max_residual = 0;  ///< meaningless when points == 0
  double tol = 0;
  TolClass tol_class = TolClass::A;
  CheckStatus status = CheckStatus::Skipped;
  std::string reason;
  int points = 0;
  std::vector<double> worst_point;

  bool operator==(const ReportRow&) const = default;
};

struct VerificationReport {
  std::string version;
  std::string timestamp;  ///< not covered by the determinism contract
  std::string geometry;
  std::string geometry_hash;
  std::string source;
  int dim = 0;
  int jet_order = 0;
  std::uint64_t seed = 0;
  int points = 0;
  std::vector<std::string> certified;
  std::vector<ReportRow> rows;

  /// Pass iff no row failed or errored; skips are allowed.
  bool passed() const;
  int count(CheckStatus s) const;

  bool operator==(const VerificationReport&) const = default;
};

/// Loads the geometry, certifies its structures and runs the selection.
/// Throws ConfigError / ParseError on bad input and CertificationError when
/// a catalog claim does not hold.
VerificationReport run_verification(const RunConfig& cfg);

std::string report_to_json(const VerificationReport& r, bool with_timestamp = true);
VerificationReport report_from_json(const std::string& text);
std::string render_table(const VerificationReport& r);

/// Geometry named by the config, without running anything.
GeometrySpec load_geometry(const RunConfig& cfg);

/// Frame components of a quantity (or "cotton_trace") at a point.
Tensor eval_quantity(const GeometryInstance& g, const std::string& quantity, std::span<const double> p,
                     int derivs = 0);

/// Components as "index value" lines, twelve digits after the point.
std::string format_components(const Tensor& t);

}  // namespace ctl
