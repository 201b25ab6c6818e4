#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctl/conformal.hpp"
#include "ctl/geometry.hpp"
#include "ctl/soliton.hpp"

namespace ctl {

/// A structure an entry carries, with its own soliton constant.
struct Claim {
  Structure structure;
  double lambda = 0.0;
};

struct CatalogParams {
  std::optional<int> dim;  ///< entry default when unset
  double radius = 1.0;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  int degree = 3;
  double eps = 0.05;
};

struct CatalogEntry {
  std::string name;
  GeometrySpec spec;
  std::vector<Claim> claims;
  std::string note;
};

struct CatalogInfo {
  std::string name;
  std::string summary;
  std::vector<Structure> claims;
  int default_dim;
  int min_dim;
  int max_dim;
};

/// Every entry name in a stable order.
const std::vector<CatalogInfo>& catalog_info();
const CatalogInfo* find_catalog(const std::string& name);

/// Builds the spec of an entry without certifying it.
CatalogEntry build_entry(const std::string& name, const CatalogParams& params = {});

struct ClaimCheck {
  Claim claim;
  double residual = 0.0;
  bool certified = false;
};

/// Re-certifies every claim on the entry's grid. Random entries instead
/// check that the metric is positive definite on the grid.
std::vector<ClaimCheck> certify_entry(const CatalogEntry& entry);

/// build_entry followed by certify_entry; a claim that does not certify
/// throws CertificationError.
CatalogEntry load_entry(const std::string& name, const CatalogParams& params = {});

/// Certified structures and their constants, ready for the verifiers.
VerifyOptions verify_options(const CatalogEntry& entry);

/// n points uniform in the domain box shrunk by 10% towards its centre.
std::vector<std::vector<double>> sample_points(const GeometrySpec& spec, int n, std::uint64_t seed);

/// Names and claims as JSON.
std::string catalog_json();

}  // namespace ctl
