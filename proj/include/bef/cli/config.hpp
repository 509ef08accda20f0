#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bef/boundary.hpp"
#include "bef/model.hpp"

namespace bef::cli {

/// coefficient * (Pauli string on `offsets`), stamped per `placement`.
struct CustomTermConfig {
  std::vector<int> offsets;
  std::string paulis;
  double coefficient = 1.0;
  Placement placement = Placement::Bulk;

  bool operator==(const CustomTermConfig&) const = default;
};

struct ModelConfig {
  std::string id;
  Family family = Family::TransverseFieldIsing;
  std::map<std::string, double> couplings;
  int interaction_range = 2;
  std::vector<CustomTermConfig> terms;

  bool operator==(const ModelConfig&) const = default;
  ModelSpec to_spec() const;
};

struct SolverConfig {
  double tol = 1e-11;
  int max_iter = 4000;
  std::uint64_t seed = 20140101;
  double degeneracy_tol = 1e-8;
  int krylov_dim = 120;
  double memory_budget_mb = 2048.0;

  bool operator==(const SolverConfig&) const = default;
};

struct BoundaryConfig {
  int fresh_state = 0;
  bool allow_degenerate = false;
  double noise_floor = 1e-12;
  int fit_r_min = 2;

  bool operator==(const BoundaryConfig&) const = default;
};

struct SandwichSuite {
  bool enabled = false;
  std::vector<int> m;

  bool operator==(const SandwichSuite&) const = default;
};

struct CorrelationSuite {
  bool enabled = false;
  int bridge_left = 0;  // 0: (n - 1) / 2
  int n = 0;            // 0: n_range.max
  IntRange r{2, 4};
  std::vector<std::string> pairs{"XX", "ZZ"};

  bool operator==(const CorrelationSuite&) const = default;
};

struct EntropySuite {
  bool enabled = false;
  int m = 0;
  IntRange s{0, 0};  // min 0: m + 1 .. n_range.max

  bool operator==(const EntropySuite&) const = default;
};

struct AreaLawSuite {
  bool enabled = false;
  int m = 0;
  int q = 0;
  int n = 0;  // 0: n_range.max

  bool operator==(const AreaLawSuite&) const = default;
};

struct SuitesConfig {
  SandwichSuite sandwich;
  CorrelationSuite correlation;
  EntropySuite entropy;
  AreaLawSuite area_law;

  bool operator==(const SuitesConfig&) const = default;
};

struct GapScanConfig {
  std::string parameter;
  std::vector<double> values;

  bool operator==(const GapScanConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "bef_out";
  std::vector<std::string> formats{"csv", "json"};

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  std::vector<ModelConfig> models;
  SiteOrdering ordering;
  IntRange n_range{6, 12};
  IntRange r_range{1, 5};
  SolverConfig solver;
  BoundaryConfig boundary;
  SuitesConfig suites;
  GapScanConfig gap_scan;
  OutputConfig output;
  int threads = 1;
  std::vector<std::string> inputs;  // report: JSON files to collate

  bool operator==(const ExperimentConfig&) const = default;

  bool wants(const std::string& format) const;
  BoundaryOptions boundary_options(int max_sites) const;
};

constexpr int kHardCap = 22;

/// Hard cap on n, raised by the BEF_MAX_N environment variable.
int max_sites_cap();

/// Parses YAML text; errors carry ConfigParse with line and field.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
std::string serialize_config(const ExperimentConfig& config);

/// Range, suite and cap checks. Throws ConfigParse or BudgetExceeded.
void check_config(const ExperimentConfig& config);

}  // namespace bef::cli
