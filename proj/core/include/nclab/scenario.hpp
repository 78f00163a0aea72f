#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nclab/algebra.hpp"
#include "nclab/averages.hpp"
#include "nclab/contraction.hpp"
#include "nclab/maximal.hpp"
#include "nclab/weights.hpp"

namespace nclab {

/// Contraction as written in a scenario. Composite kinds hold their parts
/// unbuilt, so construction errors surface in the verify task.
struct ContractionDescription {
  ContractionKind kind = ContractionKind::scaled_unitary;
  ContractionSpec leaf;
  std::vector<double> weights;
  std::vector<ContractionDescription> parts;
};

AbsoluteContraction build_contraction(const AlgebraPtr& algebra, const ContractionDescription& description,
                                      double tol = kDefaultTolerance);

struct AverageTaskConfig {
  Box box = Box::cube(1, 1, 1);
  Evaluator evaluator = Evaluator::grid;
  int threads = 1;
  /// Approximant level for the limit of Besicovitch weights.
  std::optional<double> limit_epsilon;
};

struct MaximalTaskConfig {
  double p = 2.0;
  std::vector<int> cutoffs{4, 8, 16, 32};
  double cauchy_slack = 0.05;
};

struct BesicovitchTaskConfig {
  double epsilon = 0.05;
  MultiIndex cutoff = MultiIndex::constant(1, 1);
  int onset = 1;
};

struct CertifyTaskConfig {
  double p = 2.0;
  double epsilon = 0.01;
  std::optional<double> lambda;
  /// Residual box is [1, box_upper]^d.
  int box_upper = 64;
  std::vector<int> onsets{8, 16, 32, 64};
};

struct ScenarioConfig {
  std::string name;
  /// FNV-1a digest of the configuration bytes and overrides, hex encoded.
  std::string digest;
  std::optional<std::uint64_t> seed;
  AlgebraPtr algebra;
  std::vector<ContractionDescription> contractions;
  Weight weight;
  Element x;
  double p = 2.0;
  double tolerance = kDefaultTolerance;
  std::int64_t budget = kDefaultBudget;
  DominantOptions dominant;

  std::optional<AverageTaskConfig> average;
  std::optional<MaximalTaskConfig> maximal;
  std::optional<BesicovitchTaskConfig> besicovitch;
  std::optional<CertifyTaskConfig> certify;

  int dimension() const noexcept { return static_cast<int>(contractions.size()); }
};

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
};

/// Parses a JSON scenario. Relative file references resolve against base_dir.
ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {},
                              const ScenarioOverrides& overrides = {});

ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

std::string fnv1a_hex(std::string_view bytes);

}  // namespace nclab
