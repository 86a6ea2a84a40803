#pragma once

#include <cstdint>

#include "intergain/decomposition.hpp"
#include "intergain/types.hpp"

namespace intergain {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Synthetic score tables drawn from the decomposition model itself:
/// score(m_i, t_j, seed) = baseline + (b_i + t_j) * t'_j + noise.
/// Defaults mirror the reference experiment's 22 x 22 x 5 regime.
struct GeneratorSpec {
  int n_models = 22;
  int n_targets = 22;
  int n_seeds = 5;
  Range b_range{-3.0, 3.0};
  Range t_range{-2.0, 2.0};
  Range t_prime_range{0.5, 1.5};
  double noise_std = 0.0;
  double baseline_level = 70.0;
  std::uint64_t seed = 0;
  /// Use one shared id set for models and targets (square experiments
  /// where every dataset acts as both source and target).
  bool square_ids = false;
};

struct GeneratedTable {
  ScoreTable table;
  DecompositionModel truth;  // drawn parameters in canonical gauge
  int clamped_scores = 0;
  int clamped_baselines = 0;
};

/// Deterministic per spec.seed. Scores are clamped to [0,100] with clamp
/// events counted; a spec whose scores are all clamped is an error.
GeneratedTable generate(const GeneratorSpec& spec);

}  // namespace intergain
