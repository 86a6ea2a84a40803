#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intergain/gain.hpp"
#include "intergain/stats.hpp"
#include "intergain/types.hpp"

namespace intergain {

struct SensitivityOptions {
  bool exclude_proxy = false;     // drop the proxy from the max-gain pool
  double flag_threshold = 1.0;    // proxy gain above this flags the target sensitive
  PermutationConfig correlation;
};

/// How well one strong model's per-target gains track the max-gains.
struct SensitivityReport {
  std::string proxy_model;
  std::vector<std::string> target_ids;
  std::vector<double> proxy_gain;
  std::vector<double> max_gain;
  std::vector<bool> sensitive;
  CorrelationResult pearson;
  CorrelationResult spearman;
  int dropped_targets = 0;   // targets where the proxy had no cell
  bool small_sample = false; // fewer than 3 targets entered the correlation
};

SensitivityReport sensitivity_analysis(const GainMatrix& g, const std::string& proxy_model,
                                       const SensitivityOptions& opts = {});

/// s = (|S| - |V|) / (|S| + |V|) for M = S + V with S = (M + M^T)/2 and
/// V = (M - M^T)/2, Frobenius norm. +1 on symmetric, -1 on skew-symmetric.
struct SymmetryResult {
  double s = 0.0;
  double norm_symmetric = 0.0;
  double norm_skew = 0.0;
};

/// `m` is row-major n x n. Throws DegenerateError on the zero matrix.
SymmetryResult symmetry_score(std::span<const double> m, std::size_t n);

/// Aligns the matrix columns to its rows by id (model and target id sets
/// must coincide and every cell must be populated).
SymmetryResult symmetry_score(const GainMatrix& g);

/// Group x group mean gains with one-way ANOVA (factor: source group)
/// per target group. Cells where source and target are the same dataset
/// are excluded from every mean.
struct GroupGainTable {
  std::vector<std::string> source_groups;
  std::vector<std::string> target_groups;
  std::vector<double> mean;  // row-major source x target, NaN when empty
  std::vector<int> count;
  std::map<std::string, AnovaResult> anova;        // keyed by target group
  std::map<std::string, std::string> anova_notes;  // target groups where ANOVA was inapplicable
};

GroupGainTable group_gain_table(const GainMatrix& g, const GroupLabeling& model_groups,
                                const GroupLabeling& target_groups,
                                const PermutationConfig& cfg = {});

/// Correlation between a numeric metadata key and per-id mean gain along
/// one axis. Needs the key on >= 3 ids of that axis.
CorrelationPair metadata_correlation(const GainMatrix& g, Axis axis, const Metadata& metadata,
                                     const std::string& key, const PermutationConfig& cfg = {});

enum class CrossQuantity { model_mean, target_mean, target_max_gain };

/// Correlates a per-id summary between two matrices over the id
/// intersection of the relevant axis (>= 3 shared ids). Alignment is by
/// id, never by position.
CorrelationPair cross_matrix_correlation(const GainMatrix& a, const GainMatrix& b,
                                         CrossQuantity quantity,
                                         const PermutationConfig& cfg = {});

}  // namespace intergain
