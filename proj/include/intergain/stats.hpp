#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "intergain/gain.hpp"

namespace intergain {

enum class CorrMethod { pearson, spearman };

/// p-values come from two-sided permutation tests, not closed-form
/// distributions. n_perm = 0 skips the test (p_value is NaN).
struct PermutationConfig {
  int n_perm = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CorrelationResult {
  double coefficient = 0.0;
  int n = 0;
  double p_value = 0.0;  // NaN when the permutation test was skipped
  CorrMethod method = CorrMethod::pearson;
  int n_perm = 0;
  std::uint64_t seed = 0;
};

struct CorrelationPair {
  CorrelationResult pearson;
  CorrelationResult spearman;
};

/// Sample Pearson r. Requires |x| == |y| >= 2 and both non-constant;
/// the permutation test permutes y with statistic |r|.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y,
                          const PermutationConfig& cfg = {});

/// Pearson over average ranks (mid-rank ties).
CorrelationResult spearman(std::span<const double> x, std::span<const double> y,
                           const PermutationConfig& cfg = {});

CorrelationPair correlation_pair(std::span<const double> x, std::span<const double> y,
                                 const PermutationConfig& cfg = {});

/// 1-based ranks with ties replaced by the average of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

struct AnovaResult {
  double f_statistic = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 0.0;  // NaN when skipped
  std::map<std::string, double> group_means;
  int n_perm = 0;
  std::uint64_t seed = 0;
};

/// Classical one-way F over >= 2 groups of >= 2 values each; p by
/// permutation of group membership. Zero within-variance and singleton
/// groups are degenerate.
AnovaResult anova_oneway(const std::map<std::string, std::vector<double>>& groups,
                         const PermutationConfig& cfg = {});

/// Generic permutation p-value: p = (1 + #{stat(perm) >= stat(data)}) / (1 + n_perm).
/// Each replicate shuffles a fresh copy of `data` with its own
/// (seed, replicate) stream, so the result does not depend on thread count.
/// Requires n_perm >= 100.
double permutation_p(const std::function<double(std::span<const double>)>& statistic,
                     std::span<const double> data, int n_perm, std::uint64_t seed,
                     int threads = 1);

/// Uniformly permutes the non-missing cells of the matrix (whole cells:
/// mean, STD, SEM, seed count move together); the missing mask and the id
/// ordering stay put.
GainMatrix shuffle_gains(const GainMatrix& g, std::uint64_t seed);

/// Runs fn(0..n-1), partitioned over `threads` workers. Each index must
/// write only to its own slot of any shared output.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace intergain
