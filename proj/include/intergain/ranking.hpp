#pragma once

#include <span>
#include <string>
#include <vector>

#include "intergain/gain.hpp"
#include "intergain/stats.hpp"

namespace intergain {

enum class QualityKind { lp_probe, avg_gain, custom };

/// One scalar quality value per model: a linear-probe gain, an average
/// gain over a target group, or any user-supplied score.
struct QualityScore {
  std::string model_id;
  double value = 0.0;
  QualityKind kind = QualityKind::custom;
};

/// Descending by value, ties broken lexicographically on model id.
/// Throws on duplicate model ids.
std::vector<std::string> rank_models(std::span<const QualityScore> scores);

/// Lost gain of trusting a static ranking: per target, the max gain over
/// the whole ranked pool minus the best gain among the top-k ranked
/// models. Targets where no ranked model has a cell (or all top-k cells
/// are missing) are NaN and excluded from the aggregates.
struct TopkLoss {
  int k = 0;
  double threshold = 1.0;
  std::vector<std::string> target_ids;
  std::vector<double> loss;  // NaN = not evaluable
  double avg = 0.0;
  double max = 0.0;
  int n_above = 0;      // targets with loss > threshold
  int n_evaluated = 0;  // targets entering the aggregates
};

TopkLoss topk_loss(const GainMatrix& g, std::span<const std::string> ranking, int k,
                   double threshold = 1.0);

/// Average gain predicted from a linear-probe gain with the frozen
/// reference coefficients (see fixtures).
double predict_avg_gain(double lp_value);

/// Per-model mean gain over `target_subset` (all targets when empty) as
/// avg_gain quality scores. Models with no cell on the subset are left out.
std::vector<QualityScore> rank_by_average(const GainMatrix& g,
                                          std::span<const std::string> target_subset = {});

struct LpPredictorFit {
  double slope = 0.0;
  double intercept = 0.0;
  CorrelationResult pearson;
  CorrelationResult spearman;
  int n = 0;
};

/// OLS line avg ~ lp over models present in both lists, plus both
/// correlations. Requires >= 3 matched models and non-constant lp values.
LpPredictorFit fit_lp_predictor(std::span<const QualityScore> lp,
                                std::span<const QualityScore> avg,
                                const PermutationConfig& cfg = {});

struct RankingReport {
  std::vector<std::string> ranking;
  std::vector<TopkLoss> losses;  // one entry per requested k
};

RankingReport build_ranking_report(const GainMatrix& g, std::span<const QualityScore> scores,
                                   std::span<const int> ks, double threshold = 1.0);

}  // namespace intergain
