#include "intergain/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "intergain/fixtures.hpp"
#include "intergain/types.hpp"

namespace intergain {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::string> rank_models(std::span<const QualityScore> scores) {
  if (scores.empty()) throw Error("rank_models: no scores");
  std::set<std::string> seen;
  for (const auto& s : scores)
    if (!seen.insert(s.model_id).second)
      throw Error("rank_models: duplicate model id '" + s.model_id + "'");

  std::vector<const QualityScore*> order;
  order.reserve(scores.size());
  for (const auto& s : scores) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const QualityScore* a, const QualityScore* b) {
    if (a->value != b->value) return a->value > b->value;
    return a->model_id < b->model_id;
  });

  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (const auto* s : order) ids.push_back(s->model_id);
  return ids;
}

TopkLoss topk_loss(const GainMatrix& g, std::span<const std::string> ranking, int k,
                   double threshold) {
  if (k < 1 || static_cast<std::size_t>(k) > ranking.size())
    throw Error("topk_loss: k out of range (1.." + std::to_string(ranking.size()) + ")");
  std::vector<std::size_t> rows;
  rows.reserve(ranking.size());
  for (const auto& id : ranking) {
    auto i = g.model_index(id);
    if (!i) throw Error("topk_loss: ranked model '" + id + "' not in matrix");
    rows.push_back(*i);
  }

  TopkLoss res;
  res.k = k;
  res.threshold = threshold;
  res.target_ids = g.target_ids;
  res.loss.assign(g.cols(), kNaN);
  res.max = 0.0;

  double sum = 0.0;
  for (std::size_t j = 0; j < g.cols(); ++j) {
    bool any_all = false, any_top = false;
    double best_all = 0.0, best_top = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t i = rows[r];
      if (g.missing(i, j)) continue;
      const double v = g.mean_at(i, j);
      if (!any_all || v > best_all) best_all = v;
      any_all = true;
      if (r < static_cast<std::size_t>(k)) {
        if (!any_top || v > best_top) best_top = v;
        any_top = true;
      }
    }
    if (!any_all || !any_top) continue;  // not evaluable for this target
    const double loss = best_all - best_top;
    res.loss[j] = loss;
    sum += loss;
    if (res.n_evaluated == 0 || loss > res.max) res.max = loss;
    if (loss > threshold) ++res.n_above;
    ++res.n_evaluated;
  }
  res.avg = res.n_evaluated > 0 ? sum / res.n_evaluated : kNaN;
  if (res.n_evaluated == 0) res.max = kNaN;
  return res;
}

double predict_avg_gain(double lp_value) {
  return kLpPredictorSlope * lp_value + kLpPredictorIntercept;
}

std::vector<QualityScore> rank_by_average(const GainMatrix& g,
                                          std::span<const std::string> target_subset) {
  std::vector<std::size_t> cols;
  if (target_subset.empty()) {
    cols.resize(g.cols());
    for (std::size_t j = 0; j < g.cols(); ++j) cols[j] = j;
  } else {
    for (const auto& id : target_subset) {
      auto j = g.target_index(id);
      if (!j) throw Error("rank_by_average: target '" + id + "' not in matrix");
      cols.push_back(*j);
    }
  }
  if (cols.empty()) throw Error("rank_by_average: empty target subset");

  std::vector<QualityScore> out;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t j : cols) {
      if (g.missing(i, j)) continue;
      sum += g.mean_at(i, j);
      ++n;
    }
    if (n == 0) continue;
    out.push_back(QualityScore{g.model_ids[i], sum / n, QualityKind::avg_gain});
  }
  return out;
}

LpPredictorFit fit_lp_predictor(std::span<const QualityScore> lp,
                                std::span<const QualityScore> avg,
                                const PermutationConfig& cfg) {
  std::map<std::string, double> avg_by_id;
  for (const auto& s : avg)
    if (!avg_by_id.emplace(s.model_id, s.value).second)
      throw Error("fit_lp_predictor: duplicate model id '" + s.model_id + "' in average gains");

  std::vector<double> xs, ys;
  std::set<std::string> seen;
  for (const auto& s : lp) {
    if (!seen.insert(s.model_id).second)
      throw Error("fit_lp_predictor: duplicate model id '" + s.model_id + "' in LP scores");
    auto it = avg_by_id.find(s.model_id);
    if (it == avg_by_id.end()) continue;
    xs.push_back(s.value);
    ys.push_back(it->second);
  }
  if (xs.size() < 3) throw Error("fit_lp_predictor: need >= 3 matched models, have " +
                                 std::to_string(xs.size()));

  const double mx = mean_of(xs), my = mean_of(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DegenerateError("fit_lp_predictor: constant LP values");

  LpPredictorFit fitr;
  fitr.slope = sxy / sxx;
  fitr.intercept = my - fitr.slope * mx;
  fitr.pearson = pearson(xs, ys, cfg);
  fitr.spearman = spearman(xs, ys, cfg);
  fitr.n = static_cast<int>(xs.size());
  return fitr;
}

RankingReport build_ranking_report(const GainMatrix& g, std::span<const QualityScore> scores,
                                   std::span<const int> ks, double threshold) {
  RankingReport rep;
  rep.ranking = rank_models(scores);
  // Only ranked models that actually appear in the matrix enter the regret.
  std::vector<std::string> pool;
  for (const auto& id : rep.ranking)
    if (g.model_index(id)) pool.push_back(id);
  if (pool.empty()) throw Error("build_ranking_report: no ranked model appears in the matrix");
  for (int k : ks) rep.losses.push_back(topk_loss(g, pool, k, threshold));
  return rep;
}

}  // namespace intergain
