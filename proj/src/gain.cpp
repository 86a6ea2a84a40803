#include "intergain/gain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace intergain {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) {
  if (xs.empty()) return kNaN;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

std::optional<std::size_t> GainMatrix::model_index(const std::string& id) const {
  // linear: id lists are small and need not be sorted
  auto it = std::find(model_ids.begin(), model_ids.end(), id);
  if (it == model_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - model_ids.begin());
}

std::optional<std::size_t> GainMatrix::target_index(const std::string& id) const {
  auto it = std::find(target_ids.begin(), target_ids.end(), id);
  if (it == target_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - target_ids.begin());
}

GainMatrix compute_gains(const ScoreTable& table) {
  if (table.records.empty()) throw Error("compute_gains: empty score table");

  ScoreTable sorted = table;
  sorted.normalize();

  // Mean baseline per target, accumulated in canonical seed order.
  std::map<std::string, std::vector<double>> baseline_scores;
  for (const auto& b : sorted.baselines) baseline_scores[b.target_id].push_back(b.score);
  std::map<std::string, double> baseline_mean;
  for (const auto& [tid, scores] : baseline_scores) baseline_mean[tid] = mean_of(scores);

  std::set<std::string> model_set, target_set;
  for (const auto& r : sorted.records) {
    model_set.insert(r.model_id);
    target_set.insert(r.target_id);
  }
  for (const auto& tid : target_set) {
    if (!baseline_mean.count(tid))
      throw ValidationError("compute_gains: no baseline records for target '" + tid + "'");
  }

  GainMatrix g;
  g.model_ids.assign(model_set.begin(), model_set.end());
  g.target_ids.assign(target_set.begin(), target_set.end());
  const std::size_t n = g.rows() * g.cols();
  g.mean.assign(n, kNaN);
  g.stddev.assign(n, kNaN);
  g.sem.assign(n, kNaN);
  g.n_seeds.assign(n, 0);

  // Per-cell scores in seed order (records are sorted).
  std::map<std::pair<std::string, std::string>, std::vector<double>> cell_scores;
  for (const auto& r : sorted.records) cell_scores[{r.model_id, r.target_id}].push_back(r.score);

  for (const auto& [key, scores] : cell_scores) {
    const std::size_t i = *g.model_index(key.first);
    const std::size_t j = *g.target_index(key.second);
    const double base = baseline_mean.at(key.second);
    // mean(score) - base rather than mean(score - base): a model whose
    // records duplicate the baseline then gets gain exactly 0.
    std::vector<double> per_seed(scores.size());
    for (std::size_t s = 0; s < scores.size(); ++s) per_seed[s] = scores[s] - base;
    const std::size_t at = g.idx(i, j);
    g.mean[at] = mean_of(scores) - base;
    g.stddev[at] = population_std(per_seed);
    g.sem[at] = g.stddev[at] / std::sqrt(static_cast<double>(per_seed.size()));
    g.n_seeds[at] = static_cast<int>(per_seed.size());
  }
  return g;
}

bool significant_cell(const GainMatrix& g, std::size_t i, std::size_t j, SigStat stat) {
  if (g.missing(i, j)) return false;
  const double disp = stat == SigStat::std_dev ? g.stddev[g.idx(i, j)] : g.sem[g.idx(i, j)];
  return g.mean_at(i, j) > 2.0 * disp;
}

std::vector<double> max_gain(const GainMatrix& g,
                             const std::optional<std::vector<std::string>>& subset) {
  std::vector<std::size_t> rows;
  if (subset) {
    if (subset->empty()) throw Error("max_gain: empty model subset");
    for (const auto& id : *subset) {
      auto i = g.model_index(id);
      if (!i) throw Error("max_gain: model '" + id + "' not in matrix");
      rows.push_back(*i);
    }
  } else {
    rows.resize(g.rows());
    for (std::size_t i = 0; i < g.rows(); ++i) rows[i] = i;
  }

  std::vector<double> out(g.cols(), kNaN);
  for (std::size_t j = 0; j < g.cols(); ++j) {
    bool seen = false;
    double best = 0.0;
    for (std::size_t i : rows) {
      if (g.missing(i, j)) continue;
      const double v = g.mean_at(i, j);
      if (!seen || v > best) best = v;
      seen = true;
    }
    if (seen) out[j] = best;
  }
  return out;
}

DescriptiveStats descriptive(const GainMatrix& g, Axis axis) {
  DescriptiveStats d;
  const bool by_model = axis == Axis::models;
  const std::size_t n_ids = by_model ? g.rows() : g.cols();
  const std::size_t n_other = by_model ? g.cols() : g.rows();
  d.ids = by_model ? g.model_ids : g.target_ids;
  d.mean.assign(n_ids, kNaN);
  d.stddev.assign(n_ids, kNaN);
  d.sem.assign(n_ids, kNaN);
  d.n.assign(n_ids, 0);

  for (std::size_t a = 0; a < n_ids; ++a) {
    std::vector<double> vals;
    vals.reserve(n_other);
    for (std::size_t o = 0; o < n_other; ++o) {
      const std::size_t i = by_model ? a : o;
      const std::size_t j = by_model ? o : a;
      if (!g.missing(i, j)) vals.push_back(g.mean_at(i, j));
    }
    if (vals.empty()) continue;
    d.mean[a] = mean_of(vals);
    d.stddev[a] = population_std(vals);
    d.sem[a] = d.stddev[a] / std::sqrt(static_cast<double>(vals.size()));
    d.n[a] = static_cast<int>(vals.size());
  }
  return d;
}

}  // namespace intergain
