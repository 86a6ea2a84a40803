#include "intergain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace intergain {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

SensitivityReport sensitivity_analysis(const GainMatrix& g, const std::string& proxy_model,
                                       const SensitivityOptions& opts) {
  const auto proxy_row = g.model_index(proxy_model);
  if (!proxy_row) throw Error("sensitivity: proxy model '" + proxy_model + "' not in matrix");

  std::optional<std::vector<std::string>> pool;
  if (opts.exclude_proxy) {
    std::vector<std::string> rest;
    for (const auto& id : g.model_ids)
      if (id != proxy_model) rest.push_back(id);
    if (rest.empty()) throw Error("sensitivity: no models left after excluding the proxy");
    pool = std::move(rest);
  }
  const std::vector<double> maxes = max_gain(g, pool);

  SensitivityReport rep;
  rep.proxy_model = proxy_model;
  for (std::size_t j = 0; j < g.cols(); ++j) {
    if (g.missing(*proxy_row, j)) {
      ++rep.dropped_targets;
      continue;
    }
    if (is_missing_value(maxes[j])) {
      ++rep.dropped_targets;
      continue;
    }
    rep.target_ids.push_back(g.target_ids[j]);
    rep.proxy_gain.push_back(g.mean_at(*proxy_row, j));
    rep.max_gain.push_back(maxes[j]);
    rep.sensitive.push_back(g.mean_at(*proxy_row, j) > opts.flag_threshold);
  }
  rep.small_sample = rep.target_ids.size() < 3;
  rep.pearson = pearson(rep.proxy_gain, rep.max_gain, opts.correlation);
  rep.spearman = spearman(rep.proxy_gain, rep.max_gain, opts.correlation);
  return rep;
}

SymmetryResult symmetry_score(std::span<const double> m, std::size_t n) {
  if (m.size() != n * n) throw Error("symmetry_score: matrix is not square");
  double ss = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double sym = 0.5 * (m[i * n + j] + m[j * n + i]);
      const double skew = 0.5 * (m[i * n + j] - m[j * n + i]);
      ss += sym * sym;
      sv += skew * skew;
    }
  }
  SymmetryResult res;
  res.norm_symmetric = std::sqrt(ss);
  res.norm_skew = std::sqrt(sv);
  const double denom = res.norm_symmetric + res.norm_skew;
  if (denom == 0.0) throw DegenerateError("symmetry_score: zero matrix");
  res.s = (res.norm_symmetric - res.norm_skew) / denom;
  return res;
}

SymmetryResult symmetry_score(const GainMatrix& g) {
  if (g.rows() != g.cols()) throw Error("symmetry_score: matrix is not square");
  const std::size_t n = g.rows();
  // Column j of the dense view is the target with the same id as model j.
  std::vector<std::size_t> col_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto j = g.target_index(g.model_ids[i]);
    if (!j) throw Error("symmetry_score: model id '" + g.model_ids[i] + "' has no matching target");
    col_of[i] = *j;
  }
  std::vector<double> dense(n * n);
  std::size_t n_missing = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (g.missing(i, col_of[j])) {
        ++n_missing;
        continue;
      }
      dense[i * n + j] = g.mean_at(i, col_of[j]);
    }
  }
  if (n_missing > 0)
    throw Error("symmetry_score: " + std::to_string(n_missing) + " missing cells; need a complete matrix");
  return symmetry_score(dense, n);
}

GroupGainTable group_gain_table(const GainMatrix& g, const GroupLabeling& model_groups,
                                const GroupLabeling& target_groups,
                                const PermutationConfig& cfg) {
  for (const auto& [id, grp] : model_groups.by_id)
    if (!g.model_index(id))
      throw ValidationError("group_gain_table: labeled model '" + id + "' not in matrix");
  for (const auto& [id, grp] : target_groups.by_id)
    if (!g.target_index(id))
      throw ValidationError("group_gain_table: labeled target '" + id + "' not in matrix");
  if (model_groups.by_id.empty() || target_groups.by_id.empty())
    throw Error("group_gain_table: empty group labeling");

  GroupGainTable table;
  table.source_groups = model_groups.group_names();
  table.target_groups = target_groups.group_names();

  const auto src_index = [&](const std::string& grp) {
    return static_cast<std::size_t>(
        std::find(table.source_groups.begin(), table.source_groups.end(), grp) -
        table.source_groups.begin());
  };
  const auto tgt_index = [&](const std::string& grp) {
    return static_cast<std::size_t>(
        std::find(table.target_groups.begin(), table.target_groups.end(), grp) -
        table.target_groups.begin());
  };

  const std::size_t n_cells = table.source_groups.size() * table.target_groups.size();
  std::vector<double> sums(n_cells, 0.0);
  table.count.assign(n_cells, 0);
  // Per (target group, source group) value lists for the ANOVA.
  std::map<std::string, std::map<std::string, std::vector<double>>> anova_values;

  for (const auto& [mid, mgrp] : model_groups.by_id) {
    const std::size_t i = *g.model_index(mid);
    for (const auto& [tid, tgrp] : target_groups.by_id) {
      if (mid == tid) continue;  // same-dataset cells are a separate regime
      const std::size_t j = *g.target_index(tid);
      if (g.missing(i, j)) continue;
      const std::size_t cell = src_index(mgrp) * table.target_groups.size() + tgt_index(tgrp);
      sums[cell] += g.mean_at(i, j);
      ++table.count[cell];
      anova_values[tgrp][mgrp].push_back(g.mean_at(i, j));
    }
  }

  table.mean.assign(n_cells, kNaN);
  for (std::size_t c = 0; c < n_cells; ++c)
    if (table.count[c] > 0) table.mean[c] = sums[c] / table.count[c];

  for (const auto& tgrp : table.target_groups) {
    auto it = anova_values.find(tgrp);
    if (it == anova_values.end() || it->second.size() < 2) {
      table.anova_notes[tgrp] = "fewer than 2 source groups with data";
      continue;
    }
    try {
      table.anova[tgrp] = anova_oneway(it->second, cfg);
    } catch (const DegenerateError& e) {
      table.anova_notes[tgrp] = e.what();
    }
  }
  return table;
}

CorrelationPair metadata_correlation(const GainMatrix& g, Axis axis, const Metadata& metadata,
                                     const std::string& key, const PermutationConfig& cfg) {
  const DescriptiveStats stats = descriptive(g, axis);
  std::vector<double> xs, ys;
  for (std::size_t a = 0; a < stats.ids.size(); ++a) {
    if (stats.n[a] == 0) continue;
    auto id_it = metadata.numeric.find(stats.ids[a]);
    if (id_it == metadata.numeric.end()) continue;
    auto key_it = id_it->second.find(key);
    if (key_it == id_it->second.end()) continue;
    xs.push_back(key_it->second);
    ys.push_back(stats.mean[a]);
  }
  if (xs.size() < 3)
    throw Error("metadata_correlation: key '" + key + "' present on " + std::to_string(xs.size()) +
                " ids, need >= 3");
  return correlation_pair(xs, ys, cfg);
}

namespace {

// Per-id summary of one matrix for cross-matrix comparison.
std::pair<std::vector<std::string>, std::vector<double>> quantity_series(const GainMatrix& g,
                                                                         CrossQuantity q) {
  switch (q) {
    case CrossQuantity::model_mean: {
      const DescriptiveStats d = descriptive(g, Axis::models);
      return {d.ids, d.mean};
    }
    case CrossQuantity::target_mean: {
      const DescriptiveStats d = descriptive(g, Axis::targets);
      return {d.ids, d.mean};
    }
    case CrossQuantity::target_max_gain:
      return {g.target_ids, max_gain(g)};
  }
  throw Error("cross_matrix_correlation: unknown quantity");
}

}  // namespace

CorrelationPair cross_matrix_correlation(const GainMatrix& a, const GainMatrix& b,
                                         CrossQuantity quantity, const PermutationConfig& cfg) {
  const auto [ids_a, vals_a] = quantity_series(a, quantity);
  const auto [ids_b, vals_b] = quantity_series(b, quantity);

  std::map<std::string, double> by_id_b;
  for (std::size_t k = 0; k < ids_b.size(); ++k)
    if (!is_missing_value(vals_b[k])) by_id_b[ids_b[k]] = vals_b[k];

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < ids_a.size(); ++k) {
    if (is_missing_value(vals_a[k])) continue;
    auto it = by_id_b.find(ids_a[k]);
    if (it == by_id_b.end()) continue;
    xs.push_back(vals_a[k]);
    ys.push_back(it->second);
  }
  if (xs.size() < 3)
    throw Error("cross_matrix_correlation: only " + std::to_string(xs.size()) +
                " shared ids, need >= 3");
  return correlation_pair(xs, ys, cfg);
}

}  // namespace intergain
