#include "intergain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "intergain/rng.hpp"
#include "intergain/types.hpp"

namespace intergain {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error("correlation: sequence lengths differ (" + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()) + ")");
  if (x.size() < 2) throw Error("correlation: need at least 2 points");
}

// Plain two-pass Pearson r, clamped into [-1, 1] against roundoff.
double pearson_r(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateError("correlation: constant sequence, coefficient undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double permutation_p(const std::function<double(std::span<const double>)>& statistic,
                     std::span<const double> data, int n_perm, std::uint64_t seed, int threads) {
  if (n_perm < 100) throw Error("permutation_p: n_perm must be >= 100");
  const double observed = statistic(data);

  std::vector<char> hits(static_cast<std::size_t>(n_perm), 0);
  parallel_for(static_cast<std::size_t>(n_perm), threads, [&](std::size_t rep) {
    std::vector<double> copy(data.begin(), data.end());
    CounterRng rng(seed, rep);
    rng.shuffle(std::span<double>(copy));
    if (statistic(copy) >= observed) hits[rep] = 1;
  });
  long count = 0;
  for (char h : hits) count += h;
  return (1.0 + static_cast<double>(count)) / (1.0 + static_cast<double>(n_perm));
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y,
                          const PermutationConfig& cfg) {
  check_lengths(x, y);
  CorrelationResult res;
  res.method = CorrMethod::pearson;
  res.coefficient = pearson_r(x, y);
  res.n = static_cast<int>(x.size());
  res.n_perm = cfg.n_perm;
  res.seed = cfg.seed;
  if (cfg.n_perm == 0) {
    res.p_value = kNaN;
    return res;
  }
  // Two-sided: permute y, count |r| at least as extreme.
  std::vector<double> xv(x.begin(), x.end());
  res.p_value = permutation_p(
      [&xv](std::span<const double> perm) { return std::abs(pearson_r(xv, perm)); }, y,
      cfg.n_perm, cfg.seed, cfg.threads);
  return res;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y,
                           const PermutationConfig& cfg) {
  check_lengths(x, y);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  CorrelationResult res;
  res.method = CorrMethod::spearman;
  res.coefficient = pearson_r(rx, ry);
  res.n = static_cast<int>(x.size());
  res.n_perm = cfg.n_perm;
  res.seed = cfg.seed;
  if (cfg.n_perm == 0) {
    res.p_value = kNaN;
    return res;
  }
  // Permuting y permutes its ranks; correlate rank vectors directly.
  res.p_value = permutation_p(
      [&rx](std::span<const double> perm) { return std::abs(pearson_r(rx, perm)); }, ry,
      cfg.n_perm, cfg.seed, cfg.threads);
  return res;
}

CorrelationPair correlation_pair(std::span<const double> x, std::span<const double> y,
                                 const PermutationConfig& cfg) {
  return CorrelationPair{pearson(x, y, cfg), spearman(x, y, cfg)};
}

namespace {

// F for values laid out group-by-group with the given sizes. Returns +inf
// when the within-variance collapses (can happen under permutation).
double f_statistic_packed(std::span<const double> values, std::span<const std::size_t> sizes) {
  const double grand = mean_of(values);
  double ssb = 0.0, ssw = 0.0;
  std::size_t off = 0;
  for (std::size_t gsize : sizes) {
    const auto group = values.subspan(off, gsize);
    const double gm = mean_of(group);
    ssb += static_cast<double>(gsize) * (gm - grand) * (gm - grand);
    for (double v : group) ssw += (v - gm) * (v - gm);
    off += gsize;
  }
  const std::size_t k = sizes.size();
  const std::size_t n = values.size();
  const double df_b = static_cast<double>(k - 1);
  const double df_w = static_cast<double>(n - k);
  if (ssw == 0.0) return std::numeric_limits<double>::infinity();
  return (ssb / df_b) / (ssw / df_w);
}

}  // namespace

AnovaResult anova_oneway(const std::map<std::string, std::vector<double>>& groups,
                         const PermutationConfig& cfg) {
  if (groups.size() < 2) throw Error("anova_oneway: need at least 2 groups");
  std::vector<double> values;
  std::vector<std::size_t> sizes;
  AnovaResult res;
  for (const auto& [name, vals] : groups) {
    if (vals.size() < 2)
      throw DegenerateError("anova_oneway: group '" + name + "' has fewer than 2 values");
    sizes.push_back(vals.size());
    values.insert(values.end(), vals.begin(), vals.end());
    res.group_means[name] = mean_of(vals);
  }
  res.df_between = static_cast<int>(groups.size()) - 1;
  res.df_within = static_cast<int>(values.size() - groups.size());

  const double f = f_statistic_packed(values, sizes);
  if (std::isinf(f)) throw DegenerateError("anova_oneway: zero within-group variance");
  res.f_statistic = f;
  res.n_perm = cfg.n_perm;
  res.seed = cfg.seed;
  if (cfg.n_perm == 0) {
    res.p_value = kNaN;
    return res;
  }
  res.p_value = permutation_p(
      [&sizes](std::span<const double> perm) { return f_statistic_packed(perm, sizes); }, values,
      cfg.n_perm, cfg.seed, cfg.threads);
  return res;
}

GainMatrix shuffle_gains(const GainMatrix& g, std::uint64_t seed) {
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < g.mean.size(); ++c)
    if (g.n_seeds[c] > 0) cells.push_back(c);

  std::vector<std::size_t> perm = cells;
  CounterRng rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));

  GainMatrix out = g;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t dst = cells[k];
    const std::size_t src = perm[k];
    out.mean[dst] = g.mean[src];
    out.stddev[dst] = g.stddev[src];
    out.sem[dst] = g.sem[src];
    out.n_seeds[dst] = g.n_seeds[src];
  }
  return out;
}

}  // namespace intergain
