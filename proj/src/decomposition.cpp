#include "intergain/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "intergain/rng.hpp"
#include "intergain/stats.hpp"
#include "intergain/types.hpp"

namespace intergain {

namespace {

void check_fittable(const GainMatrix& g) {
  if (g.rows() < 2 || g.cols() < 2)
    throw DegenerateError("decomposition: need at least 2 models and 2 targets");
  for (std::size_t i = 0; i < g.rows(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < g.cols(); ++j) any = any || !g.missing(i, j);
    if (!any) throw DegenerateError("decomposition: model '" + g.model_ids[i] + "' has no cells");
  }
  for (std::size_t j = 0; j < g.cols(); ++j) {
    bool any = false;
    for (std::size_t i = 0; i < g.rows(); ++i) any = any || !g.missing(i, j);
    if (!any) throw DegenerateError("decomposition: target '" + g.target_ids[j] + "' has no cells");
  }
}

std::size_t present_count(const GainMatrix& g) {
  std::size_t n = 0;
  for (int c : g.n_seeds) n += c > 0;
  return n;
}

struct Params {
  std::vector<double> b, t, tp;
};

struct GdResult {
  Params p;
  double mse = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Gradient descent from a given init. The step size grows 5% on every
// accepted step and halves on overshoot; only non-increasing steps are
// taken, so the final MSE never exceeds the init's.
GdResult descend(const GainMatrix& g, Params p, const FitConfig& cfg) {
  const auto mse = [&g](const Params& q) { return bilinear_mse(g, q.b, q.t, q.tp); };
  std::vector<double> gb, gt, gtp;
  double lr = cfg.learning_rate;
  double cur = mse(p);
  long it = 0;
  int stall = 0;
  bool converged = false;

  Params cand = p;
  while (it < cfg.max_iterations) {
    bilinear_gradient(g, p.b, p.t, p.tp, gb, gt, gtp);
    double nxt = cur;
    bool accepted = false;
    while (it < cfg.max_iterations) {
      for (std::size_t i = 0; i < p.b.size(); ++i) cand.b[i] = p.b[i] - lr * gb[i];
      for (std::size_t j = 0; j < p.t.size(); ++j) {
        cand.t[j] = p.t[j] - lr * gt[j];
        cand.tp[j] = p.tp[j] - lr * gtp[j];
      }
      nxt = mse(cand);
      ++it;
      if (nxt <= cur) {
        accepted = true;
        break;
      }
      if (lr < 1e-18) break;
      lr *= 0.5;
    }
    if (!accepted) {
      // No decrease found at any step size: stationary to machine precision.
      converged = lr < 1e-18;
      break;
    }
    std::swap(p, cand);
    if (cur - nxt < cfg.tolerance) {
      if (++stall >= cfg.patience) {
        cur = nxt;
        converged = true;
        break;
      }
    } else {
      stall = 0;
    }
    cur = nxt;
    lr *= 1.05;
  }
  return GdResult{std::move(p), cur, it, converged};
}

DecompositionModel to_model(const GainMatrix& g, GdResult r, FitKind kind, bool do_canon) {
  DecompositionModel m;
  m.model_ids = g.model_ids;
  m.target_ids = g.target_ids;
  m.b = std::move(r.p.b);
  m.t = std::move(r.p.t);
  m.t_prime = std::move(r.p.tp);
  m.mse = r.mse;
  m.iterations = r.iterations;
  m.converged = r.converged;
  m.kind = kind;
  if (do_canon) canonicalize(m);
  return m;
}

}  // namespace

double bilinear_mse(const GainMatrix& g, std::span<const double> b, std::span<const double> t,
                    std::span<const double> tp) {
  double ss = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const std::size_t c = g.idx(i, j);
      if (g.n_seeds[c] == 0) continue;
      const double r = (b[i] + t[j]) * tp[j] - g.mean[c];
      ss += r * r;
      ++n;
    }
  }
  return ss / static_cast<double>(n);
}

void bilinear_gradient(const GainMatrix& g, std::span<const double> b, std::span<const double> t,
                       std::span<const double> tp, std::vector<double>& grad_b,
                       std::vector<double>& grad_t, std::vector<double>& grad_tp) {
  grad_b.assign(b.size(), 0.0);
  grad_t.assign(t.size(), 0.0);
  grad_tp.assign(tp.size(), 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const std::size_t c = g.idx(i, j);
      if (g.n_seeds[c] == 0) continue;
      const double r = (b[i] + t[j]) * tp[j] - g.mean[c];
      grad_b[i] += r * tp[j];
      grad_t[j] += r * tp[j];
      grad_tp[j] += r * (b[i] + t[j]);
      ++n;
    }
  }
  const double scale = 2.0 / static_cast<double>(n);
  for (double& v : grad_b) v *= scale;
  for (double& v : grad_t) v *= scale;
  for (double& v : grad_tp) v *= scale;
}

void canonicalize(DecompositionModel& m) {
  Canonicalization canon;
  const double tp_mean = mean_of(m.t_prime);
  if (std::abs(tp_mean) > 1e-12) {
    canon.scale = tp_mean;
    for (double& v : m.b) v *= tp_mean;
    for (double& v : m.t) v *= tp_mean;
    for (double& v : m.t_prime) v /= tp_mean;
  } else {
    canon.scale_fixed = false;
  }
  const double b_mean = mean_of(m.b);
  canon.shift = b_mean;
  for (double& v : m.b) v -= b_mean;
  for (double& v : m.t) v += b_mean;
  canon.applied = true;
  m.canonicalization = canon;
}

DecompositionModel fit_base_only(const GainMatrix& g) {
  check_fittable(g);
  const DescriptiveStats rows = descriptive(g, Axis::models);
  const double grand = mean_of(rows.mean);

  GdResult r;
  r.p.b.resize(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) r.p.b[i] = rows.mean[i] - grand;
  r.p.t.assign(g.cols(), grand);
  r.p.tp.assign(g.cols(), 1.0);
  r.mse = bilinear_mse(g, r.p.b, r.p.t, r.p.tp);
  r.converged = true;
  DecompositionModel m = to_model(g, std::move(r), FitKind::base_only, false);
  m.canonicalization.applied = true;  // constructed directly in canonical gauge
  return m;
}

DecompositionModel fit_target_only(const GainMatrix& g) {
  check_fittable(g);
  const DescriptiveStats cols = descriptive(g, Axis::targets);

  GdResult r;
  r.p.b.assign(g.rows(), 0.0);
  r.p.t = cols.mean;
  r.p.tp.assign(g.cols(), 1.0);
  r.mse = bilinear_mse(g, r.p.b, r.p.t, r.p.tp);
  r.converged = true;
  DecompositionModel m = to_model(g, std::move(r), FitKind::target_only, false);
  m.canonicalization.applied = true;
  return m;
}

DecompositionModel fit_bilinear(const GainMatrix& g, const FitConfig& cfg) {
  check_fittable(g);
  if (present_count(g) == 0) throw DegenerateError("decomposition: all cells missing");

  const int restarts = std::max(1, cfg.restarts);
  std::vector<Params> inits;
  inits.reserve(static_cast<std::size_t>(restarts));

  // Restart 0: the documented default init.
  Params zero;
  zero.b.assign(g.rows(), 0.0);
  zero.t.assign(g.cols(), 0.0);
  zero.tp.assign(g.cols(), 1.0);
  inits.push_back(zero);

  // Warm starts at the closed-form restricted fits keep the bilinear fit
  // from landing above either of them.
  if (restarts >= 2) {
    const DecompositionModel base = fit_base_only(g);
    inits.push_back(Params{base.b, base.t, base.t_prime});
  }
  if (restarts >= 3) {
    const DecompositionModel tgt = fit_target_only(g);
    inits.push_back(Params{tgt.b, tgt.t, tgt.t_prime});
  }
  for (int r = static_cast<int>(inits.size()); r < restarts; ++r) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(r));
    Params p;
    p.b.resize(g.rows());
    p.t.resize(g.cols());
    p.tp.resize(g.cols());
    for (double& v : p.b) v = rng.next_uniform(-0.5, 0.5);
    for (double& v : p.t) v = rng.next_uniform(-0.5, 0.5);
    for (double& v : p.tp) v = rng.next_uniform(0.5, 1.5);
    inits.push_back(std::move(p));
  }

  std::vector<GdResult> results(inits.size());
  parallel_for(inits.size(), cfg.threads,
               [&](std::size_t r) { results[r] = descend(g, inits[r], cfg); });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].mse < results[best].mse) best = r;
  return to_model(g, std::move(results[best]), FitKind::bilinear, cfg.canonicalize);
}

DecompositionModel fit(const GainMatrix& g, FitKind kind, const FitConfig& cfg) {
  switch (kind) {
    case FitKind::bilinear:
      return fit_bilinear(g, cfg);
    case FitKind::base_only:
      return fit_base_only(g);
    case FitKind::target_only:
      return fit_target_only(g);
  }
  throw Error("fit: unknown kind");
}

BaselineComparison shuffled_baseline(const GainMatrix& g, FitKind kind, int n_shuffles,
                                     std::uint64_t seed, const FitConfig& cfg) {
  if (n_shuffles < 2) throw Error("shuffled_baseline: need at least 2 shuffles");

  BaselineComparison cmp;
  cmp.kind = kind;
  cmp.n_shuffles = n_shuffles;
  cmp.seed = seed;
  cmp.fitted_mse = fit(g, kind, cfg).mse;

  std::vector<double> mses(static_cast<std::size_t>(n_shuffles));
  parallel_for(static_cast<std::size_t>(n_shuffles), cfg.threads, [&](std::size_t s) {
    const GainMatrix shuffled = shuffle_gains(g, CounterRng::mix(seed + CounterRng::kGamma * s));
    FitConfig sub = cfg;
    sub.seed = CounterRng::mix(seed ^ (s + 1));
    mses[s] = fit(shuffled, kind, sub).mse;
  });
  cmp.shuffled_mse_mean = mean_of(mses);
  cmp.shuffled_mse_std = population_std(mses);
  return cmp;
}

}  // namespace intergain
