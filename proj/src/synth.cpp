#include "intergain/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "intergain/rng.hpp"

namespace intergain {

namespace {

std::string padded_id(const char* prefix, int index, int count) {
  const std::size_t width = std::to_string(count - 1).size();
  std::string digits = std::to_string(index);
  std::string pad(width > digits.size() ? width - digits.size() : 0, '0');
  return prefix + pad + digits;
}

double clamp_score(double v, int& clamp_count) {
  if (v < 0.0) {
    ++clamp_count;
    return 0.0;
  }
  if (v > 100.0) {
    ++clamp_count;
    return 100.0;
  }
  return v;
}

void check_range(const char* what, const Range& r) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw Error(std::string("generate: invalid range for ") + what);
}

}  // namespace

GeneratedTable generate(const GeneratorSpec& spec) {
  if (spec.n_models < 1 || spec.n_targets < 1 || spec.n_seeds < 1)
    throw Error("generate: counts must be >= 1");
  if (spec.noise_std < 0.0) throw Error("generate: noise_std must be >= 0");
  if (spec.square_ids && spec.n_models != spec.n_targets)
    throw Error("generate: square_ids requires n_models == n_targets");
  check_range("b", spec.b_range);
  check_range("t", spec.t_range);
  check_range("t_prime", spec.t_prime_range);

  GeneratedTable out;

  std::vector<std::string> model_ids(static_cast<std::size_t>(spec.n_models));
  std::vector<std::string> target_ids(static_cast<std::size_t>(spec.n_targets));
  for (int i = 0; i < spec.n_models; ++i)
    model_ids[static_cast<std::size_t>(i)] = padded_id(spec.square_ids ? "d" : "m", i, spec.n_models);
  for (int j = 0; j < spec.n_targets; ++j)
    target_ids[static_cast<std::size_t>(j)] = padded_id(spec.square_ids ? "d" : "t", j, spec.n_targets);

  // Stream 0: parameters; stream 1: baseline noise; stream 2: score noise.
  CounterRng param_rng(spec.seed, 0);
  std::vector<double> b(model_ids.size()), t(target_ids.size()), tp(target_ids.size());
  for (double& v : b) v = param_rng.next_uniform(spec.b_range.lo, spec.b_range.hi);
  for (double& v : t) v = param_rng.next_uniform(spec.t_range.lo, spec.t_range.hi);
  for (double& v : tp) v = param_rng.next_uniform(spec.t_prime_range.lo, spec.t_prime_range.hi);

  CounterRng baseline_rng(spec.seed, 1);
  for (std::size_t j = 0; j < target_ids.size(); ++j) {
    for (int s = 0; s < spec.n_seeds; ++s) {
      const double noise = spec.noise_std > 0.0 ? spec.noise_std * baseline_rng.next_gaussian() : 0.0;
      out.table.baselines.push_back(
          {target_ids[j], s, clamp_score(spec.baseline_level + noise, out.clamped_baselines)});
    }
  }

  CounterRng score_rng(spec.seed, 2);
  int n_scores = 0;
  for (std::size_t i = 0; i < model_ids.size(); ++i) {
    for (std::size_t j = 0; j < target_ids.size(); ++j) {
      const double signal = (b[i] + t[j]) * tp[j];
      for (int s = 0; s < spec.n_seeds; ++s) {
        const double noise = spec.noise_std > 0.0 ? spec.noise_std * score_rng.next_gaussian() : 0.0;
        out.table.records.push_back(
            {model_ids[i], target_ids[j], s,
             clamp_score(spec.baseline_level + signal + noise, out.clamped_scores)});
        ++n_scores;
      }
    }
  }
  if (out.clamped_scores == n_scores)
    throw Error("generate: every score was clamped; spec puts all signal outside [0,100]");

  out.table.normalize();

  out.truth.model_ids = model_ids;
  out.truth.target_ids = target_ids;
  out.truth.b = std::move(b);
  out.truth.t = std::move(t);
  out.truth.t_prime = std::move(tp);
  out.truth.mse = 0.0;
  out.truth.converged = true;
  out.truth.kind = FitKind::bilinear;
  canonicalize(out.truth);
  return out;
}

}  // namespace intergain
