#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "intergain/gain.hpp"

namespace intergain {

enum class FitKind { bilinear, base_only, target_only };

/// Gauge fixing applied to a fitted parameter set. The prediction surface
/// (b_i + t_j) * t'_j is invariant under b,t -> b+c,t-c and under
/// b,t -> a*b,a*t with t' -> t'/a; the canonical representative has
/// mean(b) = 0 and mean(t') = 1.
struct Canonicalization {
  double scale = 1.0;
  double shift = 0.0;
  bool scale_fixed = true;  // false when mean(t') was too close to 0
  bool applied = false;
};

struct DecompositionModel {
  std::vector<std::string> model_ids;
  std::vector<std::string> target_ids;
  std::vector<double> b;        // per-model quality term
  std::vector<double> t;        // per-target mean term
  std::vector<double> t_prime;  // per-target sensitivity/scale term
  double mse = 0.0;
  long iterations = 0;
  bool converged = true;
  FitKind kind = FitKind::bilinear;
  Canonicalization canonicalization;

  double predict(std::size_t i, std::size_t j) const { return (b[i] + t[j]) * t_prime[j]; }
};

struct FitConfig {
  double learning_rate = 0.01;  // initial step; adapted multiplicatively
  long max_iterations = 200000;
  double tolerance = 1e-9;      // MSE improvement below this counts as a stall
  int patience = 100;           // consecutive stalled steps before stopping
  int restarts = 5;
  std::uint64_t seed = 0;
  int threads = 1;
  bool canonicalize = true;     // raw parameters behind this flag
};

/// MSE over the non-missing cells for explicit parameters.
double bilinear_mse(const GainMatrix& g, std::span<const double> b, std::span<const double> t,
                    std::span<const double> t_prime);

/// Analytic gradient of bilinear_mse; outputs are resized to match.
void bilinear_gradient(const GainMatrix& g, std::span<const double> b, std::span<const double> t,
                       std::span<const double> t_prime, std::vector<double>& grad_b,
                       std::vector<double>& grad_t, std::vector<double>& grad_t_prime);

/// Full-batch gradient descent on (b_i + t_j) * t'_j over the present
/// cells. Deterministic: the step size starts at config.learning_rate and
/// adapts (grow on success, halve on overshoot); only non-increasing steps
/// are accepted. Restart inits: the default zero init, warm starts at both
/// closed-form restricted fits, then seeded random perturbations; the best
/// final MSE wins (ties to the earlier restart).
DecompositionModel fit_bilinear(const GainMatrix& g, const FitConfig& config = {});

/// Closed form: b_i = row mean of non-missing gains.
DecompositionModel fit_base_only(const GainMatrix& g);

/// Closed form: t_j = column mean of non-missing gains.
DecompositionModel fit_target_only(const GainMatrix& g);

DecompositionModel fit(const GainMatrix& g, FitKind kind, const FitConfig& config = {});

/// Maps parameters to the canonical gauge in place; predictions are
/// preserved to floating-point roundoff.
void canonicalize(DecompositionModel& m);

struct BaselineComparison {
  double fitted_mse = 0.0;
  double shuffled_mse_mean = 0.0;
  double shuffled_mse_std = 0.0;  // population STD
  int n_shuffles = 0;
  std::uint64_t seed = 0;
  FitKind kind = FitKind::bilinear;
};

/// Fits `kind` on the matrix and on n_shuffles >= 2 independently
/// shuffled copies (shuffle s uses stream (seed, s)).
BaselineComparison shuffled_baseline(const GainMatrix& g, FitKind kind, int n_shuffles,
                                     std::uint64_t seed, const FitConfig& config = {});

}  // namespace intergain
