#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intergain/types.hpp"

namespace intergain {

/// Models x targets matrix of mean intertraining gains (percentage
/// points), with per-cell dispersion and seed counts. A cell with
/// n_seeds == 0 is missing; its double entries are NaN. Ids are sorted
/// lexicographically so the layout does not depend on record order.
struct GainMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> target_ids;
  std::vector<double> mean;     // row-major, models x targets
  std::vector<double> stddev;   // population STD over per-seed gains
  std::vector<double> sem;      // stddev / sqrt(n_seeds)
  std::vector<int> n_seeds;

  std::size_t rows() const { return model_ids.size(); }
  std::size_t cols() const { return target_ids.size(); }
  std::size_t idx(std::size_t i, std::size_t j) const { return i * cols() + j; }
  bool missing(std::size_t i, std::size_t j) const { return n_seeds[idx(i, j)] == 0; }
  double mean_at(std::size_t i, std::size_t j) const { return mean[idx(i, j)]; }

  std::optional<std::size_t> model_index(const std::string& id) const;
  std::optional<std::size_t> target_index(const std::string& id) const;
};

/// Which dispersion statistic backs the >2-sigma significance flag.
enum class SigStat { std_dev, sem };

/// gain(m, t) = mean over model seeds of score minus the mean baseline
/// of the target. Gains pair each model seed against the target's mean
/// baseline, not a seed-matched baseline. Throws ValidationError when a
/// referenced target has no baseline, Error on an empty table.
GainMatrix compute_gains(const ScoreTable& table);

/// True when mean > 2 * (STD or SEM) at a populated cell.
bool significant_cell(const GainMatrix& g, std::size_t i, std::size_t j,
                      SigStat stat = SigStat::std_dev);

/// Per-target max of mean gain over `subset` (all models when absent).
/// Targets whose subset cells are all missing come back NaN.
std::vector<double> max_gain(const GainMatrix& g,
                             const std::optional<std::vector<std::string>>& subset = std::nullopt);

enum class Axis { models, targets };

/// Mean/STD/SEM per id over the non-missing cells of the other axis.
struct DescriptiveStats {
  std::vector<std::string> ids;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<double> sem;
  std::vector<int> n;
};

DescriptiveStats descriptive(const GainMatrix& g, Axis axis);

/// Population standard deviation (divide by n). SEM = this / sqrt(n).
double population_std(std::span<const double> xs);
double mean_of(std::span<const double> xs);

inline bool is_missing_value(double v) { return std::isnan(v); }

}  // namespace intergain
