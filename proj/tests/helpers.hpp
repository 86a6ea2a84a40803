#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "intergain/gain.hpp"
#include "intergain/types.hpp"

namespace testutil {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Gain matrix straight from cell values; NaN marks a missing cell.
inline intergain::GainMatrix matrix_from(const std::vector<std::vector<double>>& cells,
                                         std::vector<std::string> model_ids = {},
                                         std::vector<std::string> target_ids = {}) {
  intergain::GainMatrix g;
  const std::size_t rows = cells.size();
  const std::size_t cols = cells.empty() ? 0 : cells[0].size();
  if (model_ids.empty())
    for (std::size_t i = 0; i < rows; ++i) model_ids.push_back("m" + std::to_string(i));
  if (target_ids.empty())
    for (std::size_t j = 0; j < cols; ++j) target_ids.push_back("t" + std::to_string(j));
  g.model_ids = std::move(model_ids);
  g.target_ids = std::move(target_ids);
  g.mean.assign(rows * cols, kNaN);
  g.stddev.assign(rows * cols, 0.0);
  g.sem.assign(rows * cols, 0.0);
  g.n_seeds.assign(rows * cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (std::isnan(cells[i][j])) continue;
      g.mean[g.idx(i, j)] = cells[i][j];
      g.n_seeds[g.idx(i, j)] = 1;
    }
  }
  return g;
}

/// The 3-model 2-target example used across the operation contracts:
/// m1:(2,1) m2:(0,3) m3:(-1,-1).
inline intergain::GainMatrix example_3x2() {
  return matrix_from({{2.0, 1.0}, {0.0, 3.0}, {-1.0, -1.0}}, {"m1", "m2", "m3"}, {"t1", "t2"});
}

/// Single-seed score table whose gains equal `cells` over baseline 70.
inline intergain::ScoreTable table_from_gains(const std::vector<std::vector<double>>& cells) {
  intergain::ScoreTable t;
  const std::size_t rows = cells.size();
  const std::size_t cols = cells.empty() ? 0 : cells[0].size();
  for (std::size_t j = 0; j < cols; ++j)
    t.baselines.push_back({"t" + std::to_string(j), 0, 70.0});
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (std::isnan(cells[i][j])) continue;
      t.records.push_back({"m" + std::to_string(i), "t" + std::to_string(j), 0, 70.0 + cells[i][j]});
    }
  t.normalize();
  return t;
}

}  // namespace testutil
