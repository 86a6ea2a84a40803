#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace intergain {

/// A read-only table transcribed from published reference results. All
/// fixtures share one tabular shape: named rows x named columns of
/// doubles, with an optional free-text note per row.
struct ReferenceFixture {
  std::string name;
  std::string citation;
  std::vector<std::string> columns;
  std::vector<std::string> row_labels;
  std::vector<std::vector<double>> values;
  std::map<std::string, std::string> row_notes;

  double at(std::string_view row, std::string_view column) const;
  std::size_t n_rows() const { return row_labels.size(); }
};

/// Registered fixtures:
///   table1_inhouse_loss1 / table1_inhouse_loss3 /
///   table1_offtheshelf_loss1 / table1_offtheshelf_loss3
///       lost-gain aggregates of the LP-based static ranking
///   table2_group_gains     source group x target group mean gains
///   table3_baselines       per-dataset baseline mean/STD (22 rows)
///   table4_offtheshelf_models
///       66 hub models: average gain over the General targets and
///       LP gain on the probe dataset
///   table5_inhouse_loss1 / table5_inhouse_loss3 /
///   table5_offtheshelf_loss1 / table5_offtheshelf_loss3
///       lost-gain aggregates of the rank-by-average-gain alternative
///   appE_lp_predictor      frozen slope/intercept of the LP -> average
///                          gain linear predictor
/// Unknown names throw with the accepted list.
const ReferenceFixture& load_fixture(std::string_view name);

std::vector<std::string> fixture_names();

/// Frozen coefficients of the reference LP -> average-gain predictor.
inline constexpr double kLpPredictorSlope = 0.0822;
inline constexpr double kLpPredictorIntercept = -0.940;

}  // namespace intergain
