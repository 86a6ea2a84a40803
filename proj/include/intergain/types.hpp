#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace intergain {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad syntax, bad header, unreadable path).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Data that parses but breaks a table invariant (missing baseline,
/// duplicate key, out-of-range score, fraction-scaled input).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input on which the requested statistic is undefined (constant
/// sequence, zero matrix, singleton group).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// One finetuning outcome: accuracy of model `model_id` finetuned on
/// target `target_id` with a given seed, in percentage points.
struct ScoreRecord {
  std::string model_id;
  std::string target_id;
  int seed = 0;
  double score = 0.0;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

/// Accuracy of finetuning the vanilla pretrained model on a target.
struct BaselineRecord {
  std::string target_id;
  int seed = 0;
  double score = 0.0;

  friend bool operator==(const BaselineRecord&, const BaselineRecord&) = default;
};

/// Side information about models/targets: numeric keys (train_size,
/// source_score, ...) and string-valued group labels.
struct Metadata {
  std::map<std::string, std::map<std::string, double>> numeric;  // id -> key -> value
  std::map<std::string, std::string> group;                      // id -> group label

  bool empty() const { return numeric.empty() && group.empty(); }

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

struct ScoreTable {
  std::vector<ScoreRecord> records;
  std::vector<BaselineRecord> baselines;
  Metadata metadata;

  /// Sorts records and baselines into canonical (id, seed) order so that
  /// downstream computations are independent of input row order.
  void normalize() {
    std::sort(records.begin(), records.end(), [](const ScoreRecord& a, const ScoreRecord& b) {
      return std::tie(a.model_id, a.target_id, a.seed) < std::tie(b.model_id, b.target_id, b.seed);
    });
    std::sort(baselines.begin(), baselines.end(), [](const BaselineRecord& a, const BaselineRecord& b) {
      return std::tie(a.target_id, a.seed) < std::tie(b.target_id, b.seed);
    });
  }

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;
};

/// id -> group-name map over one axis of a gain matrix.
struct GroupLabeling {
  std::map<std::string, std::string> by_id;

  /// Keeps only entries whose id is in `ids`.
  template <class Container>
  GroupLabeling restrict_to(const Container& ids) const {
    GroupLabeling out;
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it != by_id.end()) out.by_id.emplace(*it);
    }
    return out;
  }

  std::vector<std::string> group_names() const {
    std::vector<std::string> names;
    for (const auto& [id, g] : by_id)
      if (std::find(names.begin(), names.end(), g) == names.end()) names.push_back(g);
    std::sort(names.begin(), names.end());
    return names;
  }
};

}  // namespace intergain
