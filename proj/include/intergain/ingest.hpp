#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "intergain/ranking.hpp"
#include "intergain/types.hpp"

namespace intergain {

enum class TableFormat { csv, json };

/// What to do with a table whose scores all sit in [0,1]: such input is
/// almost surely fraction-scaled accuracies rather than percentage points.
enum class FractionPolicy {
  reject,   // hard error suggesting the rescale option
  rescale,  // multiply every score by 100
  keep,     // leave as-is so validate() can report the finding
};

/// Where a score table comes from. CSV splits scores/baselines across two
/// files (headers `model,target,seed,score` and `target,seed,score`);
/// JSON holds the whole table in one document.
struct TableSource {
  std::string scores_path;
  std::string baselines_path;  // CSV only
  std::string metadata_path;   // optional, CSV `id,key,value`
  TableFormat format = TableFormat::csv;
  FractionPolicy fractions = FractionPolicy::reject;
};

/// Parses and normalizes a table. Duplicate (model,target,seed) or
/// (target,seed) keys and malformed rows are hard errors with the file
/// and line named. Fraction-scaled input is handled per src.fractions.
ScoreTable parse_score_table(const TableSource& src);

// Stream-level parsers; `name` labels error messages.
void parse_scores_csv(std::istream& in, const std::string& name, ScoreTable& table);
void parse_baselines_csv(std::istream& in, const std::string& name, ScoreTable& table);
void parse_metadata_csv(std::istream& in, const std::string& name, Metadata& metadata);

/// Quality-score CSV, header `model,value`.
std::vector<QualityScore> parse_quality_csv(std::istream& in, const std::string& name,
                                            QualityKind kind);
std::vector<QualityScore> load_quality_csv(const std::string& path, QualityKind kind);

std::string serialize_scores_csv(const ScoreTable& table);
std::string serialize_baselines_csv(const ScoreTable& table);
std::string serialize_metadata_csv(const Metadata& metadata);

std::string table_to_json_text(const ScoreTable& table);
ScoreTable table_from_json_text(const std::string& text, const std::string& name);

struct ValidationFinding {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool clean() const { return findings.empty(); }
};

/// Invariant check as data: empty report iff the table is well formed.
/// Violations (missing baselines, out-of-range scores, fraction-scaled
/// values, group labels on unknown ids) are findings, not exceptions.
ValidationReport validate(const ScoreTable& table);

}  // namespace intergain
