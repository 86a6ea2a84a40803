#include "intergain/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace intergain {

namespace {

using Json = nlohmann::json;

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(const std::string& name, std::size_t line_no, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(line_no) + ": " + what);
}

double parse_number(const std::string& name, std::size_t line_no, const std::string& field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(name, line_no, "not a number: '" + field + "'");
  if (!std::isfinite(v)) fail(name, line_no, "non-finite number: '" + field + "'");
  return v;
}

int parse_seed(const std::string& name, std::size_t line_no, const std::string& field) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || v < 0)
    fail(name, line_no, "seed must be a non-negative integer: '" + field + "'");
  return v;
}

void check_header(const std::string& name, const std::string& got,
                  const std::string& expected) {
  if (strip_cr(got) != expected)
    throw ParseError(name + ":1: unknown columns '" + strip_cr(got) + "'; accepted header is '" +
                     expected + "'");
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Every score in [0,1] on a non-trivial table means the input is almost
// surely fraction-scaled accuracies rather than percentage points.
bool looks_fraction_scaled(const ScoreTable& t) {
  if (t.records.empty()) return false;
  for (const auto& r : t.records)
    if (r.score < 0.0 || r.score > 1.0) return false;
  for (const auto& b : t.baselines)
    if (b.score < 0.0 || b.score > 1.0) return false;
  return true;
}

}  // namespace

void parse_scores_csv(std::istream& in, const std::string& name, ScoreTable& table) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": empty file");
  check_header(name, line, "model,target,seed,score");

  std::set<std::tuple<std::string, std::string, int>> keys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) fail(name, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    ScoreRecord rec;
    rec.model_id = fields[0];
    rec.target_id = fields[1];
    rec.seed = parse_seed(name, line_no, fields[2]);
    rec.score = parse_number(name, line_no, fields[3]);
    if (rec.model_id.empty() || rec.target_id.empty()) fail(name, line_no, "empty id");
    if (!keys.insert({rec.model_id, rec.target_id, rec.seed}).second)
      throw ValidationError(name + ":" + std::to_string(line_no) + ": duplicate key (" +
                            rec.model_id + ", " + rec.target_id + ", " +
                            std::to_string(rec.seed) + ")");
    table.records.push_back(std::move(rec));
  }
}

void parse_baselines_csv(std::istream& in, const std::string& name, ScoreTable& table) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": empty file");
  check_header(name, line, "target,seed,score");

  std::set<std::pair<std::string, int>> keys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) fail(name, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    BaselineRecord rec;
    rec.target_id = fields[0];
    rec.seed = parse_seed(name, line_no, fields[1]);
    rec.score = parse_number(name, line_no, fields[2]);
    if (rec.target_id.empty()) fail(name, line_no, "empty id");
    if (!keys.insert({rec.target_id, rec.seed}).second)
      throw ValidationError(name + ":" + std::to_string(line_no) + ": duplicate key (" +
                            rec.target_id + ", " + std::to_string(rec.seed) + ")");
    table.baselines.push_back(std::move(rec));
  }
}

void parse_metadata_csv(std::istream& in, const std::string& name, Metadata& metadata) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": empty file");
  check_header(name, line, "id,key,value");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) fail(name, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    const std::string& id = fields[0];
    const std::string& key = fields[1];
    const std::string& value = fields[2];
    if (id.empty() || key.empty()) fail(name, line_no, "empty id or key");

    if (key == "group") {
      // String values are usable only as group labels.
      if (!metadata.group.emplace(id, value).second)
        throw ValidationError(name + ":" + std::to_string(line_no) +
                              ": duplicate group label for '" + id + "'");
      continue;
    }
    double numeric = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), numeric);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(numeric))
      fail(name, line_no, "non-numeric value '" + value + "' for key '" + key +
                              "' (strings are only accepted for key 'group')");
    if (!metadata.numeric[id].emplace(key, numeric).second)
      throw ValidationError(name + ":" + std::to_string(line_no) + ": duplicate metadata (" + id +
                            ", " + key + ")");
  }
}

std::vector<QualityScore> parse_quality_csv(std::istream& in, const std::string& name,
                                            QualityKind kind) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": empty file");
  check_header(name, line, "model,value");

  std::vector<QualityScore> out;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) fail(name, line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) fail(name, line_no, "empty id");
    if (!seen.insert(fields[0]).second)
      throw ValidationError(name + ":" + std::to_string(line_no) + ": duplicate model '" +
                            fields[0] + "'");
    out.push_back(QualityScore{fields[0], parse_number(name, line_no, fields[1]), kind});
  }
  return out;
}

std::vector<QualityScore> load_quality_csv(const std::string& path, QualityKind kind) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_quality_csv(in, path, kind);
}

ScoreTable parse_score_table(const TableSource& src) {
  ScoreTable table;
  if (src.format == TableFormat::csv) {
    {
      std::ifstream in(src.scores_path);
      if (!in) throw ParseError("cannot open '" + src.scores_path + "'");
      parse_scores_csv(in, src.scores_path, table);
    }
    if (!src.baselines_path.empty()) {
      std::ifstream in(src.baselines_path);
      if (!in) throw ParseError("cannot open '" + src.baselines_path + "'");
      parse_baselines_csv(in, src.baselines_path, table);
    }
  } else {
    std::ifstream in(src.scores_path);
    if (!in) throw ParseError("cannot open '" + src.scores_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    table = table_from_json_text(buf.str(), src.scores_path);
  }
  if (!src.metadata_path.empty()) {
    std::ifstream in(src.metadata_path);
    if (!in) throw ParseError("cannot open '" + src.metadata_path + "'");
    parse_metadata_csv(in, src.metadata_path, table.metadata);
  }

  if (looks_fraction_scaled(table)) {
    switch (src.fractions) {
      case FractionPolicy::rescale:
        for (auto& r : table.records) r.score *= 100.0;
        for (auto& b : table.baselines) b.score *= 100.0;
        break;
      case FractionPolicy::reject:
        throw ValidationError(
            "all scores lie in [0,1]; inputs must be percentage points "
            "(pass the rescale option to multiply fraction-scaled scores by 100)");
      case FractionPolicy::keep:
        break;
    }
  }
  table.normalize();
  return table;
}

std::string serialize_scores_csv(const ScoreTable& table) {
  ScoreTable t = table;
  t.normalize();
  std::string out = "model,target,seed,score\n";
  for (const auto& r : t.records)
    out += r.model_id + "," + r.target_id + "," + std::to_string(r.seed) + "," +
           format_double(r.score) + "\n";
  return out;
}

std::string serialize_baselines_csv(const ScoreTable& table) {
  ScoreTable t = table;
  t.normalize();
  std::string out = "target,seed,score\n";
  for (const auto& b : t.baselines)
    out += b.target_id + "," + std::to_string(b.seed) + "," + format_double(b.score) + "\n";
  return out;
}

std::string serialize_metadata_csv(const Metadata& metadata) {
  std::string out = "id,key,value\n";
  for (const auto& [id, keys] : metadata.numeric)
    for (const auto& [key, value] : keys) out += id + "," + key + "," + format_double(value) + "\n";
  for (const auto& [id, grp] : metadata.group) out += id + ",group," + grp + "\n";
  return out;
}

std::string table_to_json_text(const ScoreTable& table) {
  ScoreTable t = table;
  t.normalize();
  Json j;
  j["records"] = Json::array();
  for (const auto& r : t.records)
    j["records"].push_back({{"model_id", r.model_id},
                            {"target_id", r.target_id},
                            {"seed", r.seed},
                            {"score", r.score}});
  j["baselines"] = Json::array();
  for (const auto& b : t.baselines)
    j["baselines"].push_back({{"target_id", b.target_id}, {"seed", b.seed}, {"score", b.score}});
  if (!t.metadata.empty()) {
    Json meta;
    meta["numeric"] = t.metadata.numeric;
    meta["group"] = t.metadata.group;
    j["metadata"] = meta;
  }
  return j.dump(2) + "\n";
}

ScoreTable table_from_json_text(const std::string& text, const std::string& name) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(name + ": " + e.what());
  }
  try {
    ScoreTable t;
    std::set<std::tuple<std::string, std::string, int>> keys;
    for (const auto& r : j.at("records")) {
      ScoreRecord rec{r.at("model_id").get<std::string>(), r.at("target_id").get<std::string>(),
                      r.at("seed").get<int>(), r.at("score").get<double>()};
      if (rec.seed < 0) throw ValidationError(name + ": negative seed");
      if (!keys.insert({rec.model_id, rec.target_id, rec.seed}).second)
        throw ValidationError(name + ": duplicate key (" + rec.model_id + ", " + rec.target_id +
                              ", " + std::to_string(rec.seed) + ")");
      t.records.push_back(std::move(rec));
    }
    std::set<std::pair<std::string, int>> bkeys;
    for (const auto& b : j.at("baselines")) {
      BaselineRecord rec{b.at("target_id").get<std::string>(), b.at("seed").get<int>(),
                         b.at("score").get<double>()};
      if (!bkeys.insert({rec.target_id, rec.seed}).second)
        throw ValidationError(name + ": duplicate baseline key (" + rec.target_id + ", " +
                              std::to_string(rec.seed) + ")");
      t.baselines.push_back(std::move(rec));
    }
    if (j.contains("metadata")) {
      const auto& meta = j.at("metadata");
      if (meta.contains("numeric"))
        t.metadata.numeric =
            meta.at("numeric").get<std::map<std::string, std::map<std::string, double>>>();
      if (meta.contains("group"))
        t.metadata.group = meta.at("group").get<std::map<std::string, std::string>>();
    }
    t.normalize();
    return t;
  } catch (const Json::exception& e) {
    throw ParseError(name + ": " + e.what());
  }
}

ValidationReport validate(const ScoreTable& table) {
  ValidationReport rep;
  const auto add = [&rep](std::string code, std::string msg) {
    rep.findings.push_back({std::move(code), std::move(msg)});
  };

  if (table.records.empty()) {
    add("empty-table", "table has no score records");
    return rep;
  }

  std::set<std::string> baseline_targets;
  for (const auto& b : table.baselines) baseline_targets.insert(b.target_id);

  std::set<std::string> reported_missing;
  for (const auto& r : table.records) {
    if (!baseline_targets.count(r.target_id) && reported_missing.insert(r.target_id).second)
      add("missing-baseline", "target '" + r.target_id + "' has records but no baseline");
    if (!(r.score >= 0.0 && r.score <= 100.0))
      add("score-range", "score " + format_double(r.score) + " for (" + r.model_id + ", " +
                             r.target_id + ", " + std::to_string(r.seed) +
                             ") outside [0,100]");
  }
  for (const auto& b : table.baselines) {
    if (!(b.score >= 0.0 && b.score <= 100.0))
      add("score-range", "baseline score " + format_double(b.score) + " for (" + b.target_id +
                             ", " + std::to_string(b.seed) + ") outside [0,100]");
  }

  if (looks_fraction_scaled(table))
    add("fraction-scale", "all scores lie in [0,1]; expected percentage points");

  std::set<std::string> ids;
  for (const auto& r : table.records) {
    ids.insert(r.model_id);
    ids.insert(r.target_id);
  }
  for (const auto& [id, grp] : table.metadata.group)
    if (!ids.count(id)) add("unknown-group-id", "group label on unknown id '" + id + "'");

  return rep;
}

}  // namespace intergain
