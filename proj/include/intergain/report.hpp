#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "intergain/analysis.hpp"
#include "intergain/decomposition.hpp"
#include "intergain/ingest.hpp"
#include "intergain/ranking.hpp"
#include "intergain/synth.hpp"

namespace intergain {

using Json = nlohmann::json;

/// FNV-1a 64-bit over raw bytes, as "fnv1a64:<16 hex digits>".
std::string content_digest(std::string_view bytes);
std::string file_digest(const std::string& path);

// Json views of the analysis results. NaN (missing) becomes null.
Json to_json(const GainMatrix& g);
Json to_json(const DescriptiveStats& d);
Json to_json(const CorrelationResult& c);
Json to_json(const CorrelationPair& c);
Json to_json(const AnovaResult& a);
Json to_json(const DecompositionModel& m);
Json to_json(const BaselineComparison& b);
Json to_json(const TopkLoss& t);
Json to_json(const RankingReport& r);
Json to_json(const LpPredictorFit& f);
Json to_json(const SensitivityReport& s);
Json to_json(const SymmetryResult& s);
Json to_json(const GroupGainTable& t);
Json to_json(const ValidationReport& v);

/// Serializes with sorted keys and 2-space indent; identical inputs give
/// identical bytes.
std::string report_text(const Json& report);

/// One rect per (model, target) cell on a diverging scale centered at 0;
/// cells whose mean exceeds 2x the chosen dispersion statistic carry
/// data-significant="true" and an italic value label. Missing cells are
/// drawn gray with data-missing="true". Valid standalone XML.
std::string heatmap_svg(const GainMatrix& g, SigStat sig = SigStat::std_dev);

/// Scatter of (x, y) points with an optional fitted line.
std::string scatter_svg(std::span<const double> x, std::span<const double> y,
                        const std::string& x_label, const std::string& y_label,
                        double slope, double intercept, bool draw_line);

std::string xml_escape(std::string_view s);

}  // namespace intergain
