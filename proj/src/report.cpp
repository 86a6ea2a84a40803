#include "intergain/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "intergain/types.hpp"

namespace intergain {

namespace {

Json nan_to_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

Json double_vector(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(nan_to_null(x));
  return arr;
}

const char* method_name(CorrMethod m) {
  return m == CorrMethod::pearson ? "pearson" : "spearman";
}

const char* kind_name(FitKind k) {
  switch (k) {
    case FitKind::bilinear:
      return "bilinear";
    case FitKind::base_only:
      return "base_only";
    case FitKind::target_only:
      return "target_only";
  }
  return "?";
}

}  // namespace

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return content_digest(buf.str());
}

Json to_json(const GainMatrix& g) {
  Json j;
  j["model_ids"] = g.model_ids;
  j["target_ids"] = g.target_ids;
  Json rows = Json::array();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t jx = 0; jx < g.cols(); ++jx) row.push_back(nan_to_null(g.mean_at(i, jx)));
    rows.push_back(row);
  }
  j["mean_gain"] = rows;
  Json stds = Json::array(), sems = Json::array(), counts = Json::array();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    Json srow = Json::array(), erow = Json::array(), crow = Json::array();
    for (std::size_t jx = 0; jx < g.cols(); ++jx) {
      srow.push_back(nan_to_null(g.stddev[g.idx(i, jx)]));
      erow.push_back(nan_to_null(g.sem[g.idx(i, jx)]));
      crow.push_back(g.n_seeds[g.idx(i, jx)]);
    }
    stds.push_back(srow);
    sems.push_back(erow);
    counts.push_back(crow);
  }
  j["std"] = stds;
  j["sem"] = sems;
  j["n_seeds"] = counts;
  return j;
}

Json to_json(const DescriptiveStats& d) {
  Json j;
  j["ids"] = d.ids;
  j["mean"] = double_vector(d.mean);
  j["std"] = double_vector(d.stddev);
  j["sem"] = double_vector(d.sem);
  j["n"] = d.n;
  return j;
}

Json to_json(const CorrelationResult& c) {
  Json j;
  j["coefficient"] = c.coefficient;
  j["n"] = c.n;
  j["p_value"] = nan_to_null(c.p_value);
  j["method"] = method_name(c.method);
  j["p_method"] = "permutation";
  j["n_perm"] = c.n_perm;
  j["seed"] = c.seed;
  return j;
}

Json to_json(const CorrelationPair& c) {
  Json j;
  j["pearson"] = to_json(c.pearson);
  j["spearman"] = to_json(c.spearman);
  return j;
}

Json to_json(const AnovaResult& a) {
  Json j;
  j["f_statistic"] = a.f_statistic;
  j["df_between"] = a.df_between;
  j["df_within"] = a.df_within;
  j["p_value"] = nan_to_null(a.p_value);
  j["group_means"] = a.group_means;
  j["p_method"] = "permutation";
  j["n_perm"] = a.n_perm;
  j["seed"] = a.seed;
  return j;
}

Json to_json(const DecompositionModel& m) {
  Json j;
  j["model_ids"] = m.model_ids;
  j["target_ids"] = m.target_ids;
  j["b"] = double_vector(m.b);
  j["t"] = double_vector(m.t);
  j["t_prime"] = double_vector(m.t_prime);
  j["mse"] = m.mse;
  j["iterations"] = m.iterations;
  j["converged"] = m.converged;
  j["kind"] = kind_name(m.kind);
  j["canonicalization"] = {{"applied", m.canonicalization.applied},
                           {"scale", m.canonicalization.scale},
                           {"shift", m.canonicalization.shift},
                           {"scale_fixed", m.canonicalization.scale_fixed}};
  return j;
}

Json to_json(const BaselineComparison& b) {
  Json j;
  j["fitted_mse"] = b.fitted_mse;
  j["shuffled_mse_mean"] = b.shuffled_mse_mean;
  j["shuffled_mse_std"] = b.shuffled_mse_std;
  j["n_shuffles"] = b.n_shuffles;
  j["seed"] = b.seed;
  j["kind"] = kind_name(b.kind);
  return j;
}

Json to_json(const TopkLoss& t) {
  Json j;
  j["k"] = t.k;
  j["threshold"] = t.threshold;
  j["target_ids"] = t.target_ids;
  j["loss"] = double_vector(t.loss);
  j["avg"] = nan_to_null(t.avg);
  j["max"] = nan_to_null(t.max);
  j["n_above"] = t.n_above;
  j["n_evaluated"] = t.n_evaluated;
  return j;
}

Json to_json(const RankingReport& r) {
  Json j;
  j["ranking"] = r.ranking;
  Json losses = Json::array();
  for (const auto& l : r.losses) losses.push_back(to_json(l));
  j["topk_loss"] = losses;
  return j;
}

Json to_json(const LpPredictorFit& f) {
  Json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["pearson"] = to_json(f.pearson);
  j["spearman"] = to_json(f.spearman);
  j["n"] = f.n;
  return j;
}

Json to_json(const SensitivityReport& s) {
  Json j;
  j["proxy_model"] = s.proxy_model;
  j["target_ids"] = s.target_ids;
  j["proxy_gain"] = double_vector(s.proxy_gain);
  j["max_gain"] = double_vector(s.max_gain);
  Json flags = Json::array();
  for (bool b : s.sensitive) flags.push_back(b);
  j["sensitive"] = flags;
  j["pearson"] = to_json(s.pearson);
  j["spearman"] = to_json(s.spearman);
  j["dropped_targets"] = s.dropped_targets;
  j["small_sample"] = s.small_sample;
  return j;
}

Json to_json(const SymmetryResult& s) {
  Json j;
  j["s"] = s.s;
  j["norm_symmetric"] = s.norm_symmetric;
  j["norm_skew"] = s.norm_skew;
  j["norm"] = "frobenius";
  return j;
}

Json to_json(const GroupGainTable& t) {
  Json j;
  j["source_groups"] = t.source_groups;
  j["target_groups"] = t.target_groups;
  Json rows = Json::array(), counts = Json::array();
  for (std::size_t i = 0; i < t.source_groups.size(); ++i) {
    Json row = Json::array(), crow = Json::array();
    for (std::size_t k = 0; k < t.target_groups.size(); ++k) {
      row.push_back(nan_to_null(t.mean[i * t.target_groups.size() + k]));
      crow.push_back(t.count[i * t.target_groups.size() + k]);
    }
    rows.push_back(row);
    counts.push_back(crow);
  }
  j["mean_gain"] = rows;
  j["count"] = counts;
  Json anova;
  for (const auto& [grp, res] : t.anova) anova[grp] = to_json(res);
  for (const auto& [grp, note] : t.anova_notes) anova[grp] = {{"note", note}};
  j["anova_by_target_group"] = anova;
  return j;
}

Json to_json(const ValidationReport& v) {
  Json j;
  Json arr = Json::array();
  for (const auto& f : v.findings) arr.push_back({{"code", f.code}, {"message", f.message}});
  j["findings"] = arr;
  j["clean"] = v.clean();
  return j;
}

std::string report_text(const Json& report) {
  return report.dump(2) + "\n";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Diverging blue-white-red, centered at zero.
std::string cell_color(double v, double scale) {
  double t = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
  int r, g, b;
  if (t >= 0) {
    r = 215;
    g = static_cast<int>(std::lround(235.0 - 190.0 * t));
    b = static_cast<int>(std::lround(235.0 - 195.0 * t));
  } else {
    r = static_cast<int>(std::lround(215.0 + 170.0 * t));
    g = static_cast<int>(std::lround(235.0 + 130.0 * t));
    b = 235;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string heatmap_svg(const GainMatrix& g, SigStat sig) {
  const int cell = 26;
  const int left = 140, top = 120;
  const int width = left + cell * static_cast<int>(g.cols()) + 20;
  const int height = top + cell * static_cast<int>(g.rows()) + 20;

  double scale = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (!g.missing(i, j)) scale = std::max(scale, std::abs(g.mean_at(i, j)));

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"monospace\" font-size=\"10\">\n";
  svg << "  <title>mean intertraining gain per (model, target)</title>\n";

  for (std::size_t j = 0; j < g.cols(); ++j) {
    const int x = left + static_cast<int>(j) * cell + cell / 2;
    svg << "  <text class=\"col-label\" x=\"" << x << "\" y=\"" << top - 8
        << "\" text-anchor=\"start\" transform=\"rotate(-60 " << x << " " << top - 8 << ")\">"
        << xml_escape(g.target_ids[j]) << "</text>\n";
  }
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const int y = top + static_cast<int>(i) * cell + cell / 2 + 4;
    svg << "  <text class=\"row-label\" x=\"" << left - 6 << "\" y=\"" << y
        << "\" text-anchor=\"end\">" << xml_escape(g.model_ids[i]) << "</text>\n";
  }

  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const int x = left + static_cast<int>(j) * cell;
      const int y = top + static_cast<int>(i) * cell;
      const bool miss = g.missing(i, j);
      const bool significant = significant_cell(g, i, j, sig);
      svg << "  <rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" data-model=\"" << xml_escape(g.model_ids[i])
          << "\" data-target=\"" << xml_escape(g.target_ids[j]) << "\"";
      if (miss) {
        svg << " data-missing=\"true\" fill=\"#cccccc\"";
      } else {
        svg << " data-gain=\"" << fmt(g.mean_at(i, j)) << "\" data-significant=\""
            << (significant ? "true" : "false") << "\" fill=\""
            << cell_color(g.mean_at(i, j), scale) << "\"";
      }
      svg << " stroke=\"#ffffff\"/>\n";
      if (!miss) {
        svg << "  <text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 3
            << "\" text-anchor=\"middle\" font-size=\"7\"";
        if (significant) svg << " font-style=\"italic\" font-weight=\"bold\"";
        svg << ">" << fmt(g.mean_at(i, j)) << "</text>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string scatter_svg(std::span<const double> x, std::span<const double> y,
                        const std::string& x_label, const std::string& y_label, double slope,
                        double intercept, bool draw_line) {
  const int w = 480, h = 360, margin = 50;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!x.empty()) {
    xmin = *std::min_element(x.begin(), x.end());
    xmax = *std::max_element(x.begin(), x.end());
    ymin = *std::min_element(y.begin(), y.end());
    ymax = *std::max_element(y.begin(), y.end());
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
  }
  const auto sx = [&](double v) { return margin + (v - xmin) / (xmax - xmin) * (w - 2 * margin); };
  const auto sy = [&](double v) { return h - margin - (v - ymin) / (ymax - ymin) * (h - 2 * margin); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"monospace\" font-size=\"10\">\n";
  svg << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w - 2 * margin
      << "\" height=\"" << h - 2 * margin << "\" fill=\"none\" stroke=\"#888888\"/>\n";
  svg << "  <text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">"
      << xml_escape(x_label) << "</text>\n";
  svg << "  <text x=\"14\" y=\"" << h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << h / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  if (draw_line && !x.empty()) {
    svg << "  <line class=\"fit\" x1=\"" << fmt(sx(xmin)) << "\" y1=\""
        << fmt(sy(slope * xmin + intercept)) << "\" x2=\"" << fmt(sx(xmax)) << "\" y2=\""
        << fmt(sy(slope * xmax + intercept)) << "\" stroke=\"#d62728\"/>\n";
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    svg << "  <circle class=\"point\" cx=\"" << fmt(sx(x[i])) << "\" cy=\"" << fmt(sy(y[i]))
        << "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.8\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace intergain
