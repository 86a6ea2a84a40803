// intergain: gain analysis for finetuning-from-finetuned-model score tables.
//
// Subcommands: validate, gains, regress, rank, recommend, sensitivity,
// symmetry, groups, xcorr, synth, analyze. Every flag can also be set via
// an INTERGAIN_<FLAG> environment variable. Reports are deterministic:
// identical inputs, flags, and seeds give byte-identical JSON.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intergain/analysis.hpp"
#include "intergain/decomposition.hpp"
#include "intergain/fixtures.hpp"
#include "intergain/ingest.hpp"
#include "intergain/ranking.hpp"
#include "intergain/report.hpp"
#include "intergain/synth.hpp"

namespace ig = intergain;
using ig::Json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  int n_perm = 10000;
  std::string out_dir;
};

struct InputOpts {
  std::string scores_path;
  std::string baselines_path;
  std::string metadata_path;
  std::string format = "csv";
  bool rescale = false;
};

std::string env_name(std::string flag) {
  std::string out = "INTERGAIN_";
  for (char c : flag) {
    if (c == '-') {
      out += '_';
    } else {
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

CLI::Option* with_env(CLI::Option* opt, const std::string& flag) {
  return opt->envname(env_name(flag));
}

void add_global_opts(CLI::App& app, GlobalOpts& g) {
  with_env(app.add_option("--seed", g.seed, "master RNG seed echoed in every report"), "seed");
  with_env(app.add_option("--threads", g.threads, "worker threads (results are identical for any value)"),
           "threads");
  with_env(app.add_option("--n-perm", g.n_perm, "permutation replicates for p-values (0 skips them)"),
           "n-perm");
  with_env(app.add_option("--out-dir", g.out_dir, "directory for output files"), "out-dir");
}

void add_input_opts(CLI::App& sub, InputOpts& in, bool metadata = true) {
  with_env(sub.add_option("--scores", in.scores_path, "score table (CSV: model,target,seed,score; or JSON)")
               ->required(),
           "scores");
  with_env(sub.add_option("--baselines", in.baselines_path,
                          "baseline table (CSV: target,seed,score); unused for JSON input"),
           "baselines");
  if (metadata)
    with_env(sub.add_option("--metadata", in.metadata_path, "metadata table (CSV: id,key,value)"),
             "metadata");
  with_env(sub.add_option("--format", in.format, "input format: csv or json")
               ->check(CLI::IsMember({"csv", "json"})),
           "format");
  with_env(sub.add_flag("--scale", in.rescale, "accept [0,1]-scaled scores by multiplying by 100"),
           "scale");
}

ig::TableSource to_source(const InputOpts& in) {
  ig::TableSource src;
  src.scores_path = in.scores_path;
  src.baselines_path = in.baselines_path;
  src.metadata_path = in.metadata_path;
  src.format = in.format == "json" ? ig::TableFormat::json : ig::TableFormat::csv;
  src.fractions = in.rescale ? ig::FractionPolicy::rescale : ig::FractionPolicy::reject;
  return src;
}

ig::ScoreTable load_table(const InputOpts& in) { return ig::parse_score_table(to_source(in)); }

Json input_digests(const InputOpts& in) {
  Json j;
  const auto put = [&j](const std::string& label, const std::string& path) {
    if (path.empty()) return;
    j[label] = {{"path", path}, {"digest", ig::file_digest(path)}};
  };
  put("scores", in.scores_path);
  put("baselines", in.baselines_path);
  put("metadata", in.metadata_path);
  return j;
}

Json report_base(const std::string& subcommand, const GlobalOpts& g, Json inputs, Json settings) {
  Json j;
  j["tool"] = {{"name", "intergain"}, {"version", kVersion}};
  j["subcommand"] = subcommand;
  j["inputs"] = std::move(inputs);
  settings["seed"] = g.seed;
  settings["n_perm"] = g.n_perm;
  j["settings"] = std::move(settings);
  j["timing"] = "excluded for determinism (wall-clock times go to stderr)";
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  if (!path.empty()) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ig::ParseError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ig::ParseError("write failed for '" + path + "'");
}

std::string resolve_out(const GlobalOpts& g, const std::string& name) {
  if (g.out_dir.empty()) return name;
  return (std::filesystem::path(g.out_dir) / name).string();
}

void emit_report(const GlobalOpts& g, const Json& report, const std::string& out_path) {
  const std::string text = ig::report_text(report);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(resolve_out(g, out_path), text);
  }
}

ig::PermutationConfig perm_config(const GlobalOpts& g) {
  return ig::PermutationConfig{g.n_perm, g.seed, g.threads};
}

// ---------------------------------------------------------------------------
// Section builders shared by single-purpose subcommands and `analyze`.

Json gains_section(const ig::GainMatrix& gm, ig::SigStat sig) {
  Json sec;
  sec["operation"] = "compute_gains";
  sec["settings"] = {{"significance",
                      std::string(sig == ig::SigStat::std_dev ? "mean > 2*std" : "mean > 2*sem")},
                     {"std_convention", "population (divide by n)"}};
  sec["matrix"] = ig::to_json(gm);
  Json sig_rows = Json::array();
  int n_significant = 0;
  for (std::size_t i = 0; i < gm.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < gm.cols(); ++j) {
      const bool s = ig::significant_cell(gm, i, j, sig);
      n_significant += s;
      row.push_back(s);
    }
    sig_rows.push_back(row);
  }
  sec["significant"] = sig_rows;
  sec["n_significant"] = n_significant;
  sec["per_model"] = ig::to_json(ig::descriptive(gm, ig::Axis::models));
  sec["per_target"] = ig::to_json(ig::descriptive(gm, ig::Axis::targets));
  Json max_j = Json::array();
  for (double v : ig::max_gain(gm)) max_j.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
  sec["max_gain"] = max_j;
  return sec;
}

Json regress_section(const ig::GainMatrix& gm, const ig::FitConfig& cfg, int n_shuffles,
                     bool raw_params) {
  Json sec;
  sec["operation"] = "fit_bilinear + restricted fits + shuffled baseline";
  sec["settings"] = {{"learning_rate", cfg.learning_rate},
                     {"max_iterations", cfg.max_iterations},
                     {"tolerance", cfg.tolerance},
                     {"patience", cfg.patience},
                     {"restarts", cfg.restarts},
                     {"seed", cfg.seed},
                     {"n_shuffles", n_shuffles},
                     {"canonicalized", !raw_params}};
  ig::FitConfig used = cfg;
  used.canonicalize = !raw_params;
  sec["bilinear"] = ig::to_json(ig::fit_bilinear(gm, used));
  sec["base_only"] = ig::to_json(ig::fit_base_only(gm));
  sec["target_only"] = ig::to_json(ig::fit_target_only(gm));
  if (n_shuffles >= 2) {
    sec["shuffled_baseline"] =
        ig::to_json(ig::shuffled_baseline(gm, ig::FitKind::bilinear, n_shuffles, cfg.seed, used));
  }
  return sec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intertraining gain analysis over score tables"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand
  GlobalOpts g;
  add_global_opts(app, g);

  // --- validate ---
  auto* validate_cmd = app.add_subcommand("validate", "check a score table against its invariants");
  InputOpts validate_in;
  add_input_opts(*validate_cmd, validate_in);
  std::string validate_out;
  with_env(validate_cmd->add_option("--out", validate_out, "write the validation report here"), "out");

  // --- gains ---
  auto* gains_cmd = app.add_subcommand("gains", "compute the gain matrix and descriptive stats");
  InputOpts gains_in;
  add_input_opts(*gains_cmd, gains_in);
  std::string gains_out = "report.json";
  std::string gains_sig = "std";
  bool gains_plots = false;
  with_env(gains_cmd->add_option("--out", gains_out, "report path"), "out");
  with_env(gains_cmd->add_option("--sig-stat", gains_sig, "dispersion behind the >2-sigma flag: std or sem")
               ->check(CLI::IsMember({"std", "sem"})),
           "sig-stat");
  with_env(gains_cmd->add_flag("--plots", gains_plots, "also emit heatmap.svg"), "plots");

  // --- regress ---
  auto* regress_cmd = app.add_subcommand("regress", "fit the source/target gain decomposition");
  InputOpts regress_in;
  add_input_opts(*regress_cmd, regress_in);
  ig::FitConfig fit_cfg;
  int regress_shuffles = 20;
  bool regress_raw = false;
  std::string regress_out = "report.json";
  with_env(regress_cmd->add_option("--lr", fit_cfg.learning_rate, "initial gradient step"), "lr");
  with_env(regress_cmd->add_option("--max-iters", fit_cfg.max_iterations, "iteration budget"),
           "max-iters");
  with_env(regress_cmd->add_option("--tol", fit_cfg.tolerance, "per-step MSE improvement floor"), "tol");
  with_env(regress_cmd->add_option("--restarts", fit_cfg.restarts, "number of descent restarts"),
           "restarts");
  with_env(regress_cmd->add_option("--shuffles", regress_shuffles,
                                   "shuffled-gain refits for the baseline comparison"),
           "shuffles");
  with_env(regress_cmd->add_flag("--raw-params", regress_raw, "skip gauge fixing in the output"),
           "raw-params");
  with_env(regress_cmd->add_option("--out", regress_out, "report path"), "out");

  // --- rank ---
  auto* rank_cmd = app.add_subcommand("rank", "static model ranking and lost-gain evaluation");
  InputOpts rank_in;
  std::string rank_scores_path;
  bool rank_by_avg = false;
  std::vector<int> rank_ks{1, 3};
  double rank_threshold = 1.0;
  std::string rank_out = "report.json";
  with_env(rank_cmd->add_option("--scores", rank_scores_path,
                                "quality scores CSV (model,value), e.g. linear-probe gains"),
           "scores");
  with_env(rank_cmd->add_flag("--by-average", rank_by_avg,
                              "rank by average gain over targets instead of a quality file"),
           "by-average");
  with_env(rank_cmd->add_option("--gains", rank_in.scores_path, "score table to evaluate regret on")
               ->required(),
           "gains");
  with_env(rank_cmd->add_option("--baselines", rank_in.baselines_path, "baseline table"), "baselines");
  with_env(rank_cmd->add_option("--format", rank_in.format, "input format: csv or json")
               ->check(CLI::IsMember({"csv", "json"})),
           "format");
  with_env(rank_cmd->add_flag("--scale", rank_in.rescale, "accept [0,1]-scaled scores"), "scale");
  with_env(rank_cmd->add_option("--k", rank_ks, "top-k cutoffs (comma separated)")->delimiter(','), "k");
  with_env(rank_cmd->add_option("--threshold", rank_threshold, "lost-gain threshold for the count aggregate"),
           "threshold");
  with_env(rank_cmd->add_option("--out", rank_out, "report path"), "out");

  // --- recommend ---
  auto* rec_cmd = app.add_subcommand("recommend", "shortlist models from linear-probe gains");
  std::string rec_lp_path;
  int rec_k = 3;
  std::string rec_out;
  with_env(rec_cmd->add_option("--lp", rec_lp_path, "linear-probe gains CSV (model,value)")->required(),
           "lp");
  with_env(rec_cmd->add_option("--k", rec_k, "shortlist size"), "k");
  with_env(rec_cmd->add_option("--out", rec_out, "report path (stdout when omitted)"), "out");

  // --- sensitivity ---
  auto* sens_cmd = app.add_subcommand("sensitivity", "target sensitivity via a single proxy model");
  InputOpts sens_in;
  add_input_opts(*sens_cmd, sens_in);
  std::string sens_proxy;
  bool sens_exclude = false;
  double sens_threshold = 1.0;
  std::string sens_out = "report.json";
  with_env(sens_cmd->add_option("--proxy", sens_proxy, "proxy model id")->required(), "proxy");
  with_env(sens_cmd->add_flag("--exclude-proxy", sens_exclude,
                              "drop the proxy from the max-gain pool it is correlated against"),
           "exclude-proxy");
  with_env(sens_cmd->add_option("--threshold", sens_threshold, "gain above this flags a target sensitive"),
           "threshold");
  with_env(sens_cmd->add_option("--out", sens_out, "report path"), "out");

  // --- symmetry ---
  auto* sym_cmd = app.add_subcommand("symmetry", "symmetric/skew decomposition of a square gain matrix");
  InputOpts sym_in;
  add_input_opts(*sym_cmd, sym_in);
  std::string sym_out = "report.json";
  with_env(sym_cmd->add_option("--out", sym_out, "report path"), "out");

  // --- groups ---
  auto* groups_cmd = app.add_subcommand("groups", "group-by-group mean gains with ANOVA");
  InputOpts groups_in;
  add_input_opts(*groups_cmd, groups_in, /*metadata=*/false);
  std::string groups_labels;
  std::string groups_out = "report.json";
  with_env(groups_cmd->add_option("--labels", groups_labels, "metadata CSV carrying group labels")
               ->required(),
           "labels");
  with_env(groups_cmd->add_option("--out", groups_out, "report path"), "out");

  // --- xcorr ---
  auto* xcorr_cmd = app.add_subcommand("xcorr", "correlate per-id summaries across two experiments");
  InputOpts xcorr_in;
  add_input_opts(*xcorr_cmd, xcorr_in);
  std::string xcorr_other, xcorr_other_baselines, xcorr_quantity = "target_max_gain";
  std::string xcorr_out = "report.json";
  with_env(xcorr_cmd->add_option("--other", xcorr_other, "second score table")->required(), "other");
  with_env(xcorr_cmd->add_option("--other-baselines", xcorr_other_baselines, "second baseline table"),
           "other-baselines");
  with_env(xcorr_cmd->add_option("--quantity", xcorr_quantity,
                                 "model_mean, target_mean, or target_max_gain")
               ->check(CLI::IsMember({"model_mean", "target_mean", "target_max_gain"})),
           "quantity");
  with_env(xcorr_cmd->add_option("--out", xcorr_out, "report path"), "out");

  // --- synth ---
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic score table from the decomposition model");
  ig::GeneratorSpec synth_spec;
  std::string synth_out = "scores.csv";
  std::string synth_baselines_out = "baselines.csv";
  std::string synth_truth_out;
  with_env(synth_cmd->add_option("--models", synth_spec.n_models, "number of models"), "models");
  with_env(synth_cmd->add_option("--targets", synth_spec.n_targets, "number of targets"), "targets");
  with_env(synth_cmd->add_option("--seeds", synth_spec.n_seeds, "seeds per cell"), "seeds");
  with_env(synth_cmd->add_option("--noise", synth_spec.noise_std, "gaussian score noise STD"), "noise");
  with_env(synth_cmd->add_option("--baseline-level", synth_spec.baseline_level, "baseline accuracy level"),
           "baseline-level");
  with_env(synth_cmd->add_flag("--square", synth_spec.square_ids,
                               "share one id set between models and targets"),
           "square");
  with_env(synth_cmd->add_option("--out", synth_out, "scores CSV path"), "out");
  with_env(synth_cmd->add_option("--baselines-out", synth_baselines_out, "baselines CSV path"),
           "baselines-out");
  with_env(synth_cmd->add_option("--truth-out", synth_truth_out, "ground-truth parameters JSON path"),
           "truth-out");

  // --- analyze ---
  auto* analyze_cmd = app.add_subcommand("analyze", "run the full analysis pipeline");
  InputOpts analyze_in;
  add_input_opts(*analyze_cmd, analyze_in);
  bool analyze_all = false;
  bool analyze_plots = false;
  std::string analyze_sig = "std";
  std::string analyze_proxy;
  std::string analyze_lp;
  std::vector<int> analyze_ks{1, 3};
  int analyze_shuffles = 20;
  std::string analyze_out = "report.json";
  with_env(analyze_cmd->add_flag("--all", analyze_all, "run every applicable analysis"), "all");
  with_env(analyze_cmd->add_flag("--plots", analyze_plots, "emit SVG plots next to the report"), "plots");
  with_env(analyze_cmd->add_option("--sig-stat", analyze_sig, "std or sem")
               ->check(CLI::IsMember({"std", "sem"})),
           "sig-stat");
  with_env(analyze_cmd->add_option("--proxy", analyze_proxy,
                                   "sensitivity proxy model (default: top model by average gain)"),
           "proxy");
  with_env(analyze_cmd->add_option("--lp", analyze_lp, "linear-probe gains CSV for predictor fitting"),
           "lp");
  with_env(analyze_cmd->add_option("--k", analyze_ks, "top-k cutoffs")->delimiter(','), "k");
  with_env(analyze_cmd->add_option("--shuffles", analyze_shuffles, "shuffled-gain refits"), "shuffles");
  with_env(analyze_cmd->add_option("--out", analyze_out, "report path"), "out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto started = std::chrono::steady_clock::now();
  int exit_code = 0;
  try {
    fit_cfg.seed = g.seed;
    fit_cfg.threads = g.threads;
    synth_spec.seed = g.seed;

    if (validate_cmd->parsed()) {
      // Parse leniently: semantic problems become findings, not exceptions.
      ig::TableSource src = to_source(validate_in);
      if (!validate_in.rescale) src.fractions = ig::FractionPolicy::keep;
      const ig::ScoreTable table = ig::parse_score_table(src);
      const ig::ValidationReport rep = ig::validate(table);
      Json report = report_base("validate", g, input_digests(validate_in),
                                Json{{"format", validate_in.format}});
      report["sections"]["validation"] = ig::to_json(rep);
      emit_report(g, report, validate_out);
      for (const auto& f : rep.findings) std::cerr << f.code << ": " << f.message << "\n";
      exit_code = rep.clean() ? 0 : 2;
    } else if (gains_cmd->parsed()) {
      const ig::ScoreTable table = load_table(gains_in);
      const ig::GainMatrix gm = ig::compute_gains(table);
      const ig::SigStat sig = gains_sig == "sem" ? ig::SigStat::sem : ig::SigStat::std_dev;
      Json report = report_base("gains", g, input_digests(gains_in),
                                Json{{"sig_stat", gains_sig}, {"format", gains_in.format}});
      report["sections"]["gains"] = gains_section(gm, sig);
      emit_report(g, report, gains_out);
      if (gains_plots) write_file(resolve_out(g, "heatmap.svg"), ig::heatmap_svg(gm, sig));
    } else if (regress_cmd->parsed()) {
      const ig::ScoreTable table = load_table(regress_in);
      const ig::GainMatrix gm = ig::compute_gains(table);
      Json report = report_base("regress", g, input_digests(regress_in),
                                Json{{"lr", fit_cfg.learning_rate},
                                     {"max_iters", fit_cfg.max_iterations},
                                     {"tol", fit_cfg.tolerance},
                                     {"restarts", fit_cfg.restarts},
                                     {"shuffles", regress_shuffles},
                                     {"raw_params", regress_raw}});
      report["sections"]["decomposition"] =
          regress_section(gm, fit_cfg, regress_shuffles, regress_raw);
      emit_report(g, report, regress_out);
    } else if (rank_cmd->parsed()) {
      if (rank_scores_path.empty() == !rank_by_avg)
        throw ig::Error("rank: pass exactly one of --scores or --by-average");
      const ig::ScoreTable table = load_table(rank_in);
      const ig::GainMatrix gm = ig::compute_gains(table);
      std::vector<ig::QualityScore> quality;
      if (rank_by_avg) {
        quality = ig::rank_by_average(gm);
      } else {
        quality = ig::load_quality_csv(rank_scores_path, ig::QualityKind::lp_probe);
      }
      const ig::RankingReport rep = ig::build_ranking_report(gm, quality, rank_ks, rank_threshold);
      Json report = report_base("rank", g, input_digests(rank_in),
                                Json{{"k", rank_ks},
                                     {"threshold", rank_threshold},
                                     {"quality", rank_by_avg ? "avg_gain" : rank_scores_path}});
      report["sections"]["ranking"] = ig::to_json(rep);
      report["sections"]["ranking"]["operation"] = "rank_models + topk_loss";
      emit_report(g, report, rank_out);
    } else if (rec_cmd->parsed()) {
      const auto lp = ig::load_quality_csv(rec_lp_path, ig::QualityKind::lp_probe);
      const auto ranking = ig::rank_models(lp);
      const int k = std::min<int>(rec_k, static_cast<int>(ranking.size()));
      std::map<std::string, double> lp_by_id;
      for (const auto& s : lp) lp_by_id[s.model_id] = s.value;
      Json shortlist = Json::array();
      for (int i = 0; i < k; ++i) {
        const double lp_value = lp_by_id.at(ranking[static_cast<std::size_t>(i)]);
        shortlist.push_back({{"model_id", ranking[static_cast<std::size_t>(i)]},
                             {"lp_gain", lp_value},
                             {"predicted_avg_gain", ig::predict_avg_gain(lp_value)}});
        std::cout << (i + 1) << ". " << ranking[static_cast<std::size_t>(i)]
                  << "  lp=" << lp_value
                  << "  predicted_avg_gain=" << ig::predict_avg_gain(lp_value) << "\n";
      }
      Json report = report_base("recommend", g,
                                Json{{"lp", {{"path", rec_lp_path}, {"digest", ig::file_digest(rec_lp_path)}}}},
                                Json{{"k", rec_k}});
      Json sec;
      sec["operation"] = "rank_models + predict_avg_gain";
      sec["settings"] = {{"predictor_slope", ig::kLpPredictorSlope},
                         {"predictor_intercept", ig::kLpPredictorIntercept}};
      sec["shortlist"] = shortlist;
      report["sections"]["recommend"] = sec;
      if (!rec_out.empty()) emit_report(g, report, rec_out);
    } else if (sens_cmd->parsed()) {
      const ig::ScoreTable table = load_table(sens_in);
      const ig::GainMatrix gm = ig::compute_gains(table);
      ig::SensitivityOptions opts;
      opts.exclude_proxy = sens_exclude;
      opts.flag_threshold = sens_threshold;
      opts.correlation = perm_config(g);
      const ig::SensitivityReport rep = ig::sensitivity_analysis(gm, sens_proxy, opts);
      Json report = report_base("sensitivity", g, input_digests(sens_in),
                                Json{{"proxy", sens_proxy},
                                     {"exclude_proxy", sens_exclude},
                                     {"threshold", sens_threshold}});
      report["sections"]["sensitivity"] = ig::to_json(rep);
      report["sections"]["sensitivity"]["operation"] = "sensitivity_analysis";
      emit_report(g, report, sens_out);
      if (rep.small_sample)
        std::cerr << "warning: fewer than 3 targets entered the correlation\n";
    } else if (sym_cmd->parsed()) {
      const ig::ScoreTable table = load_table(sym_in);
      const ig::GainMatrix gm = ig::compute_gains(table);
      const ig::SymmetryResult res = ig::symmetry_score(gm);
      Json report = report_base("symmetry", g, input_digests(sym_in), Json::object());
      report["sections"]["symmetry"] = ig::to_json(res);
      report["sections"]["symmetry"]["operation"] = "symmetry_score";
      emit_report(g, report, sym_out);
    } else if (groups_cmd->parsed()) {
      InputOpts in = groups_in;
      in.metadata_path = groups_labels;
      const ig::ScoreTable table = load_table(in);
      const ig::GainMatrix gm = ig::compute_gains(table);
      ig::GroupLabeling all;
      all.by_id = table.metadata.group;
      const ig::GroupLabeling model_groups = all.restrict_to(gm.model_ids);
      const ig::GroupLabeling target_groups = all.restrict_to(gm.target_ids);
      const ig::GroupGainTable res = ig::group_gain_table(gm, model_groups, target_groups, perm_config(g));
      Json report = report_base("groups", g, input_digests(in), Json{{"labels", groups_labels}});
      report["sections"]["groups"] = ig::to_json(res);
      report["sections"]["groups"]["operation"] = "group_gain_table";
      emit_report(g, report, groups_out);
    } else if (xcorr_cmd->parsed()) {
      const ig::ScoreTable table = load_table(xcorr_in);
      const ig::GainMatrix gm = ig::compute_gains(table);
      InputOpts other_in;
      other_in.scores_path = xcorr_other;
      other_in.baselines_path = xcorr_other_baselines;
      other_in.format = xcorr_in.format;
      other_in.rescale = xcorr_in.rescale;
      const ig::ScoreTable other_table = load_table(other_in);
      const ig::GainMatrix other = ig::compute_gains(other_table);
      ig::CrossQuantity q = ig::CrossQuantity::target_max_gain;
      if (xcorr_quantity == "model_mean") q = ig::CrossQuantity::model_mean;
      if (xcorr_quantity == "target_mean") q = ig::CrossQuantity::target_mean;
      const ig::CorrelationPair res = ig::cross_matrix_correlation(gm, other, q, perm_config(g));
      Json inputs = input_digests(xcorr_in);
      inputs["other"] = {{"path", xcorr_other}, {"digest", ig::file_digest(xcorr_other)}};
      if (!xcorr_other_baselines.empty())
        inputs["other_baselines"] = {{"path", xcorr_other_baselines},
                                     {"digest", ig::file_digest(xcorr_other_baselines)}};
      Json report = report_base("xcorr", g, inputs, Json{{"quantity", xcorr_quantity}});
      report["sections"]["xcorr"] = ig::to_json(res);
      report["sections"]["xcorr"]["operation"] = "cross_matrix_correlation";
      report["sections"]["xcorr"]["quantity"] = xcorr_quantity;
      emit_report(g, report, xcorr_out);
    } else if (synth_cmd->parsed()) {
      const ig::GeneratedTable gen = ig::generate(synth_spec);
      write_file(resolve_out(g, synth_out), ig::serialize_scores_csv(gen.table));
      write_file(resolve_out(g, synth_baselines_out), ig::serialize_baselines_csv(gen.table));
      if (!synth_truth_out.empty()) {
        Json truth = ig::to_json(gen.truth);
        truth["clamped_scores"] = gen.clamped_scores;
        truth["clamped_baselines"] = gen.clamped_baselines;
        write_file(resolve_out(g, synth_truth_out), ig::report_text(truth));
      }
      std::cerr << "wrote " << gen.table.records.size() << " records, "
                << gen.table.baselines.size() << " baselines";
      if (gen.clamped_scores > 0) std::cerr << " (" << gen.clamped_scores << " scores clamped)";
      std::cerr << "\n";
    } else if (analyze_cmd->parsed()) {
      const ig::ScoreTable table = load_table(analyze_in);
      const ig::ValidationReport vrep = ig::validate(table);
      Json report = report_base("analyze", g, input_digests(analyze_in),
                                Json{{"all", analyze_all},
                                     {"sig_stat", analyze_sig},
                                     {"k", analyze_ks},
                                     {"shuffles", analyze_shuffles},
                                     {"lr", fit_cfg.learning_rate},
                                     {"restarts", fit_cfg.restarts}});
      report["sections"]["validation"] = ig::to_json(vrep);
      if (!vrep.clean()) {
        emit_report(g, report, analyze_out);
        for (const auto& f : vrep.findings) std::cerr << f.code << ": " << f.message << "\n";
        return 2;
      }

      const ig::GainMatrix gm = ig::compute_gains(table);
      const ig::SigStat sig = analyze_sig == "sem" ? ig::SigStat::sem : ig::SigStat::std_dev;
      report["sections"]["gains"] = gains_section(gm, sig);
      report["sections"]["decomposition"] =
          regress_section(gm, fit_cfg, analyze_shuffles, /*raw_params=*/false);

      const auto avg_quality = ig::rank_by_average(gm);
      std::vector<int> ks;
      for (int k : analyze_ks)
        if (k >= 1 && k <= static_cast<int>(gm.rows())) ks.push_back(k);
      const ig::RankingReport rrep = ig::build_ranking_report(gm, avg_quality, ks);
      report["sections"]["ranking"] = ig::to_json(rrep);
      report["sections"]["ranking"]["operation"] = "rank_by_average + topk_loss";

      if (!analyze_lp.empty()) {
        const auto lp = ig::load_quality_csv(analyze_lp, ig::QualityKind::lp_probe);
        const ig::LpPredictorFit fit = ig::fit_lp_predictor(lp, avg_quality, perm_config(g));
        Json sec = ig::to_json(fit);
        sec["operation"] = "fit_lp_predictor";
        sec["reference_prediction"] = {{"slope", ig::kLpPredictorSlope},
                                       {"intercept", ig::kLpPredictorIntercept}};
        report["sections"]["lp_predictor"] = sec;
        if (analyze_plots) {
          std::vector<double> xs, ys;
          std::map<std::string, double> avg_by_id;
          for (const auto& s : avg_quality) avg_by_id[s.model_id] = s.value;
          for (const auto& s : lp) {
            auto it = avg_by_id.find(s.model_id);
            if (it == avg_by_id.end()) continue;
            xs.push_back(s.value);
            ys.push_back(it->second);
          }
          write_file(resolve_out(g, "lp_scatter.svg"),
                     ig::scatter_svg(xs, ys, "linear-probe gain", "average gain", fit.slope,
                                     fit.intercept, true));
        }
      }

      std::string proxy = analyze_proxy;
      if (proxy.empty() && !rrep.ranking.empty()) proxy = rrep.ranking.front();
      if (!proxy.empty() && gm.cols() >= 3) {
        ig::SensitivityOptions opts;
        opts.correlation = perm_config(g);
        try {
          const ig::SensitivityReport srep = ig::sensitivity_analysis(gm, proxy, opts);
          Json sec = ig::to_json(srep);
          sec["operation"] = "sensitivity_analysis";
          report["sections"]["sensitivity"] = sec;
        } catch (const ig::DegenerateError& e) {
          report["sections"]["sensitivity"] = {{"note", e.what()}};
        }
      }

      try {
        const ig::SymmetryResult sres = ig::symmetry_score(gm);
        Json sec = ig::to_json(sres);
        sec["operation"] = "symmetry_score";
        report["sections"]["symmetry"] = sec;
      } catch (const ig::Error& e) {
        report["sections"]["symmetry"] = {{"note", e.what()}};
      }

      if (!table.metadata.group.empty()) {
        ig::GroupLabeling all;
        all.by_id = table.metadata.group;
        const ig::GroupLabeling mg = all.restrict_to(gm.model_ids);
        const ig::GroupLabeling tg = all.restrict_to(gm.target_ids);
        if (!mg.by_id.empty() && !tg.by_id.empty()) {
          try {
            Json sec = ig::to_json(ig::group_gain_table(gm, mg, tg, perm_config(g)));
            sec["operation"] = "group_gain_table";
            report["sections"]["groups"] = sec;
          } catch (const ig::Error& e) {
            report["sections"]["groups"] = {{"note", e.what()}};
          }
        }
      }

      // Metadata correlations for every numeric key with enough coverage.
      std::set<std::string> keys;
      for (const auto& [id, kv] : table.metadata.numeric)
        for (const auto& [key, v] : kv) keys.insert(key);
      for (const auto& key : keys) {
        for (const ig::Axis axis : {ig::Axis::models, ig::Axis::targets}) {
          const char* axis_name = axis == ig::Axis::models ? "models" : "targets";
          try {
            const ig::CorrelationPair pair =
                ig::metadata_correlation(gm, axis, table.metadata, key, perm_config(g));
            Json sec = ig::to_json(pair);
            sec["operation"] = "metadata_correlation";
            sec["key"] = key;
            sec["axis"] = axis_name;
            report["sections"]["metadata_correlation"][key][axis_name] = sec;
          } catch (const ig::Error&) {
            // insufficient coverage on this axis; skip quietly
          }
        }
      }

      emit_report(g, report, analyze_out);
      if (analyze_plots) write_file(resolve_out(g, "heatmap.svg"), ig::heatmap_svg(gm, sig));
    }
  } catch (const ig::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ig::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  std::cerr << "done in " << elapsed.count() << " ms\n";
  return exit_code;
}
