#include "intergain/fixtures.hpp"

#include <algorithm>
#include <map>

#include "intergain/types.hpp"

namespace intergain {

double ReferenceFixture::at(std::string_view row, std::string_view column) const {
  const auto r = std::find(row_labels.begin(), row_labels.end(), row);
  if (r == row_labels.end())
    throw Error("fixture '" + name + "': no row '" + std::string(row) + "'");
  const auto c = std::find(columns.begin(), columns.end(), column);
  if (c == columns.end())
    throw Error("fixture '" + name + "': no column '" + std::string(column) + "'");
  return values[static_cast<std::size_t>(r - row_labels.begin())]
               [static_cast<std::size_t>(c - columns.begin())];
}

namespace {

ReferenceFixture loss_fixture(std::string name, std::string citation, double avg, double max,
                              double n_above, double n_targets) {
  ReferenceFixture f;
  f.name = std::move(name);
  f.citation = std::move(citation);
  f.columns = {"avg", "max", "n_above", "n_targets"};
  f.row_labels = {"aggregate"};
  f.values = {{avg, max, n_above, n_targets}};
  return f;
}

ReferenceFixture make_table2() {
  ReferenceFixture f;
  f.name = "table2_group_gains";
  f.citation = "reference results: mean gain of each source group on each target group, "
               "same-dataset pairs excluded";
  f.columns = {"general", "nli", "twitter"};      // target groups
  f.row_labels = {"general", "nli", "twitter"};   // source groups
  f.values = {
      {-0.37, -2.68, -0.54},
      {1.26, 0.63, -0.03},
      {-0.4, -2.39, 0.53},
  };
  return f;
}

ReferenceFixture make_table3() {
  ReferenceFixture f;
  f.name = "table3_baselines";
  f.citation = "reference results: finetuning the pretrained model directly on each target, "
               "mean and STD over 5 seeds";
  f.columns = {"mean", "std"};
  const struct {
    const char* id;
    const char* display;
    double mean, std;
  } rows[] = {
      {"multirc", "MultiRC", 61.07, 2.01},
      {"qqp", "QQP", 90.92, 0.29},
      {"wsc", "WSC", 63.46, 0.00},
      {"mrpc", "MRPC", 87.70, 0.95},
      {"cola", "CoLA", 83.11, 1.34},
      {"wic", "WIC", 65.55, 2.32},
      {"boolq", "BoolQ", 77.09, 3.19},
      {"copa", "COPA", 49.00, 4.90},
      {"sst2", "SST2", 93.81, 0.26},
      {"cb", "CB", 70.36, 3.11},
      {"qnli", "QNLI", 92.28, 0.48},
      {"wnli", "WNLI", 56.34, 0.00},
      {"rte", "RTE", 72.42, 0.93},
      {"esnli", "ESNLI", 91.05, 0.18},
      {"anli", "ANLI", 51.67, 0.36},
      {"mnli", "MNLI", 87.07, 0.23},
      {"twitter_hate", "Twitter Hate", 52.30, 1.03},
      {"twitter_offensive", "Twitter Offensive", 84.67, 0.41},
      {"twitter_irony", "Twitter Irony", 70.84, 2.53},
      {"twitter_sentiment", "Twitter Sentiment", 70.59, 0.34},
      {"twitter_emoji", "Twitter Emoji", 46.32, 0.56},
      {"twitter_emotion", "Twitter Emotion", 82.08, 0.58},
  };
  for (const auto& r : rows) {
    f.row_labels.push_back(r.id);
    f.values.push_back({r.mean, r.std});
    f.row_notes[r.id] = r.display;
  }
  return f;
}

ReferenceFixture make_table4() {
  ReferenceFixture f;
  f.name = "table4_offtheshelf_models";
  f.citation = "reference results: 66 hub models, average gain over the 14 General targets "
               "and linear-probe gain on the probe dataset";
  f.columns = {"avg_gain", "lp_gain"};
  const struct {
    const char* id;
    const char* hub_name;
    double avg_gain, lp_gain;
  } rows[] = {
      {"imdb_1", "aychang/roberta-base-imdb", -5.91, -12.62},
      {"sentence_4", "sentence-transformers/stsb-roberta-base", -5.84, 2.59},
      {"models_1", "textattack/roberta-base-ag-news", -5.73, -17.09},
      {"twitter_10", "lucaordronneau/twitter-roberta-base-sentiment-...", -5.71, -9.76},
      {"sentence_5", "sentence-transformers/roberta-base-nli-stsb-me...", -5.58, 2.59},
      {"finance_0", "zhayunduo/roberta-base-stocktwits-finetuned", -4.49, -12.60},
      {"sentence_2", "sentence-transformers/msmarco-roberta-base-v3", -4.17, -8.82},
      {"twitter_8", "cardiffnlp/twitter-roberta-base-emotion", -4.17, 1.00},
      {"sentence_1", "sentence-transformers/roberta-base-nli-mean-to...", -4.07, 5.47},
      {"qa_3", "navteca/roberta-base-squad2", -4.04, 4.03},
      {"quora_0", "cross-encoder/quora-roberta-base", -3.61, 8.35},
      {"scratch_0", "neoyipeng/twitter-roberta-base-sentiment-mlm-c...", -3.51, -3.13},
      {"models_5", "neoyipeng/twitter-roberta-base-sentiment-mlm-c...", -3.51, -3.13},
      {"sentence_0", "sentence-transformers/nli-roberta-base", -3.50, 5.47},
      {"models_8", "cointegrated/roberta-base-formality", -3.29, -4.96},
      {"legal_1", "saibo/legal-roberta-base", -3.20, -1.76},
      {"twitter_12", "cardiffnlp/twitter-roberta-base-stance-abortion", -2.95, -8.89},
      {"sst2_0", "Bhumika/roberta-base-finetuned-sst2", -2.77, -3.00},
      {"models_14", "cestwc/roberta-base-unigram-ternary", -2.73, -8.39},
      {"models_11", "mariagrandury/roberta-base-finetuned-sms-spam-...", -2.67, -5.90},
      {"qa_1", "nlpconnect/roberta-base-squad2-nq", -2.57, 3.67},
      {"twitter_13", "bdotloh/twitter-roberta-base-finetuned-twitter...", -2.47, -3.12},
      {"models_0", "textattack/roberta-base-CoLA", -2.38, -2.47},
      {"twitter_6", "cardiffnlp/twitter-roberta-base-dec2021", -2.31, -11.45},
      {"twitter_5", "cardiffnlp/twitter-roberta-base-mar2022", -2.21, -5.38},
      {"quora_1", "navteca/quora-roberta-base", -2.13, 8.35},
      {"models_16", "hoanhkhoa/roberta-base-finetuned-ner", -2.12, -6.82},
      {"twitter_3", "cardiffnlp/twitter-roberta-base-2021-124m", -2.05, -5.30},
      {"twitter_11", "cardiffnlp/twitter-roberta-base-stance-climate", -1.98, -6.29},
      {"legal_0", "akdeniz27/roberta-base-cuad", -1.90, -8.57},
      {"models_13", "cardiffnlp/twitter-roberta-base-stance-feminist", -1.86, -4.25},
      {"imdb_2", "aypan17/roberta-base-imdb", -1.86, -3.50},
      {"models_2", "ghanashyamvtatti/roberta-fake-news", -1.81, -12.47},
      {"scratch_1", "neoyipeng/twitter-roberta-base-sentiment-mlm-skep", -1.71, -8.73},
      {"models_12", "surrey-nlp/roberta-base-finetuned-abbr", -1.65, -0.66},
      {"twitter_4", "cardiffnlp/twitter-roberta-base-emoji", -1.63, -2.76},
      {"models_4", "textattack/roberta-base-rotten-tomatoes", -1.61, 3.73},
      {"legal_2", "marshmellow77/roberta-base-cuad", -1.53, -8.57},
      {"legal_3", "Rakib/roberta-base-on-cuad", -1.33, -2.48},
      {"twitter_7", "cardiffnlp/twitter-roberta-base-sentiment", -1.24, 3.03},
      {"twitter_9", "cardiffnlp/twitter-roberta-base", -1.16, -1.49},
      {"models_15", "thatdramebaazguy/roberta-base-wikimovies", -1.11, -1.76},
      {"finance_1", "vanadhi/roberta-base-fiqa-flm-sq-flit", -1.09, -1.00},
      {"models_3", "allenai/reviews", -1.01, -1.17},
      {"models_7", "princeton-nlp/sup-simcse-roberta-base", -0.99, 4.26},
      {"mrpc_1", "ji-xin/roberta", -0.94, -1.67},
      {"twitter_1", "cardiffnlp/twitter-roberta-base-offensive", -0.91, -2.79},
      {"sst2_1", "textattack/roberta-base-SST-2", -0.84, 3.83},
      {"sentence_3", "sentence-transformers/stsb-roberta-base-v2", -0.80, 1.68},
      {"twitter_2", "cardiffnlp/twitter-roberta-base-irony", -0.69, 0.46},
      {"imdb_0", "textattack/roberta-base-imdb", -0.40, -3.64},
      {"models_6", "VictorSanh/roberta-base-finetuned-yelp-polarity", -0.25, -0.66},
      {"models_10", "gargam/roberta-base-crest", -0.12, -4.21},
      {"twitter_0", "bhadresh-savani/roberta-base-emotion", -0.05, -4.61},
      {"qa_4", "shahrukhx01/roberta-base-boolq", 0.25, 10.42},
      {"mrpc_0", "textattack/roberta-base-MRPC", 0.39, 7.27},
      {"nli_3", "textattack/roberta-base-RTE", 0.42, 14.82},
      {"nli_2", "mujeensung/roberta-base_mnli_bc", 0.48, 23.43},
      {"qa_0", "deepset/roberta-base-squad2-covid", 0.50, -1.11},
      {"qa_2", "csarron/roberta-base-squad-v1", 0.99, 3.38},
      {"stsb_0", "textattack/roberta-base-STS-B", 1.05, 14.66},
      {"models_9", "textattack/roberta-base-QNLI", 1.10, 6.49},
      {"nli_0", "textattack/roberta-base-MNLI", 2.09, 34.39},
      {"nli_1", "cross-encoder/nli-roberta-base", 2.77, 34.09},
      {"stsb_1", "cross-encoder/stsb-roberta-base", 2.82, 30.19},
      {"multitask_0", "facebook/muppet-roberta-base", 3.00, 31.58},
  };
  for (const auto& r : rows) {
    f.row_labels.push_back(r.id);
    f.values.push_back({r.avg_gain, r.lp_gain});
    f.row_notes[r.id] = r.hub_name;
  }
  return f;
}

ReferenceFixture make_appE() {
  ReferenceFixture f;
  f.name = "appE_lp_predictor";
  f.citation = "reference results: linear predictor of a model's average gain from its "
               "linear-probe gain";
  f.columns = {"slope", "intercept"};
  f.row_labels = {"coefficients"};
  f.values = {{kLpPredictorSlope, kLpPredictorIntercept}};
  return f;
}

const std::map<std::string, ReferenceFixture>& registry() {
  static const std::map<std::string, ReferenceFixture> fixtures = [] {
    std::map<std::string, ReferenceFixture> m;
    const std::string lp_cite =
        "reference results: lost gain when trusting the LP-based static ranking";
    const std::string avg_cite =
        "reference results: lost gain when trusting the rank-by-average-gain alternative";
    m["table1_inhouse_loss1"] = loss_fixture("table1_inhouse_loss1", lp_cite, 0.37, 2.11, 3, 22);
    m["table1_inhouse_loss3"] = loss_fixture("table1_inhouse_loss3", lp_cite, 0.2, 1.15, 1, 22);
    m["table1_offtheshelf_loss1"] =
        loss_fixture("table1_offtheshelf_loss1", lp_cite, 2.33, 12.0, 8, 14);
    m["table1_offtheshelf_loss3"] =
        loss_fixture("table1_offtheshelf_loss3", lp_cite, 0.34, 1.62, 2, 14);
    m["table5_inhouse_loss1"] = loss_fixture("table5_inhouse_loss1", avg_cite, 0.37, 2.11, 3, 22);
    m["table5_inhouse_loss3"] = loss_fixture("table5_inhouse_loss3", avg_cite, 0.2, 1.15, 1, 22);
    m["table5_offtheshelf_loss1"] =
        loss_fixture("table5_offtheshelf_loss1", avg_cite, 1.41, 12.0, 3, 14);
    m["table5_offtheshelf_loss3"] =
        loss_fixture("table5_offtheshelf_loss3", avg_cite, 0.29, 1.44, 2, 14);
    m["table2_group_gains"] = make_table2();
    m["table3_baselines"] = make_table3();
    m["table4_offtheshelf_models"] = make_table4();
    m["appE_lp_predictor"] = make_appE();
    return m;
  }();
  return fixtures;
}

}  // namespace

const ReferenceFixture& load_fixture(std::string_view name) {
  const auto& reg = registry();
  auto it = reg.find(std::string(name));
  if (it == reg.end()) {
    std::string names;
    for (const auto& [n, f] : reg) names += (names.empty() ? "" : ", ") + n;
    throw Error("unknown fixture '" + std::string(name) + "'; registered: " + names);
  }
  return it->second;
}

std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const auto& [n, f] : registry()) names.push_back(n);
  return names;
}

}  // namespace intergain
