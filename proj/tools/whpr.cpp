// Command-line front end: dataset generation, training, evaluation,
// feature selection, clustering and single-word queries.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

#include "whpr/harness/clustering.hpp"
#include "whpr/harness/evaluate.hpp"
#include "whpr/harness/selection.hpp"

namespace {

using namespace whpr;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitModel = 3;

LabeledWordSet load_dataset(const std::string& path, int rank) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return read_dataset(in, rank);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ModelError("'" + path + "' is not valid JSON: " + e.what());
  }
}

template <class Fn>
void write_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  fn(out);
}

std::vector<std::size_t> parse_strata(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoul(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad stratum '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("no strata given");
  return out;
}

std::pair<int, int> parse_pool_range(const std::string& text) {
  const auto dash = text.find('-');
  try {
    if (dash == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("bad pool range '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whitehead minimality by pattern recognition"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a labelled dataset");
  std::string gen_kind = "D", gen_out;
  DatasetSpec gspec;
  double scale = 1.0;
  gen->add_option("--kind", gen_kind, "D|Se|SR|SP|S10")->check(CLI::IsMember({"D", "Se", "SR", "SP", "S10"}));
  gen->add_option("--rank", gspec.rank, "Free group rank")->check(CLI::Range(2, kMaxRank));
  gen->add_option("--max-len", gspec.max_length, "Maximum word length L")->check(CLI::PositiveNumber);
  gen->add_option("--per-len", gspec.per_length, "Words per length (D, Se, S10)")->check(CLI::PositiveNumber);
  gen->add_option("--size", gspec.size, "Number of words (SR, SP)")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gspec.seed, "Random seed")->required();
  gen->add_option("--scale", scale, "Shrink L by this factor")->check(CLI::Range(0.0, 1.0));
  gen->add_option("-o,--output", gen_out, "Output TSV (stdout if omitted)");

  // train
  auto* train = app.add_subcommand("train", "Train a pipeline");
  PipelineConfig cfg;
  std::string model_name = "regression", quant_name = "equal", train_path, model_out, criterion = "purity";
  int data_rank = 2;
  std::optional<double> theta;
  std::optional<std::size_t> max_depth;
  std::optional<double> chi2_cutoff;
  train->add_option("--features", cfg.features, "f0..f6, fstar, pool:a-b or patterns:p1,p2,...");
  train->add_option("--model", model_name, "regression|fisher|svm|tree|distance|distance_flat|distance_mahalanobis");
  train->add_option("--quantizer", quant_name, "equal|prob|minerr|none");
  train->add_option("--bins", cfg.bins, "Quantizer intervals M")->check(CLI::Range(2, 1000000));
  train->add_option("--theta", theta, "Fixed decision threshold on the score");
  train->add_option("--train", train_path, "Training TSV")->required();
  train->add_option("--rank", data_rank, "Rank of the dataset words")->check(CLI::Range(2, kMaxRank));
  train->add_option("--seed", cfg.seed, "Seed recorded with the run");
  train->add_option("--max-depth", max_depth, "Tree depth cap");
  train->add_option("--min-node", cfg.tree.min_node, "Smallest tree node that may split");
  train->add_option("--chi2-cutoff", chi2_cutoff, "Tree split significance cutoff");
  train->add_option("--criterion", criterion, "purity|misclassification")
      ->check(CLI::IsMember({"purity", "misclassification"}));
  train->add_option("--eps1", cfg.tree.eps_type1, "Type I error bound (misclassification)");
  train->add_option("--eps2", cfg.tree.eps_type2, "Type II error bound (misclassification)");
  train->add_option("-o,--output", model_out, "Model JSON (stdout if omitted)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Evaluate a trained pipeline");
  std::string eval_model, eval_test, strata_text = "0,4,100", report_out, hist_out;
  std::size_t hist_bins = 50;
  eval->add_option("--model", eval_model, "Model JSON")->required();
  eval->add_option("--test", eval_test, "Test TSV")->required();
  eval->add_option("--strata", strata_text, "Comma-separated length thresholds");
  eval->add_option("--hist-bins", hist_bins, "Score histogram bins")->check(CLI::Range(2, 1000000));
  eval->add_option("--report", report_out, "Accuracy CSV (stdout if omitted)");
  eval->add_option("--hist", hist_out, "Histogram CSV");

  // select-features
  auto* sel = app.add_subcommand("select-features", "Greedy forward feature selection");
  std::string pool_text = "1-3", sel_train, sel_val, sel_quant = "equal";
  SelectionConfig scfg;
  sel->add_option("--pool", pool_text, "Middle-word length range of the x v y pool");
  sel->add_option("--train", sel_train, "Training TSV")->required();
  sel->add_option("--val", sel_val, "Validation TSV")->required();
  sel->add_option("--rank", data_rank, "Rank of the dataset words")->check(CLI::Range(2, kMaxRank));
  sel->add_option("--quantizer", sel_quant, "equal|prob|minerr|none");
  sel->add_option("--bins", scfg.bins, "Quantizer intervals M")->check(CLI::Range(2, 1000000));
  sel->add_option("--max-features", scfg.max_features, "Stop after this many patterns");

  // cluster
  auto* clu = app.add_subcommand("cluster", "K-means length-reduction experiment (rank 2)");
  ClusterOptions copt;
  std::string clu_features = "f2", clu_init = "estimated", clu_data, centers_out, clu_report;
  std::uint64_t clu_seed = 0;
  bool drop_minimal = false;
  clu->add_option("--k", copt.k, "Number of clusters")->check(CLI::PositiveNumber);
  clu->add_option("--features", clu_features, "Feature map");
  clu->add_option("--init", clu_init, "random|estimated")->check(CLI::IsMember({"random", "estimated"}));
  clu->add_option("--seed", clu_seed, "Random seed")->required();
  clu->add_option("--data", clu_data, "TSV of non-minimal words")->required();
  clu->add_option("--sample-fraction", copt.sample_fraction, "Share held out for center estimation")
      ->check(CLI::Range(0.0, 1.0));
  clu->add_option("--max-iter", copt.max_iter, "K-means iteration cap")->check(CLI::PositiveNumber);
  clu->add_flag("--drop-minimal", drop_minimal, "Discard minimal records instead of failing");
  clu->add_option("--centers", centers_out, "Write centers JSON for predict-reducer");
  clu->add_option("--report", clu_report, "Cluster CSV (stdout if omitted)");

  // minimize
  auto* mini = app.add_subcommand("minimize", "Whitehead-minimize one word");
  std::string word_text;
  int word_rank = 2;
  mini->add_option("--word", word_text, "Word, e.g. abAB (capitals are inverses)")->required();
  mini->add_option("--rank", word_rank, "Free group rank")->check(CLI::Range(2, kMaxRank));

  // predict-reducer
  auto* pred = app.add_subcommand("predict-reducer", "Predict a length-reducing Nielsen move");
  std::string pred_word, pred_centers;
  pred->add_option("--word", pred_word, "Non-minimal rank-2 word")->required();
  pred->add_option("--centers", pred_centers, "Centers JSON from cluster")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      gspec.kind = parse_dataset_kind(gen_kind);
      gspec.threads = threads;
      gspec.max_length = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(static_cast<double>(gspec.max_length) * scale)));
      GenerationLog log;
      const LabeledWordSet set = generate_dataset(gspec, &log);
      if (log.skipped_substitutions > 0)
        std::cerr << "note: " << log.skipped_substitutions
                  << " substitutions found no length-increasing move and kept the minimal word\n";
      write_output(gen_out, [&](std::ostream& o) { write_dataset(o, set); });
    } else if (*train) {
      cfg.model = parse_model_kind(model_name);
      cfg.quantizer = quant_name == "none" ? std::nullopt : std::optional(parse_quantizer_kind(quant_name));
      cfg.theta = theta;
      cfg.threads = threads;
      cfg.tree.max_depth = max_depth;
      cfg.tree.chi2_cutoff = chi2_cutoff;
      cfg.tree.criterion = criterion == "purity" ? SplitCriterion::Purity : SplitCriterion::Misclassification;
      const Pipeline p = train_pipeline(load_dataset(train_path, data_rank), cfg);
      write_output(model_out, [&](std::ostream& o) { o << pipeline_to_string(p) << '\n'; });
    } else if (*eval) {
      const Pipeline p = pipeline_from_json(load_json(eval_model));
      const LabeledWordSet test = load_dataset(eval_test, p.features.rank());
      const EvaluationReport rep = evaluate(p, test, parse_strata(strata_text), hist_bins, threads);
      write_output(report_out, [&](std::ostream& o) { write_accuracy_csv(o, rep); });
      if (!hist_out.empty()) write_output(hist_out, [&](std::ostream& o) { write_histogram_csv(o, rep.histogram); });
      const auto& c = rep.confusion.counts;
      std::cerr << "confusion (truth\\predicted): min/min " << c[0][0] << ", min/nonmin " << c[0][1]
                << ", nonmin/min " << c[1][0] << ", nonmin/nonmin " << c[1][1] << '\n';
    } else if (*sel) {
      const auto [lo, hi] = parse_pool_range(pool_text);
      scfg.quantizer = sel_quant == "none" ? std::nullopt : std::optional(parse_quantizer_kind(sel_quant));
      scfg.threads = threads;
      const LabeledWordSet tr = load_dataset(sel_train, data_rank);
      const LabeledWordSet va = load_dataset(sel_val, data_rank);
      const SelectionResult r = greedy_feature_selection(pattern_pool(data_rank, lo, hi), tr, va, scfg);
      std::cout << "step,pattern,validation_accuracy\n0,," << r.baseline_accuracy << '\n';
      for (std::size_t i = 0; i < r.selected.size(); ++i)
        std::cout << i + 1 << ',' << r.selected[i].str() << ',' << r.accuracy_trace[i] << '\n';
    } else if (*clu) {
      LabeledWordSet set = load_dataset(clu_data, 2);
      if (drop_minimal)
        std::erase_if(set.records, [](const WordRecord& r) { return r.label == WordLabel::Minimal; });
      copt.threads = threads;
      const ClusterExperiment ex =
          clustering_experiment(set, parse_feature_map(clu_features, 2), parse_center_init(clu_init), clu_seed, copt);
      write_output(clu_report, [&](std::ostream& o) { write_cluster_csv(o, ex.report); });
      std::cerr << "R_max avg " << ex.report.avg_r_max << ", max " << ex.report.max_r_max << ", min "
                << ex.report.min_r_max << " over " << ex.clustered_indices.size() << " words\n";
      if (!centers_out.empty())
        write_output(centers_out, [&](std::ostream& o) { o << reducer_to_json(ex.reducer).dump(2) << '\n'; });
    } else if (*mini) {
      const CyclicWord w(Word::parse(word_text, word_rank));
      const Minimization m = minimize(w);
      std::cout << "input     " << w.str() << " (length " << w.length() << ")\n";
      std::cout << "minimal   " << m.minimal.str() << " (length " << m.minimal.length() << ")\n";
      std::cout << "is_minimal " << (is_minimal(w) ? "yes" : "no") << '\n';
      for (const auto& t : m.chain.steps) std::cout << "step      " << t.str() << '\n';
    } else if (*pred) {
      const ReducerModel model = reducer_from_json(load_json(pred_centers));
      const CyclicWord w(Word::parse(pred_word, model.features.rank()));
      if (w.empty()) throw DataError("the empty word has no reducing move");
      const NielsenMove t = model.predict(w);
      const CyclicWord img = to_automorphism(t).apply(w);
      std::cout << to_string(t) << '\n';
      std::cerr << "|w| = " << w.length() << ", |w t| = " << img.length()
                << (img.length() < w.length() ? " (reduces)" : " (does not reduce)") << '\n';
    }
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitModel;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
