#include <gtest/gtest.h>

#include <sstream>

#include "whpr/harness/clustering.hpp"
#include "whpr/harness/dataset.hpp"
#include "whpr/harness/evaluate.hpp"
#include "whpr/harness/selection.hpp"

using namespace whpr;

namespace {

DatasetSpec spec_of(DatasetKind kind, std::size_t max_len, std::size_t per_len, std::uint64_t seed) {
  DatasetSpec s;
  s.kind = kind;
  s.max_length = max_len;
  s.per_length = per_len;
  s.size = max_len * per_len;
  s.seed = seed;
  return s;
}

// Some word whose only reducing Nielsen move is t, found by random search.
CyclicWord pure_word(NielsenMove t, std::uint64_t seed) {
  Rng rng(seed);
  for (;;) {
    const CyclicWord w = random_cyclic_word(2 + rng.below(12), 2, rng);
    const auto r = reducing_moves(w);
    if (r.size() == 1 && r[0] == t) return w;
  }
}

LabeledWordSet set_of(const std::vector<CyclicWord>& words) {
  LabeledWordSet s;
  for (const auto& w : words) s.records.push_back({w, is_minimal(w) ? WordLabel::Minimal : WordLabel::NonMinimal, {}});
  return s;
}

}  // namespace

TEST(Dataset, ByLengthLayout) {
  const auto set = generate_dataset(spec_of(DatasetKind::D, 3, 2, 1));
  ASSERT_EQ(set.size(), 6u);
  for (std::size_t r = 0; r < set.size(); ++r) {
    const auto& rec = set.records[r];
    const std::size_t base = r / 2 + 1;
    if (rec.label == WordLabel::Minimal)
      EXPECT_LE(rec.word.length(), base);
    else
      EXPECT_GT(rec.word.length(), minimize(rec.word).minimal.length());
  }
  EXPECT_FALSE(set.first_unsound().has_value());
}

TEST(Dataset, LabelsAreSoundForEveryKind) {
  for (DatasetKind k : {DatasetKind::D, DatasetKind::Se, DatasetKind::SR, DatasetKind::SP, DatasetKind::S10}) {
    GenerationLog log;
    const auto set = generate_dataset(spec_of(k, 40, 5, 7), &log);
    EXPECT_EQ(set.size(), 200u) << to_string(k);
    EXPECT_FALSE(set.first_unsound(2).has_value()) << to_string(k);
    EXPECT_GT(set.count(WordLabel::NonMinimal), 0u) << to_string(k);
  }
}

TEST(Dataset, SubstitutionsRoughlyHalf) {
  const auto set = generate_dataset(spec_of(DatasetKind::D, 100, 10, 3));
  const double frac = static_cast<double>(set.count(WordLabel::NonMinimal)) / static_cast<double>(set.size());
  EXPECT_NEAR(frac, 0.5, 0.06);
}

TEST(Dataset, PrimitiveSetMinimizesToLetters) {
  const auto set = generate_dataset(spec_of(DatasetKind::SP, 60, 1, 11));
  for (const auto& r : set.records) EXPECT_EQ(minimize(r.word).minimal.length(), 1u) << r.word.str();
}

TEST(Dataset, ThreadCountDoesNotChangeOutput) {
  for (DatasetKind k : {DatasetKind::D, DatasetKind::SR, DatasetKind::SP}) {
    auto s = spec_of(k, 60, 4, 99);
    s.threads = 1;
    const std::string one = dataset_to_string(generate_dataset(s));
    s.threads = 4;
    EXPECT_EQ(dataset_to_string(generate_dataset(s)), one);
  }
  EXPECT_NE(dataset_to_string(generate_dataset(spec_of(DatasetKind::D, 30, 2, 1))),
            dataset_to_string(generate_dataset(spec_of(DatasetKind::Se, 30, 2, 1))));
}

TEST(Dataset, TsvRoundTripAndErrors) {
  const auto set = generate_dataset(spec_of(DatasetKind::Se, 20, 3, 5));
  std::istringstream in(dataset_to_string(set));
  const auto back = read_dataset(in, 2);
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back.records[i].word, set.records[i].word);
    EXPECT_EQ(back.records[i].label, set.records[i].label);
  }
  auto parse = [](const std::string& text) {
    std::istringstream s(text);
    return read_dataset(s, 2);
  };
  EXPECT_EQ(parse("# c\nab\tnonmin\t2\n").size(), 1u);
  EXPECT_THROW(parse("ba\tnonmin\t2\n"), DataError);
  EXPECT_THROW(parse("ab\tmaybe\t2\n"), DataError);
  EXPECT_THROW(parse("ab\tnonmin\t3\n"), DataError);
  EXPECT_THROW(parse("ab nonmin 2\n"), DataError);
  EXPECT_THROW(parse("ac\tnonmin\t2\n"), DataError);
}

TEST(Evaluate, OracleIsPerfect) {
  const auto set = generate_dataset(spec_of(DatasetKind::Se, 120, 2, 8));
  const auto rep = evaluate(oracle_predictor(), set, kDefaultStrata, 10, 3);
  ASSERT_EQ(rep.strata.size(), 3u);
  for (const auto& s : rep.strata) {
    ASSERT_TRUE(s.accuracy.has_value());
    EXPECT_EQ(*s.accuracy, 1.0);
  }
  EXPECT_EQ(rep.confusion.counts[0][1] + rep.confusion.counts[1][0], 0u);
  EXPECT_EQ(rep.confusion.total(), set.size());
  EXPECT_EQ(rep.histogram.total(), set.size());
  EXPECT_EQ(rep.histogram.overlap_mass(), 0.0);
}

TEST(Evaluate, ConstantPredictorScoresTheClassShare) {
  const auto set = generate_dataset(spec_of(DatasetKind::Se, 200, 5, 9));
  const Predictor always_min = [](const CyclicWord&) { return Prediction{1, 0.0}; };
  const auto rep = evaluate(always_min, set);
  const double share = static_cast<double>(set.count(WordLabel::Minimal)) / static_cast<double>(set.size());
  EXPECT_DOUBLE_EQ(*rep.strata[0].accuracy, share);
  EXPECT_NEAR(share, 0.5, 0.05);
}

TEST(Evaluate, StratumOfLongWordsMayBeEmpty) {
  const auto set = generate_dataset(spec_of(DatasetKind::D, 3, 2, 1));
  const auto rep = evaluate(oracle_predictor(), set, {0, 100});
  EXPECT_FALSE(rep.strata[1].accuracy.has_value());
  std::ostringstream csv;
  write_accuracy_csv(csv, rep);
  EXPECT_EQ(csv.str(), "stratum,n,accuracy\n|w|>0,6,1\n|w|>100,0,\n");
}

TEST(Histogram, BinsAndClamping) {
  const std::vector<double> s{0.0, 0.25, 0.5, 1.0, 2.0};
  const std::vector<int> y{1, 1, 2, 2, 2};
  const auto h = bin_scores(s, y, 4, std::pair{0.0, 1.0});
  EXPECT_EQ(h.class1, (std::vector<std::size_t>{1, 1, 0, 0}));
  EXPECT_EQ(h.class2, (std::vector<std::size_t>{0, 0, 1, 2}));
  EXPECT_DOUBLE_EQ(h.centers[0], 0.125);
  EXPECT_DOUBLE_EQ(h.mass_below(1, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(h.mass_below(2, 0.5), 0.0);
  EXPECT_THROW(bin_scores(s, y, 1), std::invalid_argument);
}

TEST(Pipeline, FeatureMapSetsWeightCount) {
  const auto train = generate_dataset(spec_of(DatasetKind::D, 40, 4, 2));
  PipelineConfig cfg;
  cfg.features = "fstar";
  const Pipeline star = train_pipeline(train, cfg);
  EXPECT_EQ(std::get<LinearModel>(star.model).weights.size(), 2u);
  cfg.features = "f6";
  const Pipeline f6 = train_pipeline(train, cfg);
  EXPECT_EQ(std::get<LinearModel>(f6.model).weights.size(), 60u);
  EXPECT_TRUE(std::get<LinearModel>(f6.model).quantizer.has_value());
}

TEST(Pipeline, JsonRoundTripPreservesPredictions) {
  const auto train = generate_dataset(spec_of(DatasetKind::D, 40, 4, 3));
  const auto test = generate_dataset(spec_of(DatasetKind::Se, 40, 4, 3));
  for (ModelKind kind : {ModelKind::Regression, ModelKind::Fisher, ModelKind::Tree, ModelKind::DistanceMahalanobis}) {
    PipelineConfig cfg;
    cfg.features = "f2";
    cfg.model = kind;
    const Pipeline p = train_pipeline(train, cfg);
    const std::string text = pipeline_to_string(p);
    const Pipeline back = pipeline_from_json(json::parse(text));
    EXPECT_EQ(pipeline_to_string(back), text) << to_string(kind);
    for (const auto& r : test.records) {
      EXPECT_EQ(p.predict(r.word).label, back.predict(r.word).label);
      EXPECT_EQ(p.predict(r.word).score, back.predict(r.word).score);
    }
  }
  EXPECT_THROW(pipeline_from_json(json::parse(R"({"schema_version":99})")), ModelError);
  EXPECT_THROW(pipeline_from_json(json::parse("[]")), ModelError);
}

TEST(Pipeline, ThetaOverride) {
  const auto train = generate_dataset(spec_of(DatasetKind::D, 30, 4, 4));
  PipelineConfig cfg;
  cfg.features = "f0";
  cfg.theta = 1e9;
  const Pipeline p = train_pipeline(train, cfg);
  const auto& lin = std::get<LinearModel>(p.model);
  const int low = lin.rule.orientation == Orientation::LowIsClass1 ? 1 : 2;
  for (const auto& r : train.records) EXPECT_EQ(p.predict(r.word).label, low);
}

TEST(Selection, PicksTheDeterminingPattern) {
  // label 2 exactly when "aa" occurs
  Rng rng(21);
  auto make = [&](std::size_t n) {
    LabeledWordSet s;
    const Pattern aa = Pattern::parse("aa", 2);
    for (std::size_t i = 0; i < n; ++i) {
      const CyclicWord w = random_cyclic_word(3 + rng.below(20), 2, rng);
      s.records.push_back({w, count_pattern(w, aa) > 0 ? WordLabel::NonMinimal : WordLabel::Minimal, {}});
    }
    return s;
  };
  const auto train = make(300), val = make(200);
  std::vector<Pattern> pool;
  for (const char* p : {"b", "aB", "Ab", "aa", "bb"}) pool.push_back(Pattern::parse(p, 2));
  SelectionConfig cfg;
  cfg.threads = 3;
  const auto res = greedy_feature_selection(pool, train, val, cfg);
  ASSERT_FALSE(res.selected.empty());
  EXPECT_EQ(res.selected[0].str(), "aa");
  EXPECT_EQ(res.accuracy_trace[0], 1.0);
  double prev = res.baseline_accuracy;
  for (double a : res.accuracy_trace) {
    EXPECT_GE(a - prev, cfg.min_improvement);
    prev = a;
  }
  EXPECT_THROW(greedy_feature_selection({}, train, val), DataError);
}

TEST(Selection, ThreadCountDoesNotChangeResult) {
  const auto train = generate_dataset(spec_of(DatasetKind::D, 30, 4, 5));
  const auto val = generate_dataset(spec_of(DatasetKind::Se, 30, 4, 5));
  const auto pool = pattern_pool(2, 1, 1);
  SelectionConfig a;
  a.max_features = 4;
  SelectionConfig b = a;
  b.threads = 4;
  const auto ra = greedy_feature_selection(pool, train, val, a);
  const auto rb = greedy_feature_selection(pool, train, val, b);
  EXPECT_EQ(ra.pool_indices, rb.pool_indices);
  EXPECT_EQ(ra.accuracy_trace, rb.accuracy_trace);
}

TEST(Clustering, EstimatedCentersFromSingletons) {
  const FeatureMap f2 = builtin_map("f2", 2);
  std::vector<CyclicWord> words;
  for (std::size_t t = 0; t < 4; ++t) words.push_back(pure_word(kNielsenMoves[t], 100 + t));
  const Matrix c = estimate_initial_centers(set_of(words), f2);
  for (std::size_t t = 0; t < 4; ++t) {
    const auto f = f2(words[t]);
    for (std::size_t j = 0; j < f.size(); ++j) EXPECT_EQ(c(t, j), f[j]);
  }
}

TEST(Clustering, MissingPureSetIsReported) {
  const FeatureMap f2 = builtin_map("f2", 2);
  // "ab" is reduced by two moves, so it belongs to no pure set
  std::vector<CyclicWord> words{CyclicWord::parse("ab", 2)};
  for (std::size_t t = 0; t < 3; ++t) words.push_back(pure_word(kNielsenMoves[t], 200 + t));
  try {
    estimate_initial_centers(set_of(words), f2);
    FAIL() << "expected EmptyPureSet";
  } catch (const EmptyPureSet& e) {
    EXPECT_EQ(e.move, kNielsenMoves[3]);
  }
}

TEST(Clustering, ReportInvariants) {
  LabeledWordSet set;
  const auto all = generate_dataset(spec_of(DatasetKind::D, 60, 10, 6));
  for (const auto& r : all.records)
    if (r.label == WordLabel::NonMinimal) set.records.push_back(r);
  const FeatureMap f2 = builtin_map("f2", 2);
  for (CenterInit init : {CenterInit::Random, CenterInit::Estimated}) {
    const auto ex = clustering_experiment(set, f2, init, 5);
    EXPECT_EQ(ex.sample_indices.size() + ex.clustered_indices.size(), set.size());
    std::size_t total = 0;
    for (const auto& c : ex.report.clusters) {
      total += c.size;
      if (c.size == 0) continue;
      double mx = 0.0;
      for (double r : c.reduce_fraction) {
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
        mx = std::max(mx, r);
      }
      EXPECT_EQ(c.r_max, mx);
      EXPECT_EQ(c.reduce_fraction[index_of(c.move)], mx);
      EXPECT_GT(c.r_max, 0.0);
    }
    EXPECT_EQ(total, ex.clustered_indices.size());
    EXPECT_LE(ex.report.min_r_max, ex.report.avg_r_max);
    EXPECT_LE(ex.report.avg_r_max, ex.report.max_r_max);
  }
  EXPECT_THROW(clustering_experiment(all, f2, CenterInit::Random, 5), DataError);
}

TEST(ReducerModel, NearestCenterAndTies) {
  const FeatureMap f0 = builtin_map("f0", 2);
  const CyclicWord w = CyclicWord::parse("ab", 2);
  const auto x = f0(w);
  ReducerModel m{f0, Matrix(2, 4), {NielsenMove::BtoAinvB, NielsenMove::AtoAB}};
  std::copy(x.begin(), x.end(), m.centers.row(0).begin());
  std::copy(x.begin(), x.end(), m.centers.row(1).begin());
  // equidistant: the earlier move wins regardless of cluster order
  EXPECT_EQ(predict_reducer(w, m), NielsenMove::AtoAB);
  m.centers(1, 0) += 1.0;
  EXPECT_EQ(predict_reducer(w, m), NielsenMove::BtoAinvB);

  const std::string text = reducer_to_json(m).dump();
  const ReducerModel back = reducer_from_json(json::parse(text));
  EXPECT_EQ(reducer_to_json(back).dump(), text);
  EXPECT_THROW(reducer_from_json(json::parse(R"({"schema_version":1})")), ModelError);
}
