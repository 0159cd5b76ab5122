// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance [--threads N] [--only K]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "../oracles.hpp"
#include "whpr/harness/clustering.hpp"
#include "whpr/harness/dataset.hpp"
#include "whpr/harness/evaluate.hpp"
#include "whpr/harness/selection.hpp"
#include "whpr/whitehead.hpp"

using namespace whpr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t g_threads = 4;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DatasetSpec by_length(DatasetKind kind, std::size_t max_len, std::size_t per_len, std::uint64_t seed) {
  DatasetSpec s;
  s.kind = kind;
  s.max_length = max_len;
  s.per_length = per_len;
  s.seed = seed;
  s.threads = g_threads;
  return s;
}

// ---- 1: greedy minimization against the orbit search -----------------------

Outcome minimization_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto minima = oracle::orbit_minima(2, 8, 2);
  std::vector<std::pair<std::string, std::size_t>> items(minima.begin(), minima.end());
  std::vector<char> agree(items.size(), 0);
  parallel_for(items.size(), g_threads, [&](std::size_t i) {
    agree[i] = minimize(CyclicWord::parse(items[i].first, 2)).minimal.length() == items[i].second;
  });
  std::size_t ok = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < items.size(); ++i) {
    ok += agree[i];
    if (!agree[i] && first_bad.empty()) first_bad = items[i].first;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ok == items.size() && !items.empty() && secs < 300.0;
  o.detail = fmt("%zu/%zu cyclic words of length <= 8 agree, %.1f s", ok, items.size(), secs);
  if (!first_bad.empty()) o.detail += ", first mismatch " + first_bad;
  return o;
}

// ---- 2, 3, 5: the regression pipeline on D / S_e ---------------------------

struct SeedRun {
  LabeledWordSet train, test;
};

const std::vector<std::uint64_t> kTrainSeeds = {1, 2, 3};

std::vector<SeedRun>& seed_runs() {
  static std::vector<SeedRun> runs = [] {
    std::vector<SeedRun> r;
    for (std::uint64_t s : kTrainSeeds)
      r.push_back({generate_dataset(by_length(DatasetKind::D, 1000, 10, s)),
                   generate_dataset(by_length(DatasetKind::Se, 1000, 10, 1000 + s))});
    return r;
  }();
  return runs;
}

Pipeline train_regression(const LabeledWordSet& train, const std::string& features) {
  PipelineConfig cfg;
  cfg.features = features;
  cfg.model = ModelKind::Regression;
  cfg.quantizer = QuantizerKind::EqualInterval;
  cfg.bins = 100;
  cfg.threads = g_threads;
  return train_pipeline(train, cfg);
}

bool stable(const std::vector<double>& v, double tol) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v)
    if (std::abs(x - mean) > tol) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt("%.4f", x);
  return s;
}

Outcome f6_accuracy() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> all, longw;
  for (const auto& run : seed_runs()) {
    const Pipeline p = train_regression(run.train, "f6");
    const auto rep = evaluate(p, run.test, {0, 100}, 50, g_threads);
    all.push_back(rep.strata[0].accuracy.value_or(0.0));
    longw.push_back(rep.strata[1].accuracy.value_or(0.0));
  }
  bool pass = stable(all, 0.03) && stable(longw, 0.03);
  for (std::size_t i = 0; i < all.size(); ++i) pass = pass && all[i] >= 0.95 && longw[i] >= 0.97;
  const double secs = seconds_since(t0);
  return {pass && secs < 600.0,
          "f6 regression, A(all) = [" + list(all) + "], A(|w|>100) = [" + list(longw) + "], " + fmt("%.1f s", secs)};
}

Outcome small_map_accuracy() {
  std::vector<double> star, f1;
  for (const auto& run : seed_runs()) {
    star.push_back(evaluate(train_regression(run.train, "fstar"), run.test, {0}, 50, g_threads).strata[0].accuracy.value_or(0));
    f1.push_back(evaluate(train_regression(run.train, "f1"), run.test, {0}, 50, g_threads).strata[0].accuracy.value_or(0));
  }
  bool pass = stable(star, 0.03) && stable(f1, 0.03);
  for (std::size_t i = 0; i < star.size(); ++i) pass = pass && star[i] >= 0.96 && f1[i] >= 0.92;
  return {pass, "A(fstar) = [" + list(star) + "], A(f1) = [" + list(f1) + "]"};
}

Outcome histogram_separation() {
  const auto& run = seed_runs().front();
  const Pipeline p = train_regression(run.train, "f6");
  const ScoreHistogram h = score_histogram(p, run.test, 50, std::nullopt, g_threads);
  const double overlap = h.overlap_mass();
  const double low1 = h.mass_below(1, 0.5);
  const double low2 = h.mass_below(2, 0.5);
  return {overlap <= 0.05 && low1 > 0.5 && low2 < 0.5,
          fmt("histogram overlap %.4f of total mass; class 1 below 0.5: %.4f, class 2 below 0.5: %.4f", overlap, low1,
              low2)};
}

// ---- 4: 4-means with estimated versus random centers ------------------------

Outcome reducer_clustering() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto all = generate_dataset(by_length(DatasetKind::D, 1000, 10, 7));
  LabeledWordSet nonmin;
  for (const auto& r : all.records)
    if (r.label == WordLabel::NonMinimal) nonmin.records.push_back(r);
  nonmin.annotate_reducers(g_threads);
  const FeatureMap f2 = builtin_map("f2", 2);
  ClusterOptions opt;
  opt.threads = g_threads;
  const auto est = clustering_experiment(nonmin, f2, CenterInit::Estimated, 11, opt);
  const auto rnd = clustering_experiment(nonmin, f2, CenterInit::Random, 11, opt);
  const double secs = seconds_since(t0);
  const std::size_t n = est.clustered_indices.size();
  const bool pass = n >= 4000 && est.report.avg_r_max >= 0.90 && est.report.avg_r_max >= rnd.report.avg_r_max &&
                    secs < 300.0;
  return {pass, fmt("%zu words clustered; estimated avg/min R_max %.4f/%.4f, random %.4f/%.4f, %.1f s", n,
                    est.report.avg_r_max, est.report.min_r_max, rnd.report.avg_r_max, rnd.report.min_r_max, secs)};
}

// ---- 6: numerics properties on randomized instances -------------------------

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = 2.0 * rng.uniform01() - 1.0;
  return m;
}

double max_abs(const Matrix& m) {
  double x = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) x = std::max(x, std::abs(m(i, j)));
  return x;
}

LabeledSet two_clouds(std::size_t n, std::size_t d, double gap, Rng& rng) {
  Matrix x = random_matrix(n, d, rng);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2 == 0 ? 1 : 2;
    x(i, 0) += y[i] == 1 ? -gap : gap;
  }
  return LabeledSet(std::move(x), std::move(y), 2);
}

struct Property {
  const char* name;
  std::function<bool(Rng&)> holds;
};

Outcome numerics_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Property> props = {
      {"covariance PSD",
       [](Rng& rng) {
         const Matrix x = random_matrix(1 + rng.below(30), 1 + rng.below(8), rng);
         const auto e = sym_eigen(mean_and_covariance(x).covariance);
         return e.values.back() >= -1e-9 * std::max(e.values.front(), 0.0);
       }},
      {"eigen reconstruction",
       [](Rng& rng) {
         const std::size_t n = 1 + rng.below(10);
         Matrix a = random_matrix(n, n, rng);
         a = 0.5 * (a + a.transpose());
         const auto e = sym_eigen(a);
         Matrix lam(n, n);
         for (std::size_t i = 0; i < n; ++i) lam(i, i) = e.values[i];
         return max_abs(a - e.vectors * lam * e.vectors.transpose()) < 1e-9 * std::max(1.0, max_abs(a));
       }},
      {"normal-equation residual",
       [](Rng& rng) {
         const std::size_t d = 1 + rng.below(6);
         const Matrix a = random_matrix(d + 5 + rng.below(30), d, rng);
         Vector b(a.rows());
         for (double& x : b) x = rng.uniform01();
         const Vector v = least_squares(a, b);
         return norm(a.transpose() * subtract(a * v, b)) < 1e-8;
       }},
      {"S = S_w + S_b",
       [](Rng& rng) {
         const FisherScatter s = fisher_scatter(two_clouds(4 + rng.below(40), 1 + rng.below(6), rng.uniform01(), rng));
         return max_abs(s.mixture - (s.within + s.between)) < 1e-10;
       }},
      {"chi2 - PR constant",
       [](Rng& rng) {
         const std::size_t c = 2 + rng.below(4);
         std::vector<std::size_t> total(c);
         for (auto& t : total) t = 1 + rng.below(30);
         double first = std::numeric_limits<double>::quiet_NaN();
         for (int split = 0; split < 4; ++split) {
           std::vector<std::size_t> l(c), r(c);
           for (std::size_t k = 0; k < c; ++k) {
             l[k] = rng.below(total[k] + 1);
             r[k] = total[k] - l[k];
           }
           const NodeStats s = node_stats(l, r);
           if (std::isnan(first))
             first = s.chi2 - s.purity;
           else if (std::abs(s.chi2 - s.purity - first) > 1e-9)
             return false;
         }
         return true;
       }},
      {"SVM margins",
       [](Rng& rng) {
         const LabeledSet set = two_clouds(10 + rng.below(30), 1 + rng.below(4), 1.2, rng);
         const LinearModel m = fit_linear(set, LinearMethod::Svm);
         for (std::size_t i = 0; i < set.size(); ++i) {
           const double y = set.labels[i] == 1 ? 1.0 : -1.0;
           if (y * m.score(set.features.row(i)) < 1.0 - 1e-6) return false;
         }
         return true;
       }},
      {"K-means objective nonincreasing",
       [](Rng& rng) {
         const std::size_t n = 5 + rng.below(60);
         const Matrix x = random_matrix(n, 1 + rng.below(4), rng);
         const std::size_t max_iter = 1 + rng.below(50);
         const auto m = kmeans(x, 1 + rng.below(std::min<std::size_t>(n, 6)), std::nullopt, max_iter, &rng);
         if (m.iterations > max_iter) return false;
         for (std::size_t i = 1; i < m.objective_history.size(); ++i)
           if (m.objective_history[i] > m.objective_history[i - 1] + 1e-12) return false;
         return true;
       }},
      {"min-error quantizer <= equal-interval",
       [](Rng& rng) {
         const std::size_t n = 3 + rng.below(80);
         std::vector<double> s(n);
         std::vector<int> y(n);
         for (std::size_t i = 0; i < n; ++i) {
           s[i] = rng.uniform01();
           y[i] = rng.coin(s[i]) ? 2 : 1;
         }
         const std::size_t m = 2 + rng.below(10);
         return build_quantizer(s, y, m, QuantizerKind::MinError).error(s, y) <=
                build_quantizer(s, y, m, QuantizerKind::EqualInterval).error(s, y);
       }},
  };
  constexpr std::size_t kInstances = 1000;
  std::string failures;
  for (std::size_t p = 0; p < props.size(); ++p) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < kInstances; ++i) {
      Rng rng = Rng::stream(606 + p, i);
      if (!props[p].holds(rng)) ++bad;
    }
    if (bad) failures += fmt(" %s failed %zu/%zu;", props[p].name, bad, kInstances);
  }
  const double secs = seconds_since(t0);
  return {failures.empty() && secs < 120.0,
          fmt("%zu properties x %zu instances, %.1f s", props.size(), kInstances, secs) + failures};
}

// ---- 7: byte-identical artifacts for 1 and N threads ------------------------

std::string artifacts(std::size_t threads) {
  std::ostringstream all;
  auto spec = [&](DatasetKind k, std::uint64_t seed) {
    DatasetSpec s = by_length(k, 200, 10, seed);
    s.size = 1000;
    s.threads = threads;
    return s;
  };
  const auto train = generate_dataset(spec(DatasetKind::D, 5));
  const auto test = generate_dataset(spec(DatasetKind::Se, 6));
  all << dataset_to_string(train) << dataset_to_string(test);
  all << dataset_to_string(generate_dataset(spec(DatasetKind::SR, 7)));
  all << dataset_to_string(generate_dataset(spec(DatasetKind::SP, 8)));
  all << dataset_to_string(generate_dataset(spec(DatasetKind::S10, 9)));

  for (ModelKind kind : {ModelKind::Regression, ModelKind::Tree}) {
    PipelineConfig cfg;
    cfg.model = kind;
    cfg.threads = threads;
    const Pipeline p = train_pipeline(train, cfg);
    all << pipeline_to_string(p);
    const auto rep = evaluate(p, test, kDefaultStrata, 50, threads);
    write_accuracy_csv(all, rep);
    write_histogram_csv(all, rep.histogram);
  }

  SelectionConfig sc;
  sc.max_features = 3;
  sc.threads = threads;
  for (std::size_t i : greedy_feature_selection(pattern_pool(2, 1, 1), train, test, sc).pool_indices) all << i << ',';

  LabeledWordSet nonmin;
  for (const auto& r : train.records)
    if (r.label == WordLabel::NonMinimal) nonmin.records.push_back(r);
  ClusterOptions opt;
  opt.threads = threads;
  const auto ex = clustering_experiment(nonmin, builtin_map("f2", 2), CenterInit::Random, 3, opt);
  write_cluster_csv(all, ex.report);
  all << reducer_to_json(ex.reducer).dump();
  return all.str();
}

Outcome determinism() {
  const std::size_t many = std::max<std::size_t>(g_threads, 2);
  const std::string one = artifacts(1);
  const std::string par = artifacts(many);
  const std::string again = artifacts(many);
  return {one == par && par == again,
          fmt("%zu bytes of generated artifacts; 1 vs %zu threads %s", one.size(), many,
              one == par && par == again ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      g_threads = std::max<std::size_t>(1, std::strtoul(argv[++i], nullptr, 10));
    else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"minimization matches exhaustive orbit search", minimization_oracle},
      {"f6 regression accuracy on S_e", f6_accuracy},
      {"fstar and f1 regression accuracy", small_map_accuracy},
      {"4-means reducing-move purity", reducer_clustering},
      {"score histogram separation", histogram_separation},
      {"numerics property suite", numerics_suite},
      {"determinism across thread counts", determinism},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only != 0 && static_cast<std::size_t>(only) != c + 1) continue;
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] AC%zu %s: %s\n", o.pass ? "PASS" : "FAIL", c + 1, criteria[c].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
