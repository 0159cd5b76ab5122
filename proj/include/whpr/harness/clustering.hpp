#pragma once

// 4-means clustering of non-minimal rank-2 words and the nearest-center
// length-reducing move predictor.

#include <array>
#include <cmath>

#include "whpr/classifiers/kmeans.hpp"
#include "whpr/harness/pipeline.hpp"

namespace whpr {

class EmptyPureSet : public DataError {
 public:
  explicit EmptyPureSet(NielsenMove t)
      : DataError("no sample word is reduced by " + to_string(t) + " alone; enlarge the sample"), move(t) {}
  NielsenMove move;
};

enum class CenterInit { Random, Estimated };

inline std::string to_string(CenterInit i) { return i == CenterInit::Random ? "random" : "estimated"; }

inline CenterInit parse_center_init(std::string_view s) {
  if (s == "random") return CenterInit::Random;
  if (s == "estimated") return CenterInit::Estimated;
  throw std::invalid_argument("unknown center initialization '" + std::string(s) + "'");
}

namespace detail {

inline std::vector<std::vector<NielsenMove>> reducers_of(const LabeledWordSet& set, std::span<const std::size_t> idx,
                                                         std::size_t threads) {
  std::vector<std::vector<NielsenMove>> out(idx.size());
  parallel_for(idx.size(), threads, [&](std::size_t i) {
    const WordRecord& r = set.records[idx[i]];
    out[i] = r.reducers ? *r.reducers : reducing_moves(r.word);
  });
  return out;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace detail

/// Row t is the mean feature vector of the words whose only reducing
/// Nielsen move is t.
inline Matrix estimate_initial_centers(const LabeledWordSet& sample, const FeatureMap& map, std::size_t threads = 1) {
  const auto idx = detail::all_indices(sample.size());
  const auto reducers = detail::reducers_of(sample, idx, threads);
  Matrix centers(kNielsenMoves.size(), map.dimension());
  std::array<std::size_t, 4> sizes{};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (reducers[i].size() != 1) continue;
    const std::size_t t = index_of(reducers[i][0]);
    const auto f = map(sample.records[i].word);
    for (std::size_t j = 0; j < f.size(); ++j) centers(t, j) += f[j];
    ++sizes[t];
  }
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    if (sizes[t] == 0) throw EmptyPureSet(kNielsenMoves[t]);
    for (std::size_t j = 0; j < centers.cols(); ++j) centers(t, j) /= static_cast<double>(sizes[t]);
  }
  return centers;
}

struct ClusterStats {
  std::size_t size = 0;
  std::array<double, 4> reduce_fraction{};  // R(t, C) in Nielsen move order
  double r_max = 0.0;
  NielsenMove move = NielsenMove::AtoAB;    // argmax_t R(t, C), earliest move on ties
};

struct ClusterReport {
  std::vector<ClusterStats> clusters;
  // Over nonempty clusters.
  double avg_r_max = 0.0;
  double max_r_max = 0.0;
  double min_r_max = 0.0;
};

/// Centers and their assigned moves; predicts the move of the nearest center.
struct ReducerModel {
  FeatureMap features;
  Matrix centers;
  std::vector<NielsenMove> moves;

  /// Nearest center; among equidistant centers the earliest move wins,
  /// then the lower cluster index.
  NielsenMove predict(const CyclicWord& w) const {
    const auto f = features(w);
    std::size_t best = centers.rows();
    double best_d = 0.0;
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      const double d = detail::squared_distance(f, centers.row(c));
      if (best == centers.rows() || d < best_d ||
          (d == best_d && index_of(moves[c]) < index_of(moves[best]))) {
        best = c;
        best_d = d;
      }
    }
    return moves.at(best);
  }
};

inline NielsenMove predict_reducer(const CyclicWord& w, const ReducerModel& model) { return model.predict(w); }

struct ClusterOptions {
  std::size_t k = 4;
  double sample_fraction = 0.1;  // S' for center estimation, disjoint from the clustered words
  std::size_t max_iter = 100;
  std::size_t threads = 1;
};

struct ClusterExperiment {
  ClusterReport report;
  ReducerModel reducer;
  KMeansModel kmeans;
  std::vector<std::size_t> sample_indices;     // S'
  std::vector<std::size_t> clustered_indices;  // S \ S'
};

inline ClusterReport cluster_report(const KMeansModel& km, const std::vector<std::vector<NielsenMove>>& reducers) {
  ClusterReport rep;
  rep.clusters.resize(km.centers.rows());
  std::vector<std::array<std::size_t, 4>> hits(km.centers.rows(), std::array<std::size_t, 4>{});
  for (std::size_t i = 0; i < km.assignment.size(); ++i) {
    const std::size_t c = km.assignment[i];
    ++rep.clusters[c].size;
    for (NielsenMove t : reducers[i]) ++hits[c][index_of(t)];
  }
  std::size_t nonempty = 0;
  double sum = 0.0;
  for (std::size_t c = 0; c < rep.clusters.size(); ++c) {
    ClusterStats& s = rep.clusters[c];
    if (s.size == 0) continue;
    for (std::size_t t = 0; t < 4; ++t) {
      s.reduce_fraction[t] = static_cast<double>(hits[c][t]) / static_cast<double>(s.size);
      if (s.reduce_fraction[t] > s.r_max || t == 0) {
        s.r_max = s.reduce_fraction[t];
        s.move = kNielsenMoves[t];
      }
    }
    if (nonempty == 0) rep.max_r_max = rep.min_r_max = s.r_max;
    rep.max_r_max = std::max(rep.max_r_max, s.r_max);
    rep.min_r_max = std::min(rep.min_r_max, s.r_max);
    sum += s.r_max;
    ++nonempty;
  }
  rep.avg_r_max = nonempty ? sum / static_cast<double>(nonempty) : 0.0;
  return rep;
}

/// Splits `set` by a seeded shuffle into S' (sample_fraction) and the rest,
/// runs K-means on the rest from random or S'-estimated centers, and scores
/// each cluster by how often each Nielsen move reduces its words.
inline ClusterExperiment clustering_experiment(const LabeledWordSet& set, const FeatureMap& map, CenterInit init,
                                               std::uint64_t seed, const ClusterOptions& opt = {}) {
  if (set.rank != 2 || map.rank() != 2) throw DataError("the clustering experiment is defined for rank 2 only");
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set.records[i].label != WordLabel::NonMinimal)
      throw DataError("clustering needs non-minimal words; record " + std::to_string(i) + " is minimal");
  if (init == CenterInit::Estimated && opt.k != kNielsenMoves.size())
    throw std::invalid_argument("estimated centers need K = 4");

  Rng rng = Rng::stream(seed, 0);
  std::vector<std::size_t> order = detail::all_indices(set.size());
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto sample_n =
      static_cast<std::size_t>(std::ceil(opt.sample_fraction * static_cast<double>(set.size())));
  ClusterExperiment ex;
  ex.sample_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(sample_n, order.size())));
  ex.clustered_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(ex.sample_indices.size()), order.end());
  std::sort(ex.sample_indices.begin(), ex.sample_indices.end());
  std::sort(ex.clustered_indices.begin(), ex.clustered_indices.end());
  if (ex.clustered_indices.size() < opt.k)
    throw DataError("clustering needs at least " + std::to_string(opt.k) + " words outside the sample");

  LabeledWordSet rest;
  rest.rank = set.rank;
  for (std::size_t i : ex.clustered_indices) rest.records.push_back(set.records[i]);
  const Matrix x = feature_matrix(rest, map, opt.threads);

  if (init == CenterInit::Estimated) {
    LabeledWordSet sample;
    sample.rank = set.rank;
    for (std::size_t i : ex.sample_indices) sample.records.push_back(set.records[i]);
    ex.kmeans = kmeans(x, opt.k, estimate_initial_centers(sample, map, opt.threads), opt.max_iter);
  } else {
    Rng init_rng = Rng::stream(seed, 1);
    ex.kmeans = kmeans(x, opt.k, std::nullopt, opt.max_iter, &init_rng);
  }
  ex.report = cluster_report(ex.kmeans, detail::reducers_of(rest, detail::all_indices(rest.size()), opt.threads));
  ex.reducer.features = map;
  ex.reducer.centers = ex.kmeans.centers;
  for (const auto& c : ex.report.clusters) ex.reducer.moves.push_back(c.move);
  return ex;
}

// ---- files ----------------------------------------------------------------

inline json reducer_to_json(const ReducerModel& m) {
  json moves = json::array();
  for (NielsenMove t : m.moves) moves.push_back(to_string(t));
  return json{{"schema_version", kModelSchemaVersion},
              {"feature_map", m.features.name()},
              {"rank", m.features.rank()},
              {"patterns", m.features.column_names()},
              {"centers", detail::matrix_to_json(m.centers)},
              {"moves", moves}};
}

inline ReducerModel reducer_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion) throw ModelError("unsupported centers schema version");
    const int rank = j.at("rank").get<int>();
    std::vector<Pattern> patterns;
    for (const auto& s : j.at("patterns")) patterns.push_back(Pattern::parse(s.get<std::string>(), rank));
    ReducerModel m{FeatureMap(j.at("feature_map").get<std::string>(), rank, std::move(patterns)),
                   detail::matrix_from_json(j.at("centers")), {}};
    for (const auto& s : j.at("moves")) m.moves.push_back(parse_nielsen_move(s.get<std::string>()));
    if (m.moves.size() != m.centers.rows() || m.centers.cols() != m.features.dimension())
      throw ModelError("centers file: shapes do not agree");
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed centers document: ") + e.what());
  } catch (const DataError& e) {
    throw ModelError(std::string("malformed centers document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(std::string("malformed centers document: ") + e.what());
  }
}

inline void write_cluster_csv(std::ostream& out, const ClusterReport& rep) {
  out << "cluster,size";
  for (NielsenMove t : kNielsenMoves) out << ",R(" << to_string(t) << ')';
  out << ",R_max,move\n";
  const auto old = out.precision(17);
  for (std::size_t c = 0; c < rep.clusters.size(); ++c) {
    const auto& s = rep.clusters[c];
    out << c << ',' << s.size;
    for (double r : s.reduce_fraction) out << ',' << r;
    out << ',' << s.r_max << ',' << to_string(s.move) << '\n';
  }
  out.precision(old);
}

}  // namespace whpr
