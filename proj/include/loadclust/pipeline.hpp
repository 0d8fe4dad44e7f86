// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOADCLUST_PIPELINE_HPP_
#define LOADCLUST_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "loadclust/clustering.hpp"
#include "loadclust/csv.hpp"
#include "loadclust/errors.hpp"
#include "loadclust/features.hpp"
#include "loadclust/io.hpp"
#include "loadclust/rpca.hpp"
#include "loadclust/similarity.hpp"
#include "loadclust/submodular.hpp"

namespace loadclust {

// Every stage toggle of an end-to-end run. Unset optionals mean "derive
// from the data" (mu from the matrix shape, lambda from the distance
// median, K from the CH argmax, the K range as 2..min(8, N-1)).
struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path out_dir = "out";
  SeasonConfig seasons;
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<Eigen::Index> k;
  std::optional<KRange> k_range;
  SolverOptions solver;
  std::uint64_t seed = 42;
  int restarts = 10;
  bool dump_components = false;
  bool compare_kmeans = false;
  bool use_cache = true;

  // Throws ArgumentError on invalid settings that do not depend on data.
  void validate() const;
};

nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& params);

// How a stage failure should be reported by the CLI.
enum class FailureKind { kConfig, kData, kConvergence, kInternal };

FailureKind classify(const std::exception& e);

// Wraps the error of a failing stage with its name and a remediation hint.
class StageError : public Error {
 public:
  StageError(std::string stage, FailureKind kind, const std::string& detail, std::string hint);
  const std::string& stage() const { return stage_; }
  FailureKind kind() const { return kind_; }
  const std::string& hint() const { return hint_; }

 private:
  std::string stage_;
  FailureKind kind_;
  std::string hint_;
};

// Writes files atomically (temp file, then rename) and can remove
// everything it wrote.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  void write(const std::string& name, const std::string& content);
  void rollback();

  const std::filesystem::path& dir() const { return dir_; }
  // name -> FNV-1a hash of content, in write order.
  const std::vector<std::pair<std::string, std::string>>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> written_;
};

// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(std::string_view bytes);
std::string file_hash(const std::filesystem::path& path);

// Canonical file names inside an output directory.
namespace files {
inline constexpr const char* kNormalized = "normalized.csv";
inline constexpr const char* kLowRank = "low_rank.csv";
inline constexpr const char* kSparse = "sparse.csv";
inline constexpr const char* kDecomposition = "decomposition.json";
inline constexpr const char* kFeatures = "features.csv";
inline constexpr const char* kFeatureOrder = "features_order.txt";
inline constexpr const char* kDistance = "distance.csv";
inline constexpr const char* kSimilarity = "similarity.csv";
inline constexpr const char* kHeatmap = "heatmap.csv";
inline constexpr const char* kSimilarityInfo = "similarity.json";
inline constexpr const char* kRankList = "ranklist.csv";
inline constexpr const char* kSweep = "sweep.csv";
inline constexpr const char* kAssignment = "assignment.csv";
inline constexpr const char* kClusterDir = "clusters";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace files

// Rendering and parsing of every artifact. Numbers use the shortest
// round-trip representation so files re-read bit-exactly.
namespace artifacts {

struct LabeledMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};

std::string render_profiles(const std::vector<Timestamp>& timestamps, const Eigen::MatrixXd& values,
                            const std::vector<std::string>& ids);
// Reads a file in the ingestion layout without gap filling or normalization.
LoadMatrix read_profiles(const std::filesystem::path& path);

std::string render_features(const std::vector<FeatureVector>& features);
std::vector<FeatureVector> read_features(const std::filesystem::path& path);

// Square matrix with `area_id` header column, used for distance and similarity.
std::string render_square(const Eigen::MatrixXd& m, const std::vector<std::string>& ids);
LabeledMatrix read_square(const std::filesystem::path& path);

// Long-form (i, j, w_ij) triples, 1-based indices.
std::string render_heatmap(const Eigen::MatrixXd& w);

std::string render_ranklist(const RankList& ranks, const std::vector<std::string>& ids);
RankList read_ranklist(const std::filesystem::path& path, const std::vector<std::string>& ids);

// `K,ch_submodular[,ch_kmeans]`
std::string render_sweep(const SweepResult& sweep, const std::vector<double>* kmeans_scores);
Eigen::Index recommended_k_from_sweep(const std::filesystem::path& path);

// `area_id,cluster_id,center_area_id`; cluster_id is the 1-based rank of the center.
std::string render_assignment(const std::vector<Eigen::Index>& labels,
                              const std::vector<Eigen::Index>& centers,
                              const std::vector<std::string>& ids);

}  // namespace artifacts

// Stage bodies shared by the one-shot pipeline and the CLI subcommands.
namespace stages {

struct DecomposeResult {
  LoadMatrix normalized;
  Decomposition decomposition;
  IngestionSummary ingestion;
  std::vector<std::string> warnings;
  std::string input_hash;
  bool cache_hit = false;
};

// load -> normalize -> R-PCA. With a cache directory, results are reused
// when the normalized data, mu and solver options match.
DecomposeResult decompose(const std::filesystem::path& input, std::optional<double> mu,
                          const SolverOptions& solver,
                          const std::optional<std::filesystem::path>& cache_dir);
void write_decomposition(ArtifactWriter& out, const DecomposeResult& r, bool dump_components);

std::vector<FeatureVector> features(const std::vector<Timestamp>& timestamps,
                                    const Eigen::MatrixXd& low_rank, const Eigen::MatrixXd& sparse,
                                    const std::vector<std::string>& ids, const SeasonConfig& seasons);
void write_features(ArtifactWriter& out, const std::vector<FeatureVector>& f);

void write_similarity(ArtifactWriter& out, const SimilarityGraph& g, bool lambda_overridden);

RankList select(const SimilarityGraph& g);
void write_ranklist(ArtifactWriter& out, const RankList& ranks, const std::vector<std::string>& ids);

struct SweepOutputs {
  SweepResult sweep;
  std::vector<double> kmeans_scores;  // empty unless compared
};
SweepOutputs sweep(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z, const RankList& ranks,
                   KRange range, bool compare_kmeans, std::uint64_t seed, int restarts);
void write_sweep(ArtifactWriter& out, const SweepOutputs& s, bool compare_kmeans);

ClusterAssignment assign_clusters(const Eigen::MatrixXd& w, const RankList& ranks, Eigen::Index k);
// Assignment table plus one profile bundle per cluster (normalized members
// and their mean) under clusters/.
void write_assignment(ArtifactWriter& out, const ClusterAssignment& a, const LoadMatrix& normalized);

KRange default_k_range(Eigen::Index n);

}  // namespace stages

struct PipelineReport {
  nlohmann::json manifest;
  Eigen::Index recommended_k = 0;
  Eigen::Index final_k = 0;
};

// ingest -> normalize -> decompose -> features -> similarity -> select ->
// sweep/assign -> reports, plus manifest.json. On failure every file written
// by this run is removed and a StageError is thrown.
PipelineReport run_pipeline(const PipelineConfig& cfg);

// Rebuilds the configuration recorded in a manifest, checking the input
// file still hashes to the recorded value.
PipelineConfig config_from_manifest(const std::filesystem::path& manifest_path);

}  // namespace loadclust

#endif  // LOADCLUST_PIPELINE_HPP_
