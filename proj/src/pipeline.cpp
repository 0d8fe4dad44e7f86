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

#include "loadclust/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "loadclust/csv.hpp"

namespace loadclust {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "1.0.0";

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string hint_for(const std::string& stage, FailureKind kind) {
  if (kind == FailureKind::kConvergence) {
    return "raise --max-iter or loosen --tol";
  }
  if (stage == "config") return "check flag values; see --help";
  if (stage == "ingest") {
    return "input must be CSV with header timestamp,<area_id>,... ISO-8601 datetimes and numeric "
           "cells, at most 20% missing per area";
  }
  if (stage == "normalize" || stage == "decompose") return "check the input values are finite";
  if (stage == "features") {
    return "the data must contain samples from both seasons; check --summer-months and "
           "--winter-months";
  }
  if (stage == "similarity") return "pass --lambda explicitly or remove duplicate areas";
  if (stage == "select" || stage == "sweep" || stage == "assign") {
    return "--k and --k-range must lie within [2, N-1] for N areas";
  }
  if (stage == "write") return "check the output directory is writable";
  return "see the error message";
}

std::string now_iso8601() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return format_timestamp(now) + "Z";
}

std::string labeled_value(const std::string& id, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::string line = csv::quote(id);
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    line += ',';
    line += csv::format_double(row(c));
  }
  return line;
}

std::string cache_key(const LoadMatrix& normalized, double mu, const SolverOptions& solver) {
  json params;
  params["mu"] = mu;
  params["rho0"] = optional_number(solver.rho0);
  params["rho_growth"] = solver.rho_growth;
  params["rho_cap_factor"] = solver.rho_cap_factor;
  params["tol"] = solver.tol;
  params["max_iter"] = solver.max_iter;
  return content_hash(artifacts::render_profiles(normalized.timestamps, normalized.values,
                                                 normalized.area_ids) +
                      params.dump());
}

json diagnostics_json(const Decomposition& d) {
  json j;
  j["mu"] = d.mu;
  j["iterations"] = d.diagnostics.iterations;
  j["residual"] = d.diagnostics.residual;
  j["rank"] = d.diagnostics.rank;
  j["sparse_fraction"] = d.diagnostics.sparse_fraction;
  return j;
}

void write_plain(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write " + tmp.string());
    out << content;
    if (!out) throw ArgumentError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

// ---------------------------------------------------------------- config

void PipelineConfig::validate() const {
  if (input.empty()) throw ArgumentError("--input is required");
  seasons.validate();
  if (mu && !(*mu > 0.0)) throw ArgumentError("--mu must be positive");
  if (lambda && !(*lambda > 0.0)) throw ArgumentError("--lambda must be positive");
  if (k && *k < 1) throw ArgumentError("--k must be positive");
  if (k_range && (k_range->lo < 2 || k_range->lo > k_range->hi)) {
    throw ArgumentError("--k-range must be lo..hi with 2 <= lo <= hi");
  }
  if (!(solver.tol > 0.0)) throw ArgumentError("--tol must be positive");
  if (solver.max_iter < 1) throw ArgumentError("--max-iter must be >= 1");
  if (restarts < 1) throw ArgumentError("--restarts must be >= 1");
}

json config_to_json(const PipelineConfig& cfg) {
  json j;
  j["input"] = fs::absolute(cfg.input).lexically_normal().string();
  j["summer_months"] = cfg.seasons.summer_months;
  j["winter_months"] = cfg.seasons.winter_months;
  j["mu"] = optional_number(cfg.mu);
  j["lambda"] = optional_number(cfg.lambda);
  j["k"] = cfg.k ? json(*cfg.k) : json(nullptr);
  j["k_range"] = cfg.k_range ? json::array({cfg.k_range->lo, cfg.k_range->hi}) : json(nullptr);
  j["solver"] = {{"rho0", optional_number(cfg.solver.rho0)},
                 {"rho_growth", cfg.solver.rho_growth},
                 {"rho_cap_factor", cfg.solver.rho_cap_factor},
                 {"tol", cfg.solver.tol},
                 {"max_iter", cfg.solver.max_iter}};
  j["seed"] = cfg.seed;
  j["restarts"] = cfg.restarts;
  j["dump_components"] = cfg.dump_components;
  j["compare_kmeans"] = cfg.compare_kmeans;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  try {
    PipelineConfig cfg;
    cfg.input = j.at("input").get<std::string>();
    cfg.seasons.summer_months = j.at("summer_months").get<std::vector<unsigned>>();
    cfg.seasons.winter_months = j.at("winter_months").get<std::vector<unsigned>>();
    if (!j.at("mu").is_null()) cfg.mu = j.at("mu").get<double>();
    if (!j.at("lambda").is_null()) cfg.lambda = j.at("lambda").get<double>();
    if (!j.at("k").is_null()) cfg.k = j.at("k").get<Eigen::Index>();
    if (!j.at("k_range").is_null()) {
      cfg.k_range = KRange{j.at("k_range").at(0).get<Eigen::Index>(),
                           j.at("k_range").at(1).get<Eigen::Index>()};
    }
    const json& s = j.at("solver");
    if (!s.at("rho0").is_null()) cfg.solver.rho0 = s.at("rho0").get<double>();
    cfg.solver.rho_growth = s.at("rho_growth").get<double>();
    cfg.solver.rho_cap_factor = s.at("rho_cap_factor").get<double>();
    cfg.solver.tol = s.at("tol").get<double>();
    cfg.solver.max_iter = s.at("max_iter").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.restarts = j.at("restarts").get<int>();
    cfg.dump_components = j.at("dump_components").get<bool>();
    cfg.compare_kmeans = j.at("compare_kmeans").get<bool>();
    return cfg;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed manifest parameters: ") + e.what());
  }
}

PipelineConfig config_from_manifest(const fs::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw ArgumentError("cannot parse manifest " + manifest_path.string() + ": " + e.what());
  }
  if (!manifest.contains("parameters")) throw ArgumentError("manifest has no parameters block");
  PipelineConfig cfg = config_from_json(manifest.at("parameters"));
  if (manifest.contains("input") && manifest["input"].contains("hash")) {
    const std::string recorded = manifest["input"]["hash"].get<std::string>();
    if (file_hash(cfg.input) != recorded) {
      throw ValidationError("input " + cfg.input.string() +
                            " no longer matches the hash recorded in the manifest");
    }
  }
  return cfg;
}

FailureKind classify(const std::exception& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->kind();
  if (dynamic_cast<const ConvergenceError*>(&e)) return FailureKind::kConvergence;
  if (dynamic_cast<const ArgumentError*>(&e)) return FailureKind::kConfig;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const EvaluationError*>(&e)) {
    return FailureKind::kData;
  }
  return FailureKind::kInternal;
}

StageError::StageError(std::string stage, FailureKind kind, const std::string& detail,
                       std::string hint)
    : Error("stage '" + stage + "' failed: " + detail + " (hint: " + hint + ")"),
      stage_(std::move(stage)),
      kind_(kind),
      hint_(std::move(hint)) {}

// ---------------------------------------------------------------- writer

ArtifactWriter::ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  const fs::path path = dir_ / name;
  fs::create_directories(path.parent_path());
  write_plain(path, content);
  written_.emplace_back(name, content_hash(content));
}

void ArtifactWriter::rollback() {
  std::error_code ec;
  for (auto it = written_.rbegin(); it != written_.rend(); ++it) {
    fs::remove(dir_ / it->first, ec);
    fs::remove(dir_ / (it->first + ".tmp"), ec);
  }
  fs::remove(dir_ / files::kClusterDir, ec);  // only succeeds when empty
  written_.clear();
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string file_hash(const fs::path& path) { return content_hash(read_file(path)); }

// ------------------------------------------------------------- artifacts

namespace artifacts {

std::string render_profiles(const std::vector<Timestamp>& timestamps, const Eigen::MatrixXd& values,
                            const std::vector<std::string>& ids) {
  std::ostringstream out;
  write_profiles(out, timestamps, values, ids);
  return out.str();
}

LoadMatrix read_profiles(const fs::path& path) {
  const csv::Table t = csv::read_table(path);
  if (t.header.size() < 2) throw ParseError("profile file needs timestamp and area columns", 1);
  LoadMatrix m;
  m.area_ids.assign(t.header.begin() + 1, t.header.end());
  m.values.resize(static_cast<Eigen::Index>(t.rows.size()),
                  static_cast<Eigen::Index>(m.area_ids.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    m.timestamps.push_back(parse_timestamp(t.rows[r][0]));
    for (std::size_t c = 1; c < t.header.size(); ++c) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
          csv::parse_double(t.rows[r][c], path.string());
    }
  }
  validate(m);
  return m;
}

std::string render_features(const std::vector<FeatureVector>& features) {
  std::string out = "area_id";
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    out += i < 9 ? ",f0" : ",f";
    out += std::to_string(i + 1);
  }
  out += '\n';
  for (const auto& f : features) {
    out += csv::quote(f.area_id);
    for (double v : f.values) {
      out += ',';
      out += csv::format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> read_features(const fs::path& path) {
  const csv::Table t = csv::read_table(path);
  if (t.header.size() != kFeatureCount + 1 || t.header[0] != "area_id") {
    throw ParseError("feature table must have columns area_id,f01..f16", 1);
  }
  std::vector<FeatureVector> out;
  for (const auto& row : t.rows) {
    FeatureVector f;
    f.area_id = row[0];
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      f.values[i] = csv::parse_double(row[i + 1], path.string());
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::string render_square(const Eigen::MatrixXd& m, const std::vector<std::string>& ids) {
  std::string out = "area_id";
  for (const auto& id : ids) out += ',' + csv::quote(id);
  out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += labeled_value(ids[static_cast<std::size_t>(r)], m.row(r));
    out += '\n';
  }
  return out;
}

LabeledMatrix read_square(const fs::path& path) {
  const csv::Table t = csv::read_table(path);
  LabeledMatrix lm;
  lm.ids.assign(t.header.begin() + 1, t.header.end());
  const auto n = static_cast<Eigen::Index>(lm.ids.size());
  if (static_cast<Eigen::Index>(t.rows.size()) != n) {
    throw ParseError(path.string() + " is not square", t.rows.size() + 1);
  }
  lm.values.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    if (row[0] != lm.ids[static_cast<std::size_t>(r)]) {
      throw ParseError("row label does not match column order in " + path.string(),
                       static_cast<std::size_t>(r) + 2);
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      lm.values(r, c) = csv::parse_double(row[static_cast<std::size_t>(c) + 1], path.string());
    }
  }
  return lm;
}

std::string render_heatmap(const Eigen::MatrixXd& w) {
  std::string out = "i,j,w_ij\n";
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      out += std::to_string(i + 1) + ',' + std::to_string(j + 1) + ',' +
             csv::format_double(w(i, j)) + '\n';
    }
  }
  return out;
}

std::string render_ranklist(const RankList& ranks, const std::vector<std::string>& ids) {
  std::string out = "rank,area_id,marginal_gain,objective\n";
  for (std::size_t r = 0; r < ranks.order.size(); ++r) {
    out += std::to_string(r + 1) + ',' + csv::quote(ids[static_cast<std::size_t>(ranks.order[r])]) +
           ',' + csv::format_double(ranks.gains[r]) + ',' +
           csv::format_double(ranks.objective_trace[r]) + '\n';
  }
  return out;
}

RankList read_ranklist(const fs::path& path, const std::vector<std::string>& ids) {
  const csv::Table t = csv::read_table(path);
  if (t.header != std::vector<std::string>{"rank", "area_id", "marginal_gain", "objective"}) {
    throw ParseError("rank list must have columns rank,area_id,marginal_gain,objective", 1);
  }
  RankList ranks;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto it = std::find(ids.begin(), ids.end(), row[1]);
    if (it == ids.end()) throw ParseError("unknown area '" + row[1] + "' in rank list", r + 2);
    ranks.order.push_back(static_cast<Eigen::Index>(it - ids.begin()));
    ranks.gains.push_back(csv::parse_double(row[2], "marginal_gain"));
    ranks.objective_trace.push_back(csv::parse_double(row[3], "objective"));
  }
  return ranks;
}

std::string render_sweep(const SweepResult& sweep, const std::vector<double>* kmeans_scores) {
  std::string out = kmeans_scores ? "K,ch_submodular,ch_kmeans\n" : "K,ch_submodular\n";
  for (std::size_t i = 0; i < sweep.entries.size(); ++i) {
    out += std::to_string(sweep.entries[i].k) + ',' + csv::format_double(sweep.entries[i].ch_score);
    if (kmeans_scores) out += ',' + csv::format_double((*kmeans_scores)[i]);
    out += '\n';
  }
  return out;
}

Eigen::Index recommended_k_from_sweep(const fs::path& path) {
  const csv::Table t = csv::read_table(path);
  if (t.header.size() < 2 || t.header[0] != "K") throw ParseError("malformed sweep report", 1);
  Eigen::Index best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : t.rows) {
    const double score = csv::parse_double(row[1], "ch_submodular");
    if (score > best) {
      best = score;
      best_k = static_cast<Eigen::Index>(csv::parse_double(row[0], "K"));
    }
  }
  if (best_k == 0) throw ParseError("sweep report has no rows", 2);
  return best_k;
}

std::string render_assignment(const std::vector<Eigen::Index>& labels,
                              const std::vector<Eigen::Index>& centers,
                              const std::vector<std::string>& ids) {
  std::string out = "area_id,cluster_id,center_area_id\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto pos = std::find(centers.begin(), centers.end(), labels[i]) - centers.begin();
    out += csv::quote(ids[i]) + ',' + std::to_string(pos + 1) + ',' +
           csv::quote(ids[static_cast<std::size_t>(labels[i])]) + '\n';
  }
  return out;
}

}  // namespace artifacts

// ---------------------------------------------------------------- stages

namespace stages {

DecomposeResult decompose(const fs::path& input, std::optional<double> mu,
                          const SolverOptions& solver, const std::optional<fs::path>& cache_dir) {
  DecomposeResult r;
  LoadedProfiles loaded = load_profiles(input);
  r.input_hash = file_hash(input);
  r.ingestion = loaded.summary;
  NormalizedProfiles norm = normalize(loaded.matrix);
  r.normalized = std::move(norm.matrix);
  r.warnings = std::move(norm.warnings);
  const double weight = mu ? *mu : compute_mu(r.normalized.rows(), r.normalized.cols());

  std::optional<fs::path> entry;
  if (cache_dir) {
    entry = *cache_dir / ("rpca-" + cache_key(r.normalized, weight, solver));
    if (fs::exists(*entry / "diagnostics.json")) {
      const LoadMatrix l = artifacts::read_profiles(*entry / files::kLowRank);
      const LoadMatrix s = artifacts::read_profiles(*entry / files::kSparse);
      const json diag = json::parse(read_file(*entry / "diagnostics.json"));
      r.decomposition.low_rank = l.values;
      r.decomposition.sparse = s.values;
      r.decomposition.mu = diag.at("mu").get<double>();
      r.decomposition.diagnostics.iterations = diag.at("iterations").get<int>();
      r.decomposition.diagnostics.residual = diag.at("residual").get<double>();
      r.decomposition.diagnostics.rank = diag.at("rank").get<Eigen::Index>();
      r.decomposition.diagnostics.sparse_fraction = diag.at("sparse_fraction").get<double>();
      r.cache_hit = true;
      return r;
    }
  }
  r.decomposition = rpca_decompose(r.normalized.values, weight, solver);
  if (entry) {
    fs::create_directories(*entry);
    write_plain(*entry / files::kLowRank,
                artifacts::render_profiles(r.normalized.timestamps, r.decomposition.low_rank,
                                           r.normalized.area_ids));
    write_plain(*entry / files::kSparse,
                artifacts::render_profiles(r.normalized.timestamps, r.decomposition.sparse,
                                           r.normalized.area_ids));
    write_plain(*entry / "diagnostics.json", diagnostics_json(r.decomposition).dump(2) + "\n");
  }
  return r;
}

void write_decomposition(ArtifactWriter& out, const DecomposeResult& r, bool dump_components) {
  const auto& n = r.normalized;
  out.write(files::kNormalized, artifacts::render_profiles(n.timestamps, n.values, n.area_ids));
  if (!dump_components) return;
  out.write(files::kLowRank,
            artifacts::render_profiles(n.timestamps, r.decomposition.low_rank, n.area_ids));
  out.write(files::kSparse,
            artifacts::render_profiles(n.timestamps, r.decomposition.sparse, n.area_ids));
  json info = diagnostics_json(r.decomposition);
  info["filled_cells"] = r.ingestion.filled_cells;
  info["warnings"] = r.warnings;
  out.write(files::kDecomposition, info.dump(2) + "\n");
}

std::vector<FeatureVector> features(const std::vector<Timestamp>& timestamps,
                                    const Eigen::MatrixXd& low_rank, const Eigen::MatrixXd& sparse,
                                    const std::vector<std::string>& ids,
                                    const SeasonConfig& seasons) {
  return extract_all(low_rank, sparse, season_mask(timestamps, seasons), ids);
}

void write_features(ArtifactWriter& out, const std::vector<FeatureVector>& f) {
  out.write(files::kFeatures, artifacts::render_features(f));
  out.write(files::kFeatureOrder, feature_order_description());
}

void write_similarity(ArtifactWriter& out, const SimilarityGraph& g, bool lambda_overridden) {
  out.write(files::kDistance, artifacts::render_square(g.distances, g.area_ids));
  out.write(files::kSimilarity, artifacts::render_square(g.similarities, g.area_ids));
  out.write(files::kHeatmap, artifacts::render_heatmap(g.similarities));
  json info;
  info["lambda"] = g.lambda;
  info["lambda_source"] = lambda_overridden ? "override" : "median_distance";
  out.write(files::kSimilarityInfo, info.dump(2) + "\n");
}

RankList select(const SimilarityGraph& g) {
  return lazy_greedy_select(g.similarities, g.similarities.rows());
}

void write_ranklist(ArtifactWriter& out, const RankList& ranks,
                    const std::vector<std::string>& ids) {
  out.write(files::kRankList, artifacts::render_ranklist(ranks, ids));
}

SweepOutputs sweep(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z, const RankList& ranks,
                   KRange range, bool compare_kmeans, std::uint64_t seed, int restarts) {
  SweepOutputs s;
  s.sweep = sweep_k(w, z, ranks, range);
  if (compare_kmeans) {
    for (const auto& e : s.sweep.entries) {
      const KMeansResult km = kmeans_baseline(z, e.k, seed, restarts);
      double score = std::numeric_limits<double>::quiet_NaN();
      try {
        score = calinski_harabasz(z, km.labels);
      } catch (const EvaluationError&) {
        // k-means collapsed to fewer distinct clusters; reported as nan.
      }
      s.kmeans_scores.push_back(score);
    }
  }
  return s;
}

void write_sweep(ArtifactWriter& out, const SweepOutputs& s, bool compare_kmeans) {
  out.write(files::kSweep,
            artifacts::render_sweep(s.sweep, compare_kmeans ? &s.kmeans_scores : nullptr));
}

ClusterAssignment assign_clusters(const Eigen::MatrixXd& w, const RankList& ranks,
                                  Eigen::Index k) {
  if (k < 1 || k > static_cast<Eigen::Index>(ranks.order.size())) {
    throw ArgumentError("K = " + std::to_string(k) + " exceeds rank list length " +
                        std::to_string(ranks.order.size()));
  }
  ClusterAssignment a;
  a.k = k;
  a.centers.assign(ranks.order.begin(), ranks.order.begin() + k);
  a.labels = assign(w, a.centers);
  return a;
}

void write_assignment(ArtifactWriter& out, const ClusterAssignment& a, const LoadMatrix& normalized) {
  out.write(files::kAssignment,
            artifacts::render_assignment(a.labels, a.centers, normalized.area_ids));
  // Bundles left over from an earlier run with a different K.
  std::error_code ec;
  const fs::path cluster_dir = out.dir() / files::kClusterDir;
  if (fs::is_directory(cluster_dir, ec)) {
    for (const auto& entry : fs::directory_iterator(cluster_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("cluster_") && name.ends_with(".csv")) fs::remove(entry.path(), ec);
    }
  }
  const int width = std::max<int>(2, static_cast<int>(std::to_string(a.centers.size()).size()));
  for (std::size_t c = 0; c < a.centers.size(); ++c) {
    std::vector<Eigen::Index> members;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
      if (a.labels[i] == a.centers[c]) members.push_back(static_cast<Eigen::Index>(i));
    }
    Eigen::MatrixXd bundle(normalized.rows(), static_cast<Eigen::Index>(members.size()) + 1);
    std::vector<std::string> ids;
    for (std::size_t m = 0; m < members.size(); ++m) {
      bundle.col(static_cast<Eigen::Index>(m)) = normalized.values.col(members[m]);
      ids.push_back(normalized.area_ids[static_cast<std::size_t>(members[m])]);
    }
    bundle.col(bundle.cols() - 1) =
        bundle.leftCols(bundle.cols() - 1).rowwise().sum() / static_cast<double>(members.size());
    ids.push_back("cluster_mean");
    std::string number = std::to_string(c + 1);
    number.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(number.size()))),
                  '0');
    out.write(std::string(files::kClusterDir) + "/cluster_" + number + ".csv",
              artifacts::render_profiles(normalized.timestamps, bundle, ids));
  }
}

KRange default_k_range(Eigen::Index n) { return KRange{2, std::min<Eigen::Index>(8, n - 1)}; }

}  // namespace stages

// -------------------------------------------------------------- pipeline

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  ArtifactWriter out(cfg.out_dir);
  std::string stage = "config";
  try {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    PipelineReport report;
    json manifest;
    manifest["tool"] = "loadclust";
    manifest["version"] = kToolVersion;
    manifest["created_at"] = now_iso8601();
    manifest["parameters"] = config_to_json(cfg);

    stage = "ingest";
    LoadedProfiles loaded = load_profiles(cfg.input);
    if (loaded.matrix.cols() < 3) throw ValidationError("need at least 3 areas to cluster");
    stage = "normalize";
    NormalizedProfiles norm = normalize(loaded.matrix);
    stage = "decompose";
    // decompose() re-reads the input so subcommands and the pipeline share one path.
    const std::optional<fs::path> cache =
        cfg.use_cache ? std::optional<fs::path>(cfg.out_dir / ".cache") : std::nullopt;
    const stages::DecomposeResult dec = stages::decompose(cfg.input, cfg.mu, cfg.solver, cache);
    const LoadMatrix& m = dec.normalized;

    stage = "features";
    const auto feats = stages::features(m.timestamps, dec.decomposition.low_rank,
                                        dec.decomposition.sparse, m.area_ids, cfg.seasons);
    const Eigen::MatrixXd z = feature_matrix(feats);

    stage = "similarity";
    const SimilarityGraph graph = build_similarity(feats, cfg.lambda);

    stage = "select";
    const RankList ranks = stages::select(graph);

    stage = "sweep";
    const KRange range = cfg.k_range.value_or(stages::default_k_range(m.cols()));
    const stages::SweepOutputs sw = stages::sweep(graph.similarities, z, ranks, range,
                                                  cfg.compare_kmeans, cfg.seed, cfg.restarts);
    report.recommended_k = sw.sweep.recommended_k;

    stage = "assign";
    report.final_k = cfg.k.value_or(report.recommended_k);
    const ClusterAssignment final_assignment =
        stages::assign_clusters(graph.similarities, ranks, report.final_k);

    stage = "write";
    stages::write_decomposition(out, dec, cfg.dump_components);
    stages::write_features(out, feats);
    stages::write_similarity(out, graph, cfg.lambda.has_value());
    stages::write_ranklist(out, ranks, m.area_ids);
    stages::write_sweep(out, sw, cfg.compare_kmeans);
    stages::write_assignment(out, final_assignment, m);

    manifest["input"] = {{"path", config_to_json(cfg)["input"]}, {"hash", dec.input_hash}};
    manifest["data"] = {{"rows", m.rows()},
                        {"areas", m.cols()},
                        {"filled_cells", dec.ingestion.filled_cells},
                        {"normalized_hash", out.written().front().second},
                        {"warnings", dec.warnings}};
    manifest["rpca"] = diagnostics_json(dec.decomposition);
    manifest["effective"] = {{"mu", dec.decomposition.mu},
                             {"lambda", graph.lambda},
                             {"k_range", {range.lo, range.hi}},
                             {"recommended_k", report.recommended_k},
                             {"final_k", report.final_k}};
    manifest["selection"] = {{"evaluations", ranks.evaluations},
                             {"selection_passes", sw.sweep.selection_passes},
                             {"stopped_early", ranks.stopped_early},
                             {"rank_list_length", ranks.order.size()}};
    json outputs = json::object();
    for (const auto& [name, hash] : out.written()) outputs[name] = hash;
    manifest["outputs"] = outputs;
    out.write(files::kManifest, manifest.dump(2) + "\n");
    report.manifest = std::move(manifest);
    return report;
  } catch (const std::exception& e) {
    out.rollback();
    const FailureKind kind = classify(e);
    throw StageError(stage, kind, e.what(), hint_for(stage, kind));
  }
}

}  // namespace loadclust
