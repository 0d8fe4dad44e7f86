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

// Command-line front end: one subcommand per pipeline stage plus the
// one-shot `pipeline` and the `synth` data generator. Stage subcommands
// read and write the canonical files of an output directory, so running
// decompose, features, similarity, select, sweep and assign in order
// reproduces `pipeline --dump-components`.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "loadclust/bench.hpp"
#include "loadclust/pipeline.hpp"

namespace fs = std::filesystem;
using namespace loadclust;

namespace {

fs::path parent_dir(const std::string& file) {
  const fs::path p = fs::path(file).parent_path();
  return p.empty() ? fs::path(".") : p;
}

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitInternal = 1;

int exit_code(FailureKind kind) {
  switch (kind) {
    case FailureKind::kConfig: return kExitConfig;
    case FailureKind::kData: return kExitData;
    case FailureKind::kConvergence: return kExitConvergence;
    case FailureKind::kInternal: return kExitInternal;
  }
  return kExitInternal;
}

std::vector<unsigned> parse_months(const std::string& text) {
  std::vector<unsigned> months;
  for (const auto& field : csv::split_line(text)) {
    const double v = csv::parse_double(field, "month list");
    if (v != static_cast<unsigned>(v)) throw ArgumentError("month must be an integer: " + field);
    months.push_back(static_cast<unsigned>(v));
  }
  return months;
}

KRange parse_k_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ArgumentError("--k-range must look like 2..8");
  const double lo = csv::parse_double(text.substr(0, dots), "--k-range");
  const double hi = csv::parse_double(text.substr(dots + 2), "--k-range");
  return KRange{static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi)};
}

// Flag values as typed; converted to library types once parsing succeeds.
struct Flags {
  std::string input;
  std::string out = "out";
  std::string summer = "6,7,8,9";
  std::string winter = "10,11,12,1,2,3,4,5";
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<long> k;
  std::string k_range;
  double tol = 1e-7;
  int max_iter = 1000;
  bool dump_components = false;
  bool compare_kmeans = false;
  int restarts = 10;
  std::uint64_t seed = 42;
  std::string from_manifest;
  bool no_cache = false;
};

SeasonConfig seasons_from(const Flags& f) {
  SeasonConfig s;
  s.summer_months = parse_months(f.summer);
  s.winter_months = parse_months(f.winter);
  s.validate();
  return s;
}

SolverOptions solver_from(const Flags& f) {
  SolverOptions s;
  s.tol = f.tol;
  s.max_iter = f.max_iter;
  return s;
}

PipelineConfig pipeline_config(const Flags& f) {
  if (!f.from_manifest.empty()) {
    PipelineConfig cfg = config_from_manifest(f.from_manifest);
    cfg.out_dir = f.out;
    cfg.use_cache = !f.no_cache;
    return cfg;
  }
  PipelineConfig cfg;
  cfg.input = f.input;
  cfg.out_dir = f.out;
  cfg.seasons = seasons_from(f);
  cfg.mu = f.mu;
  cfg.lambda = f.lambda;
  if (f.k) cfg.k = static_cast<Eigen::Index>(*f.k);
  if (!f.k_range.empty()) cfg.k_range = parse_k_range(f.k_range);
  cfg.solver = solver_from(f);
  cfg.seed = f.seed;
  cfg.restarts = f.restarts;
  cfg.dump_components = f.dump_components;
  cfg.compare_kmeans = f.compare_kmeans;
  cfg.use_cache = !f.no_cache;
  return cfg;
}

// Runs one subcommand stage with the same failure contract as the pipeline.
template <typename Fn>
void run_stage(const std::string& name, const fs::path& out_dir, Fn&& body) {
  ArtifactWriter writer(out_dir);
  try {
    fs::create_directories(out_dir);
    body(writer);
  } catch (const StageError&) {
    writer.rollback();
    throw;
  } catch (const std::exception& e) {
    writer.rollback();
    const FailureKind kind = classify(e);
    throw StageError(name, kind, e.what(), "see `loadclust " + name + " --help`");
  }
}

SimilarityGraph read_graph(const fs::path& dir) {
  SimilarityGraph g;
  const auto dist = artifacts::read_square(dir / files::kDistance);
  const auto sim = artifacts::read_square(dir / files::kSimilarity);
  g.distances = dist.values;
  g.similarities = sim.values;
  g.area_ids = sim.ids;
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Load-area clustering with robust PCA features and submodular center selection"};
  app.require_subcommand(1);
  Flags f;

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--mu", f.mu, "Sparse-term weight (default 1/sqrt(max(T, N)))");
    sub->add_option("--tol", f.tol, "Relative residual tolerance")->capture_default_str();
    sub->add_option("--max-iter", f.max_iter, "Solver iteration limit")->capture_default_str();
  };
  auto add_seasons = [&](CLI::App* sub) {
    sub->add_option("--summer-months", f.summer, "Comma-separated summer months")
        ->capture_default_str();
    sub->add_option("--winter-months", f.winter, "Comma-separated winter months")
        ->capture_default_str();
  };
  auto add_kmeans = [&](CLI::App* sub) {
    sub->add_flag("--compare-kmeans", f.compare_kmeans, "Add a seeded K-Means CH column");
    sub->add_option("--restarts", f.restarts, "K-Means restarts")->capture_default_str();
    sub->add_option("--seed", f.seed, "K-Means master seed")->capture_default_str();
  };

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write a manifest");
  pipeline->add_option("--input", f.input, "Wide CSV: timestamp,<area_id>,...");
  add_out(pipeline);
  add_seasons(pipeline);
  add_solver(pipeline);
  pipeline->add_option("--lambda", f.lambda, "Kernel scale (default median distance)");
  pipeline->add_option("--k", f.k, "Final cluster count (default argmax CH)");
  pipeline->add_option("--k-range", f.k_range, "Sweep range lo..hi (default 2..min(8, N-1))");
  pipeline->add_flag("--dump-components", f.dump_components, "Write low_rank.csv and sparse.csv");
  add_kmeans(pipeline);
  pipeline->add_option("--from-manifest", f.from_manifest, "Replay the parameters of a manifest");
  pipeline->add_flag("--no-cache", f.no_cache, "Do not reuse cached decompositions");

  // decompose
  auto* decompose = app.add_subcommand("decompose", "Ingest, normalize and run R-PCA");
  decompose->add_option("--input", f.input, "Wide CSV input")->required();
  add_out(decompose);
  add_solver(decompose);
  decompose->add_flag("--no-cache", f.no_cache, "Do not reuse cached decompositions");

  auto* features = app.add_subcommand("features", "Seasonal features from low_rank/sparse.csv");
  add_out(features);
  add_seasons(features);

  auto* similarity = app.add_subcommand("similarity", "Distance and kernel matrices");
  add_out(similarity);
  similarity->add_option("--lambda", f.lambda, "Kernel scale (default median distance)");

  auto* select = app.add_subcommand("select", "Rank cluster centers by lazy greedy");
  add_out(select);

  auto* sweep = app.add_subcommand("sweep", "Calinski-Harabasz over a K range");
  add_out(sweep);
  sweep->add_option("--k-range", f.k_range, "Sweep range lo..hi (default 2..min(8, N-1))");
  add_kmeans(sweep);

  auto* assign_cmd = app.add_subcommand("assign", "Assign areas to the first K ranked centers");
  add_out(assign_cmd);
  assign_cmd->add_option("--k", f.k, "Cluster count (default argmax CH from sweep.csv)");

  // synth
  bench::SyntheticSpec spec;
  std::string synth_out;
  std::string labels_out;
  auto* synth = app.add_subcommand("synth", "Generate planted-structure load data as CSV");
  synth->add_option("--out", synth_out, "CSV file to write")->required();
  synth->add_option("--labels", labels_out, "Optional CSV of planted labels");
  synth->add_option("--patterns", spec.n_patterns)->capture_default_str();
  synth->add_option("--areas-per-pattern", spec.areas_per_pattern)->capture_default_str();
  synth->add_option("--hours", spec.t, "Number of rows")->capture_default_str();
  synth->add_option("--step-hours", spec.step_hours)->capture_default_str();
  synth->add_option("--noise", spec.noise_sigma)->capture_default_str();
  synth->add_option("--spike-fraction", spec.spike_fraction)->capture_default_str();
  synth->add_option("--spike-amplitude", spec.spike_amplitude)->capture_default_str();
  synth->add_option("--seed", spec.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const fs::path out = f.out;
    if (pipeline->parsed()) {
      const PipelineReport report = run_pipeline(pipeline_config(f));
      std::cerr << "loadclust: recommended K = " << report.recommended_k
                << ", wrote assignment for K = " << report.final_k << " to " << f.out << "\n";
    } else if (decompose->parsed()) {
      run_stage("decompose", out, [&](ArtifactWriter& w) {
        const auto cache = f.no_cache ? std::nullopt : std::optional<fs::path>(out / ".cache");
        const auto r = stages::decompose(f.input, f.mu, solver_from(f), cache);
        stages::write_decomposition(w, r, true);
        for (const auto& warning : r.warnings) std::cerr << "warning: " << warning << "\n";
      });
    } else if (features->parsed()) {
      run_stage("features", out, [&](ArtifactWriter& w) {
        const LoadMatrix l = artifacts::read_profiles(out / files::kLowRank);
        const LoadMatrix s = artifacts::read_profiles(out / files::kSparse);
        stages::write_features(
            w, stages::features(l.timestamps, l.values, s.values, l.area_ids, seasons_from(f)));
      });
    } else if (similarity->parsed()) {
      run_stage("similarity", out, [&](ArtifactWriter& w) {
        stages::write_similarity(
            w, build_similarity(artifacts::read_features(out / files::kFeatures), f.lambda),
            f.lambda.has_value());
      });
    } else if (select->parsed()) {
      run_stage("select", out, [&](ArtifactWriter& w) {
        const SimilarityGraph g = read_graph(out);
        stages::write_ranklist(w, stages::select(g), g.area_ids);
      });
    } else if (sweep->parsed()) {
      run_stage("sweep", out, [&](ArtifactWriter& w) {
        const SimilarityGraph g = read_graph(out);
        const auto feats = artifacts::read_features(out / files::kFeatures);
        const RankList ranks = artifacts::read_ranklist(out / files::kRankList, g.area_ids);
        const KRange range = f.k_range.empty() ? stages::default_k_range(g.similarities.rows())
                                               : parse_k_range(f.k_range);
        const auto result = stages::sweep(g.similarities, feature_matrix(feats), ranks, range,
                                          f.compare_kmeans, f.seed, f.restarts);
        stages::write_sweep(w, result, f.compare_kmeans);
        std::cerr << "loadclust: recommended K = " << result.sweep.recommended_k << "\n";
      });
    } else if (assign_cmd->parsed()) {
      run_stage("assign", out, [&](ArtifactWriter& w) {
        const SimilarityGraph g = read_graph(out);
        const RankList ranks = artifacts::read_ranklist(out / files::kRankList, g.area_ids);
        const Eigen::Index k = f.k ? static_cast<Eigen::Index>(*f.k)
                                   : artifacts::recommended_k_from_sweep(out / files::kSweep);
        const LoadMatrix normalized = artifacts::read_profiles(out / files::kNormalized);
        stages::write_assignment(w, stages::assign_clusters(g.similarities, ranks, k), normalized);
      });
    } else if (synth->parsed()) {
      const bench::SyntheticData data = bench::generate(spec);
      ArtifactWriter w(parent_dir(synth_out));
      w.write(fs::path(synth_out).filename().string(),
              artifacts::render_profiles(data.matrix.timestamps, data.matrix.values,
                                         data.matrix.area_ids));
      if (!labels_out.empty()) {
        std::string text = "area_id,pattern,archetype\n";
        for (std::size_t i = 0; i < data.labels.size(); ++i) {
          const int p = static_cast<int>(data.labels[i]);
          text += data.matrix.area_ids[i] + ',' + std::to_string(p) + ',' +
                  bench::archetype_name(p) + '\n';
        }
        ArtifactWriter lw(parent_dir(labels_out));
        lw.write(fs::path(labels_out).filename().string(), text);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "loadclust: " << e.what() << "\n";
    return exit_code(classify(e));
  }
  return kExitOk;
}
