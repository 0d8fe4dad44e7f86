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


#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "loadclust/errors.hpp"
#include "loadclust/pipeline.hpp"

namespace fs = std::filesystem;
using namespace loadclust;

namespace {

const std::string kCli = LOADCLUST_CLI_PATH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

int run(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Relative path -> bytes for every file under dir, skipping the cache and
// optionally the manifest.
std::map<std::string, std::string> snapshot(const fs::path& dir, bool with_manifest = false) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel.starts_with(".cache/")) continue;
    if (!with_manifest && rel == files::kManifest) continue;
    out[rel] = slurp(e.path());
  }
  return out;
}

// One scratch directory per test binary, holding a small synthetic year.
struct Workspace {
  fs::path root;
  fs::path input;

  Workspace() {
    root = fs::temp_directory_path() / ("loadclust_pipeline_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    input = root / "input.csv";
    REQUIRE(run("synth --out '" + input.string() +
                "' --patterns 3 --areas-per-pattern 3 --seed 5") == 0);
  }
  ~Workspace() { fs::remove_all(root); }

  fs::path dir(const std::string& name) const { return root / name; }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

std::string pipeline_args(const fs::path& input, const fs::path& out) {
  return "pipeline --input '" + input.string() + "' --out '" + out.string() + "'";
}

}  // namespace

TEST_CASE("pipeline writes every artifact and a consistent manifest") {
  auto& ws = workspace();
  const fs::path out = ws.dir("full");
  REQUIRE(run(pipeline_args(ws.input, out)) == 0);
  for (const char* name : {files::kNormalized, files::kFeatures,
                           files::kFeatureOrder, files::kDistance, files::kSimilarity,
                           files::kHeatmap, files::kSimilarityInfo, files::kRankList, files::kSweep,
                           files::kAssignment, files::kManifest}) {
    CHECK_MESSAGE(fs::exists(out / name), std::string(name));
  }
  CHECK(!fs::exists(out / files::kLowRank));
  CHECK(!fs::exists(out / files::kDecomposition));

  const auto manifest = nlohmann::json::parse(slurp(out / files::kManifest));
  CHECK(manifest["data"]["rows"] == 8760);
  CHECK(manifest["data"]["areas"] == 9);
  CHECK(manifest["effective"]["mu"].get<double>() == 1.0 / std::sqrt(8760.0));
  CHECK(manifest["input"]["hash"] == file_hash(ws.input));
  for (const auto& [name, hash] : manifest["outputs"].items()) {
    CHECK_MESSAGE(file_hash(out / name) == hash.get<std::string>(), name);
  }
  const Eigen::Index k = manifest["effective"]["final_k"].get<Eigen::Index>();
  CHECK(fs::exists(out / files::kClusterDir / ("cluster_0" + std::to_string(k) + ".csv")));

  // The rank list covers every area and the sweep the default range.
  const std::string ranklist = slurp(out / files::kRankList);
  CHECK(std::count(ranklist.begin(), ranklist.end(), '\n') == 10);
  CHECK(slurp(out / files::kSweep).starts_with("K,ch_submodular\n2,"));
}

TEST_CASE("identical runs produce identical bytes") {
  auto& ws = workspace();
  const fs::path a = ws.dir("det_a"), b = ws.dir("det_b");
  REQUIRE(run(pipeline_args(ws.input, a) + " --compare-kmeans --seed 42") == 0);
  REQUIRE(run(pipeline_args(ws.input, b) + " --compare-kmeans --seed 42 --no-cache") == 0);
  const auto sa = snapshot(a), sb = snapshot(b);
  CHECK(sa.size() > 10);
  CHECK(sa == sb);
  CHECK(sa.at(files::kSweep).starts_with("K,ch_submodular,ch_kmeans\n"));

  // Rerunning into the same directory hits the cache and changes nothing.
  REQUIRE(run(pipeline_args(ws.input, a) + " --compare-kmeans --seed 42") == 0);
  CHECK(snapshot(a) == sa);
}

TEST_CASE("replaying a manifest reproduces the run") {
  auto& ws = workspace();
  const fs::path a = ws.dir("replay_a"), b = ws.dir("replay_b");
  REQUIRE(run(pipeline_args(ws.input, a) + " --k 3 --lambda 0.7 --summer-months 5,6,7,8,9 "
                                           "--winter-months 10,11,12,1,2,3,4") == 0);
  const PipelineConfig cfg = config_from_manifest(a / files::kManifest);
  CHECK(cfg.k == 3);
  CHECK(cfg.lambda == 0.7);
  CHECK(cfg.seasons.summer_months == std::vector<unsigned>{5, 6, 7, 8, 9});

  REQUIRE(run("pipeline --from-manifest '" + (a / files::kManifest).string() + "' --out '" +
              b.string() + "'") == 0);
  CHECK(snapshot(a) == snapshot(b));

  // A modified input no longer matches the recorded hash.
  const fs::path copy = ws.dir("replay_input.csv");
  fs::copy_file(ws.input, copy);
  REQUIRE(run(pipeline_args(copy, ws.dir("replay_c"))) == 0);
  put(copy, slurp(copy) + "\n");
  CHECK_THROWS_AS(config_from_manifest(ws.dir("replay_c") / files::kManifest), Error);
}

TEST_CASE("subcommands compose to the one-shot pipeline") {
  auto& ws = workspace();
  const fs::path one = ws.dir("oneshot"), steps = ws.dir("steps");
  REQUIRE(run(pipeline_args(ws.input, one) + " --dump-components") == 0);
  const std::string o = " --out '" + steps.string() + "'";
  REQUIRE(run("decompose --input '" + ws.input.string() + "'" + o) == 0);
  REQUIRE(run("features" + o) == 0);
  REQUIRE(run("similarity" + o) == 0);
  REQUIRE(run("select" + o) == 0);
  REQUIRE(run("sweep" + o) == 0);
  REQUIRE(run("assign" + o) == 0);

  CHECK(fs::exists(one / files::kDecomposition));
  const auto a = snapshot(one), b = snapshot(steps);
  for (const auto& [name, bytes] : a) {
    REQUIRE_MESSAGE(b.count(name) == 1, name);
    CHECK_MESSAGE(b.at(name) == bytes, name);
  }
}

TEST_CASE("a smaller K removes stale cluster bundles") {
  auto& ws = workspace();
  const fs::path out = ws.dir("rek");
  REQUIRE(run(pipeline_args(ws.input, out) + " --k 5") == 0);
  CHECK(fs::exists(out / "clusters/cluster_05.csv"));
  REQUIRE(run(pipeline_args(ws.input, out) + " --k 2") == 0);
  CHECK(fs::exists(out / "clusters/cluster_02.csv"));
  CHECK(!fs::exists(out / "clusters/cluster_03.csv"));
}

TEST_CASE("exit codes by failure kind") {
  auto& ws = workspace();
  CHECK(run("pipeline --bogus") == 2);
  CHECK(run(pipeline_args(ws.input, ws.dir("e1")) + " --k-range 5..2") == 2);
  CHECK(run(pipeline_args(ws.input, ws.dir("e2")) + " --summer-months 6,7") == 2);
  CHECK(run(pipeline_args(ws.input, ws.dir("e3")) + " --lambda -1") == 2);

  const fs::path ragged = ws.dir("ragged.csv");
  put(ragged, "timestamp,A,B\n2020-01-01 00:00,1,2\n2020-01-01 01:00,3\n");
  CHECK(run(pipeline_args(ragged, ws.dir("e4"))) == 3);
  // A missing input path is a usage error, unreadable content a data error.
  CHECK(run(pipeline_args(ws.dir("missing.csv"), ws.dir("e5"))) == 2);

  CHECK(run(pipeline_args(ws.input, ws.dir("e6")) + " --max-iter 2 --no-cache") == 4);
}

TEST_CASE("a failed run leaves no partial outputs") {
  auto& ws = workspace();
  const fs::path out = ws.dir("fail");
  // Months without summer samples fail after ingestion and decomposition.
  const fs::path winter = ws.dir("winter.csv");
  {
    std::istringstream in(slurp(ws.input));
    std::ostringstream keep;
    std::string line;
    for (int i = 0; std::getline(in, line) && i <= 24 * 60; ++i) keep << line << '\n';
    put(winter, keep.str());
  }
  CHECK(run(pipeline_args(winter, out) + " --no-cache") == 3);
  CHECK((!fs::exists(out) || fs::is_empty(out)));
}

TEST_CASE("config json round trip and validation") {
  PipelineConfig cfg;
  cfg.input = "x.csv";
  cfg.mu = 0.01;
  cfg.k_range = KRange{3, 6};
  cfg.solver.tol = 1e-8;
  cfg.compare_kmeans = true;
  const PipelineConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK(back.k_range->lo == 3);
  CHECK(back.solver.tol == 1e-8);

  PipelineConfig bad = cfg;
  bad.k_range = KRange{1, 4};
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = cfg;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);

  CHECK(classify(ArgumentError("x")) == FailureKind::kConfig);
  CHECK(classify(ValidationError("x")) == FailureKind::kData);
  CHECK(classify(std::runtime_error("x")) == FailureKind::kInternal);
}

TEST_CASE("artifact writer rollback") {
  auto& ws = workspace();
  const fs::path dir = ws.dir("writer");
  fs::create_directories(dir);
  put(dir / "keep.txt", "old");
  ArtifactWriter w(dir);
  w.write("a.csv", "1\n");
  w.write("clusters/cluster_01.csv", "2\n");
  CHECK(slurp(dir / "a.csv") == "1\n");
  CHECK(w.written().front().second == content_hash("1\n"));
  w.rollback();
  CHECK(!fs::exists(dir / "a.csv"));
  CHECK(!fs::exists(dir / "clusters"));
  CHECK(fs::exists(dir / "keep.txt"));
  CHECK(content_hash("") == "cbf29ce484222325");
}
