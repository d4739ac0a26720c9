#include "calr/cli/app.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using calr::testutil::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = calr::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t line_count(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Small dataset plus a short training config shared by every test.
class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    ::unsetenv("CALR_SEED");
    write(dir / "synth.cfg",
          "synth.n_identities: 8\nsynth.n_cameras: 3\nsynth.dim: 8\nsynth.n_test_identities: 6\n");
    write(dir / "train.cfg", "train.intra_epochs: 1\ntrain.inter_epochs: 2\neval.every: 1\n");
    ASSERT_EQ(run({"synth", "--config", (dir / "synth.cfg").string(), "--out", data().string()}).code, 0);
  }
  fs::path data() const { return dir / "ds"; }

  TempDir dir{"calr_cli"};
};

}  // namespace

TEST_F(CliTest, SynthWritesDatasetAndEvalSet) {
  for (const char* f : {"data.hdr", "data.bin", "data.csv", "test.hdr", "test.bin", "test.csv", "split.csv",
                        "synth.cfg", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(data() / f)) << f;
  }
  const auto m = nlohmann::json::parse(slurp(data() / "manifest.json"));
  EXPECT_EQ(m["command"], "synth");
  EXPECT_EQ(m["outputs"].size(), 8u);
}

TEST_F(CliTest, SynthIsReproducible) {
  ASSERT_EQ(run({"synth", "--config", (dir / "synth.cfg").string(), "--out", (dir / "again").string()}).code, 0);
  EXPECT_EQ(slurp(data() / "data.bin"), slurp(dir / "again" / "data.bin"));
  EXPECT_EQ(slurp(data() / "split.csv"), slurp(dir / "again" / "split.csv"));
}

TEST_F(CliTest, SeedFromEnvironment) {
  ::setenv("CALR_SEED", "99", 1);
  ASSERT_EQ(run({"synth", "--config", (dir / "synth.cfg").string(), "--out", (dir / "s99").string()}).code, 0);
  ::setenv("CALR_SEED", "banana", 1);
  const auto bad = run({"synth", "--config", (dir / "synth.cfg").string(), "--out", (dir / "sbad").string()});
  ::unsetenv("CALR_SEED");
  EXPECT_EQ(bad.code, 2);
  EXPECT_FALSE(fs::exists(dir / "sbad"));
  EXPECT_NE(slurp(data() / "data.bin"), slurp(dir / "s99" / "data.bin"));
  EXPECT_NE(slurp(dir / "s99" / "synth.cfg").find("synth.seed: 99"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwoWithoutOutputs) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"train", "--bogus"}).code, 2);
  write(dir / "bad.cfg", "loss.gamma: 3\n");
  const auto r = run({"train", "--config", (dir / "bad.cfg").string(), "--data", data().string(), "--out",
                      (dir / "run_bad").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("loss.gamma"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "run_bad"));
  EXPECT_EQ(run({"sweep", "--config", (dir / "train.cfg").string(), "--data", data().string(), "--out",
                 (dir / "sw_bad").string(), "--axis", "gamma"})
                .code,
            2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"--version"}).code, 0);
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
  const auto r = run({"train", "--config", (dir / "train.cfg").string(), "--data", (dir / "missing").string(),
                      "--out", (dir / "run_missing").string()});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, TrainEvalReportRoundTrip) {
  const auto run_dir = dir / "run";
  ASSERT_EQ(run({"train", "--config", (dir / "train.cfg").string(), "--data", data().string(), "--out",
                 run_dir.string()})
                .code,
            0);
  for (const char* f : {"config.cfg", "epoch_stats.csv", "final.hdr", "final.bin", "report.json", "manifest.json",
                        "local_cam0.csv", "local_cam2.csv"}) {
    EXPECT_TRUE(fs::exists(run_dir / f)) << f;
  }
  EXPECT_EQ(line_count(run_dir / "epoch_stats.csv"), 1u + 3 + 2);
  const auto rep = nlohmann::json::parse(slurp(run_dir / "report.json"));
  EXPECT_EQ(rep["status"], "complete");
  const double map = rep["final_retrieval"]["mAP"];

  const auto ev = run({"eval", "--ckpt", (run_dir / "final").string(), "--data", (data() / "test").string()});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NEAR(nlohmann::json::parse(ev.out)["retrieval"]["mAP"].get<double>(), map, 1e-6);

  ASSERT_EQ(run({"report", "--run", run_dir.string(), "--out", (dir / "rep").string()}).code, 0);
  EXPECT_EQ(line_count(dir / "rep" / "discard_ratio.csv"), 3u);
  const auto runs = nlohmann::json::parse(slurp(dir / "rep" / "runs.json"));
  EXPECT_FALSE(runs["runs"][0]["truncated"].get<bool>());

  // A run cut short by deleting its report and last row reads as truncated.
  auto csv = slurp(run_dir / "epoch_stats.csv");
  csv.erase(csv.rfind('\n', csv.size() - 2) + 1);
  write(run_dir / "epoch_stats.csv", csv);
  fs::remove(run_dir / "report.json");
  ASSERT_EQ(run({"report", "--run", run_dir.string(), "--out", (dir / "rep2").string()}).code, 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "rep2" / "runs.json"))["runs"][0]["truncated"].get<bool>());
}

TEST_F(CliTest, TrainIsByteReproducible) {
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run({"train", "--config", (dir / "train.cfg").string(), "--data", data().string(), "--out",
                   (dir / name).string()})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(dir / "a" / "epoch_stats.csv"), slurp(dir / "b" / "epoch_stats.csv"));
  EXPECT_EQ(slurp(dir / "a" / "final.bin"), slurp(dir / "b" / "final.bin"));
  const auto ma = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
  EXPECT_EQ(ma["inputs"], mb["inputs"]);
  EXPECT_EQ(ma["config"], mb["config"]);
}

TEST_F(CliTest, ClusterAndRefine) {
  ASSERT_EQ(run({"cluster", "--data", data().string(), "--out", (dir / "g").string()}).code, 0);
  ASSERT_EQ(run({"cluster", "--data", data().string(), "--out", (dir / "l").string(), "--scope", "camera"}).code, 0);
  EXPECT_EQ(line_count(dir / "g" / "assignment.csv"), line_count(data() / "data.csv"));
  const auto summary = nlohmann::json::parse(slurp(dir / "g" / "summary.json"));
  EXPECT_GT(summary["n_clusters"].get<int>(), 0);
  std::vector<std::string> args{"refine", "--data", data().string(), "--global", (dir / "g" / "assignment.csv").string(),
                                "--out", (dir / "r").string(), "--p", "1", "--local"};
  for (int c = 0; c < 3; ++c) args.push_back((dir / "l" / ("local_cam" + std::to_string(c) + ".csv")).string());
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = nlohmann::json::parse(slurp(dir / "r" / "report.json"));
  EXPECT_GE(rep["discard_ratio"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(dir / "r" / "refined.csv"));
}

TEST_F(CliTest, SweepRowsAndResume) {
  const auto out = dir / "sw";
  auto sweep = [&](const std::string& axis, const std::string& grid) {
    std::vector<std::string> a{"sweep", "--config", (dir / "train.cfg").string(), "--data", data().string(),
                               "--out", (out / axis).string(), "--axis", axis};
    if (!grid.empty()) a.insert(a.end(), {"--grid", grid});
    return run(a);
  };
  ASSERT_EQ(sweep("ablation", "").code, 0);
  EXPECT_EQ(line_count(out / "ablation" / "sweep.csv"), 1u + 4);
  ASSERT_EQ(sweep("beta", "0,0.5").code, 0);
  EXPECT_EQ(line_count(out / "beta" / "sweep.csv"), 1u + 2);
  const auto again = sweep("beta", "0,0.5");
  ASSERT_EQ(again.code, 0);
  EXPECT_NE(again.out.find("(reused)"), std::string::npos);
  EXPECT_EQ(sweep("beta", "0,0").code, 2);
}
