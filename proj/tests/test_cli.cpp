// Drives the built CLI binary through std::system.

#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "ensemble/synthetic.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace ensemble {
namespace {

int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd =
      std::string(ENSEMBLE_CLI) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    SyntheticSpec spec;
    spec.negatives = 20;
    spec.positives = 20;
    spec.side = 24;
    manifest_ = write_synthetic_dataset(dir_->path() / "data", spec);
  }
  static void TearDownTestSuite() { delete dir_; }

  std::string common() const {
    return "--manifest '" + manifest_.string() + "' --input-size 48 --quiet";
  }

  static testing::TempDir* dir_;
  static std::filesystem::path manifest_;
};

testing::TempDir* Cli::dir_ = nullptr;
std::filesystem::path Cli::manifest_;

TEST_F(Cli, RunWritesReportsAndIsDeterministic) {
  const auto out1 = dir_->path() / "run1";
  const auto out2 = dir_->path() / "run2";
  const auto before = slurp(manifest_);
  ASSERT_EQ(run_cli("run " + common() + " --seed 42 --out '" + out1.string() + "'",
                    dir_->path() / "log1"), 0)
      << slurp(dir_->path() / "log1");
  ASSERT_EQ(run_cli("run " + common() + " --seed 42 --out '" + out2.string() + "'",
                    dir_->path() / "log2"), 0);
  EXPECT_TRUE(std::filesystem::exists(out1 / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(out1 / "report.txt"));
  EXPECT_TRUE(std::filesystem::exists(out1 / "splits.json"));
  EXPECT_EQ(slurp(out1 / "report.json"), slurp(out2 / "report.json"));
  EXPECT_EQ(slurp(out1 / "report.txt"), slurp(out2 / "report.txt"));
  EXPECT_EQ(slurp(manifest_), before);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("run --quiet", dir_->path() / "log"), 2);
  EXPECT_NE(slurp(dir_->path() / "log").find("--manifest"), std::string::npos);
  EXPECT_EQ(run_cli("", dir_->path() / "log"), 2);
  EXPECT_EQ(run_cli("run " + common() + " --committee Q --out '" +
                        (dir_->path() / "q").string() + "'",
                    dir_->path() / "log"),
            2);
}

TEST_F(Cli, DataErrorForMissingManifest) {
  EXPECT_EQ(run_cli("run --manifest /nonexistent/m.csv --quiet --out '" +
                        (dir_->path() / "x").string() + "'",
                    dir_->path() / "log"),
            4);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  const auto out = dir_->path() / "envout";
  ASSERT_EQ(run_cli("split --manifest '" + manifest_.string() + "' --quiet", dir_->path() / "log") ,
            0);  // default directory, relative to cwd
  std::filesystem::remove_all("ensemble-out");
  const std::string cmd = "ENSEMBLE_OUT_DIR='" + out.string() + "' " + ENSEMBLE_CLI +
                          " split --manifest '" + manifest_.string() + "' --quiet";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(std::filesystem::exists(out / "splits.json"));
}

TEST_F(Cli, FuseFilesAndSingleModelIdentity) {
  const auto out = dir_->path() / "export";
  ASSERT_EQ(run_cli("run " + common() + " --committee plain --export-predictions --out '" +
                        out.string() + "'",
                    dir_->path() / "log"), 0);
  // Split the merged file into one file per model.
  std::istringstream merged(slurp(out / "predictions.csv"));
  std::string header, line;
  std::getline(merged, header);
  std::map<std::string, std::string> per_model;
  while (std::getline(merged, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    per_model[line.substr(a + 1, b - a - 1)] += line + "\n";
  }
  ASSERT_EQ(per_model.size(), 3u);
  std::string files;
  for (const char* model : {"logistic16", "centroid16", "logistic8"}) {
    write_text(out / (std::string(model) + ".csv"), header + "\n" + per_model[model]);
    files += " '" + (out / (std::string(model) + ".csv")).string() + "'";
  }
  const auto fused = dir_->path() / "fused";
  ASSERT_EQ(run_cli("fuse --manifest '" + manifest_.string() + "' --splits '" +
                        (out / "splits.json").string() + "' --predictions" + files +
                        " --quiet --out '" + fused.string() + "'",
                    dir_->path() / "log"), 0)
      << slurp(dir_->path() / "log");
  const std::string a = slurp(out / "report.txt"), b = slurp(fused / "report.txt");
  EXPECT_EQ(a.substr(a.find("| Network")), b.substr(b.find("| Network")));

  const auto single = dir_->path() / "single";
  ASSERT_EQ(run_cli("fuse --manifest '" + manifest_.string() + "' --splits '" +
                        (out / "splits.json").string() + "' --predictions '" +
                        (out / "logistic8.csv").string() + "' --format json --quiet --out '" +
                        single.string() + "'",
                    dir_->path() / "log"), 0);
  const auto j = nlohmann::json::parse(slurp(single / "report.json"));
  ASSERT_EQ(j["models"].size(), 2u);
  EXPECT_EQ(j["models"][0]["metrics"], j["models"][1]["metrics"]);
}

TEST_F(Cli, FuseRejectsOutOfRangeScore) {
  write_text(dir_->path() / "bad.csv", "model_id,image_id,decision,score\nnetX,img_0001,1,1.2\n");
  EXPECT_EQ(run_cli("fuse --manifest '" + manifest_.string() + "' --predictions '" +
                        (dir_->path() / "bad.csv").string() + "' --quiet --out '" +
                        (dir_->path() / "f").string() + "'",
                    dir_->path() / "log"),
            3);
  const std::string log = slurp(dir_->path() / "log");
  EXPECT_NE(log.find("netX"), std::string::npos);
  EXPECT_NE(log.find("img_0001"), std::string::npos);
}

TEST_F(Cli, MetricsPerfectInvertedAndHandCount) {
  write_text(dir_->path() / "truth.csv", "image_id,label\na,-1\nb,-1\nc,1\nd,1\n");
  write_text(dir_->path() / "perfect.csv",
             "model_id,image_id,decision,score\nm,a,-1,0.9\nm,b,-1,0.8\nm,c,1,0.7\nm,d,1,0.9\n");
  ASSERT_EQ(run_cli("metrics --truth '" + (dir_->path() / "truth.csv").string() +
                        "' --predictions '" + (dir_->path() / "perfect.csv").string() + "'",
                    dir_->path() / "log"), 0);
  std::string log = slurp(dir_->path() / "log");
  for (const char* m : {"accuracy", "sensitivity", "specificity", "f1", "auc"}) {
    EXPECT_NE(log.find(std::string(m) + std::string(12 - std::strlen(m), ' ') + " 1.000000"),
              std::string::npos) << m << "\n" << log;
  }

  write_text(dir_->path() / "inverted.csv",
             "model_id,image_id,decision,score\nm,a,1,0.9\nm,b,1,0.8\nm,c,-1,0.7\nm,d,-1,0.9\n");
  ASSERT_EQ(run_cli("metrics --truth '" + (dir_->path() / "truth.csv").string() +
                        "' --predictions '" + (dir_->path() / "inverted.csv").string() + "'",
                    dir_->path() / "log"), 0);
  log = slurp(dir_->path() / "log");
  EXPECT_NE(log.find("accuracy     0.000000"), std::string::npos) << log;
  EXPECT_NE(log.find("auc          0.000000"), std::string::npos) << log;

  write_text(dir_->path() / "hand.csv",
             "model_id,image_id,decision,score\nm,a,-1,0.9\nm,b,1,0.6\nm,c,1,0.7\nm,d,1,0.9\n");
  ASSERT_EQ(run_cli("metrics --truth '" + (dir_->path() / "truth.csv").string() +
                        "' --predictions '" + (dir_->path() / "hand.csv").string() + "'",
                    dir_->path() / "log"), 0);
  EXPECT_NE(slurp(dir_->path() / "log").find("TP=1 FP=0 TN=2 FN=1"), std::string::npos);
}

TEST_F(Cli, SplitEmitsPlan) {
  const auto out = dir_->path() / "split";
  ASSERT_EQ(run_cli("split --manifest '" + manifest_.string() +
                        "' --iterations 3 --train-fraction 0.75 --seed 9 --quiet --out '" +
                        out.string() + "'",
                    dir_->path() / "log"), 0);
  const std::string plan = slurp(out / "splits.json");
  EXPECT_NE(plan.find("\"schema\": \"ensemble-split-plan\""), std::string::npos);
  EXPECT_NE(plan.find("\"seed\": 9"), std::string::npos);
}

}  // namespace
}  // namespace ensemble
