#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "ljp_cli/cli.hpp"

namespace ljp::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("ljp_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write(dir_ / "corpus.cfg", "seed = 3\ntrain_size = 40\nvalid_size = 8\ntest_size = 8\n");
    write(dir_ / "run.cfg",
          "d_w = 8\nd_c = 8\nmax_doc_len = 24\nd_s = 6\nd_n = 2\nln = 4\n"
          "tasks = law:3,charge:6,penalty:11\nlearning_rate = 0.01\nbatch_size = 8\nepochs = 3\n"
          "dropout = 0.5\nseed = 2\nmax_collocations = 8\n"
          "train_data = corpus/train.jsonl\nvalid_data = corpus/valid.jsonl\n"
          "test_data = corpus/test.jsonl\nout_dir = unused\n");
    gen_ = run_cli({"gen-corpus", "--config", (dir_ / "corpus.cfg").string(), "--out",
                    (dir_ / "corpus").string()});
    train_ = run_cli({"train", "--config", (dir_ / "run.cfg").string(), "--out",
                      (dir_ / "run").string()});
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static inline fs::path dir_;
  static inline Result gen_;
  static inline Result train_;
};

TEST_F(CliPipeline, GenCorpusWritesSplits) {
  ASSERT_EQ(gen_.code, kOk) << gen_.err;
  for (const char* f : {"train.jsonl", "valid.jsonl", "test.jsonl", "contrast_pairs.tsv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "corpus" / f)) << f;
  }
  EXPECT_NE(gen_.out.find("train: 40 cases"), std::string::npos);
  std::ifstream in(dir_ / "corpus" / "train.jsonl");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("labels"));
    ++n;
  }
  EXPECT_EQ(n, 40u);
}

TEST_F(CliPipeline, TrainWritesCheckpointAndMetrics) {
  ASSERT_EQ(train_.code, kOk) << train_.err;
  const std::string epochs = slurp(dir_ / "run" / "epochs.tsv");
  EXPECT_EQ(epochs.substr(0, epochs.find('\n')),
            "epoch\ttrain_loss\tvalid_law_accuracy\tvalid_law_macro_f1\tvalid_charge_accuracy\t"
            "valid_charge_macro_f1\tvalid_penalty_accuracy\tvalid_penalty_macro_f1");
  EXPECT_EQ(std::count(epochs.begin(), epochs.end(), '\n'), 4);
  EXPECT_TRUE(fs::exists(dir_ / "run" / "model.ckpt"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "metrics.tsv"));
  EXPECT_NE(train_.out.find("run 0 epoch 3 loss"), std::string::npos);
}

TEST_F(CliPipeline, EvalReproducesTrainMetrics) {
  ASSERT_EQ(train_.code, kOk);
  Result r = run_cli({"eval", "--checkpoint", (dir_ / "run" / "model.ckpt").string(), "--data",
                      (dir_ / "corpus" / "test.jsonl").string(), "--out", (dir_ / "eval.tsv").string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(slurp(dir_ / "eval.tsv"), slurp(dir_ / "run" / "metrics.tsv"));
  EXPECT_NE(r.out.find("penalty"), std::string::npos);
}

TEST_F(CliPipeline, PredictDumpsDistributionsAndAttention) {
  ASSERT_EQ(train_.code, kOk);
  Result r = run_cli({"predict", "--checkpoint", (dir_ / "run" / "model.ckpt").string(), "--data",
                      (dir_ / "corpus" / "valid.jsonl").string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["case"].get<std::size_t>(), n);
    for (const char* task : {"law", "charge", "penalty"}) {
      double s = 0;
      for (double v : j["distributions"][task]) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
      EXPECT_LT(j["predicted"][task].get<std::size_t>(), j["distributions"][task].size());
    }
    for (const char* task : {"law", "charge"}) {
      ASSERT_TRUE(j["attention"].contains(task));
      double s = 0;
      for (double v : j["attention"][task]) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    EXPECT_FALSE(j["attention"].contains("penalty"));
    ++n;
  }
  EXPECT_EQ(n, 8u);
}

TEST_F(CliPipeline, RerunsAreByteIdentical) {
  ASSERT_EQ(train_.code, kOk);
  const fs::path first = dir_ / "again";
  auto train_into = [&] {
    return run_cli({"train", "--config", (dir_ / "run.cfg").string(), "--out", first.string()});
  };
  ASSERT_EQ(train_into().code, kOk);
  const std::string ckpt = slurp(first / "model.ckpt"), epochs = slurp(first / "epochs.tsv");
  fs::remove_all(first);
  Result again = train_into();
  ASSERT_EQ(again.code, kOk) << again.err;
  EXPECT_EQ(slurp(first / "model.ckpt"), ckpt);
  EXPECT_EQ(slurp(first / "epochs.tsv"), epochs);
  EXPECT_EQ(epochs, slurp(dir_ / "run" / "epochs.tsv"));
}

TEST_F(CliPipeline, RepeatsWriteOneRunPerSeedAndASummary) {
  ASSERT_EQ(gen_.code, kOk);
  Result r = run_cli({"train", "--config", (dir_ / "run.cfg").string(), "--out",
                      (dir_ / "rep").string(), "--repeats", "2", "--variant", "mpfp"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "run-0" / "model.ckpt"));
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "run-1" / "model.ckpt"));
  const std::string summary = slurp(dir_ / "rep" / "summary.tsv");
  EXPECT_NE(summary.find("1\t3\tlaw\t"), std::string::npos);
  EXPECT_NE(summary.find("mean\t-\tpenalty\t"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "rep" / "run-0" / "model.ckpt"), slurp(dir_ / "rep" / "run-1" / "model.ckpt"));
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  Result r = run_cli({"train", "--config", "x.cfg", "--bogus"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("usage error"), std::string::npos);
  EXPECT_EQ(run_cli({"eval", "--data", "x.jsonl"}).code, kUsage);
  EXPECT_EQ(run_cli({"train", "--config", "x.cfg", "--variant", "big"}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST(Cli, FailuresNameTheStage) {
  Result missing = run_cli({"train", "--config", "/nonexistent/run.cfg"});
  EXPECT_EQ(missing.code, kError);
  EXPECT_EQ(missing.err.rfind("error [config]: ", 0), 0u) << missing.err;

  const fs::path bad = fs::temp_directory_path() / "ljp_cli_bad.cfg";
  write(bad, "d_c = 7\n");
  Result malformed = run_cli({"gradcheck", "--config", bad.string()});
  EXPECT_EQ(malformed.code, kError);
  EXPECT_EQ(malformed.err.rfind("error [config]: ", 0), 0u) << malformed.err;

  write(bad, "d_w = 8\nd_c = 8\nmax_doc_len = 12\nd_s = 6\nd_n = 2\nln = 4\n"
             "train_data = /nonexistent/train.jsonl\n");
  Result no_data = run_cli({"train", "--config", bad.string()});
  EXPECT_EQ(no_data.code, kError);
  EXPECT_EQ(no_data.err.rfind("error [data]: ", 0), 0u) << no_data.err;
  fs::remove(bad);

  Result no_ckpt = run_cli({"eval", "--checkpoint", "/nonexistent/model.ckpt", "--data", "x"});
  EXPECT_EQ(no_ckpt.code, kError);
  EXPECT_EQ(no_ckpt.err.rfind("error [checkpoint]: ", 0), 0u) << no_ckpt.err;
}

TEST(Cli, GradcheckOnToyConfigPasses) {
  Result r = run_cli({"gradcheck", "--config", std::string(LJP_CONFIG_DIR) + "/toy.cfg", "--repeats", "1"});
  EXPECT_EQ(r.code, kOk) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS: worst relative error"), std::string::npos);
  EXPECT_NE(r.out.find("wca.lstm.weight"), std::string::npos);
}

}  // namespace
}  // namespace ljp::cli
