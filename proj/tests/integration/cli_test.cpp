#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "dipe/selection.hpp"
#include "dipe/tensor_io.hpp"
#include "test_support.hpp"

namespace dipe {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result dipe_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = test::scratch_dir("cli_pipeline");
    const auto r = dipe_run({"synth", "--spec", (test::data_dir() / "fixture9_spec.json").string(), "--out",
                             (root_ / "data").string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  static std::string manifest() { return (root_ / "data" / "manifest.json").string(); }
  static std::string path(const std::string& name) { return (root_ / name).string(); }

  static void eval_and_corr(const std::string& suffix, const std::string& threads) {
    auto r = dipe_run({"eval", "--manifest", manifest(), "--out", path("scores" + suffix + ".json"), "--threads",
                       threads});
    ASSERT_EQ(r.code, 0) << r.err;
    r = dipe_run({"corr", "--manifest", manifest(), "--out", path("corr" + suffix + ".csv"), "--threads", threads});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  static inline std::filesystem::path root_;
};

TEST_F(CliPipeline, SelectHonoursBudget) {
  eval_and_corr("", "2");
  const auto r = dipe_run({"select", "--strategy", "dipe", "--k", "5", "--corr", path("corr.csv"), "--scores",
                           path("scores.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ids = correlation_from_csv(slurp(path("corr.csv"))).model_ids();
  const auto sel = selection_from_json(r.out, ids);
  EXPECT_EQ(sel.members.size(), 5u);
  EXPECT_EQ(sel.strategy, Strategy::dipe);
  const auto json = nlohmann::json::parse(r.out);
  EXPECT_EQ(json.at("trace").size(), 4u);
  EXPECT_TRUE(std::filesystem::exists(path("corr.pgm")));
}

TEST_F(CliPipeline, ZeroBudgetIsDataError) {
  eval_and_corr("", "1");
  const auto r = dipe_run({"select", "--strategy", "dipe", "--k", "0", "--corr", path("corr.csv"), "--scores",
                           path("scores.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("k out of range"), std::string::npos) << r.err;
  const auto big = dipe_run({"select", "--strategy", "topk", "--k", "10", "--corr", path("corr.csv"), "--scores",
                             path("scores.json")});
  EXPECT_EQ(big.code, 2);
  EXPECT_NE(big.err.find("k out of range"), std::string::npos) << big.err;
}

TEST_F(CliPipeline, ExhaustiveRefusedAboveLimit) {
  // Thirteen models: the fixture's nine plus four duplicates via the manifest.
  auto text = slurp(manifest());
  const auto pos = text.rfind(']');
  std::string extra;
  for (int i = 0; i < 4; ++i) {
    extra += ",\n    {\"model_id\": \"dup" + std::to_string(i) + "\", \"name\": \"dup\", \"pred_dir\": \"preds/r34\"}";
  }
  text.insert(text.rfind('}', pos) + 1, extra);
  const auto big = path("data/manifest13.json");
  io::write_text_file(big, text);
  const auto r = dipe_run({"select", "--strategy", "exhaustive", "--k", "3", "--manifest", big});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.err.find("use the dipe or topk strategies instead"), std::string::npos) << r.err;
}

TEST_F(CliPipeline, ReportMatchesGolden) {
  const auto r = dipe_run({"report", "--manifest", manifest(), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(test::golden_dir() / "fixture9_report.csv"));
}

TEST_F(CliPipeline, ThreadCountDoesNotChangeOutput) {
  eval_and_corr("_t1", "1");
  eval_and_corr("_t8", "8");
  EXPECT_EQ(slurp(path("scores_t1.json")), slurp(path("scores_t8.json")));
  EXPECT_EQ(slurp(path("corr_t1.csv")), slurp(path("corr_t8.csv")));
  EXPECT_EQ(slurp(path("corr_t1.pgm")), slurp(path("corr_t8.pgm")));
  const auto a = dipe_run({"report", "--manifest", manifest(), "--threads", "1", "--k", "2..4"});
  const auto b = dipe_run({"report", "--manifest", manifest(), "--threads", "8", "--k", "2..4"});
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliPipeline, RepeatedRunsAreByteIdentical) {
  eval_and_corr("_a", "0");
  eval_and_corr("_b", "0");
  EXPECT_EQ(slurp(path("scores_a.json")), slurp(path("scores_b.json")));
  EXPECT_EQ(slurp(path("corr_a.csv")), slurp(path("corr_b.csv")));
}

TEST_F(CliPipeline, FuseFromSelection) {
  eval_and_corr("", "1");
  auto r = dipe_run({"select", "--strategy", "topk", "--k", "3", "--corr", path("corr.csv"), "--scores",
                     path("scores.json"), "--out", path("sel.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = dipe_run({"fuse", "--manifest", manifest(), "--selection", path("sel.json"), "--out", path("fused"), "--probs"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(path("fused/fused.csv")));
  EXPECT_TRUE(std::filesystem::exists(path("fused/slice_0000.dipe")));
  r = dipe_run({"fuse", "--manifest", manifest(), "--members", "r34,nope", "--out", path("fused2")});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(dipe_run({}).code, 1);
  EXPECT_EQ(dipe_run({"frobnicate"}).code, 1);
  EXPECT_EQ(dipe_run({"eval", "--bogus"}).code, 1);
  EXPECT_EQ(dipe_run({"eval"}).code, 1);
  EXPECT_EQ(dipe_run({"select", "--strategy", "nope", "--k", "2"}).code, 1);
  EXPECT_EQ(dipe_run({"select", "--strategy", "dipe", "--k", "two", "--corr", "x", "--scores", "y"}).code, 1);
  EXPECT_EQ(dipe_run({"--help"}).code, 0);
}

TEST(Cli, MissingInputIsDataError) {
  const auto r = dipe_run({"eval", "--manifest", "/nonexistent/manifest.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/nonexistent/manifest.json"), std::string::npos);
}

}  // namespace
}  // namespace dipe
