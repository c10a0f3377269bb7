#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "candy/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using candy::cli::run_command;

namespace {

const std::string sample = CANDY_SAMPLE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("candy-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& content) const {
    std::ofstream(dir_ / name, std::ios::binary) << content;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DecodeAllOutsideGivesEmptySpans) {
  write("pred.jsonl",
        R"({"document":"d","comment_id":1,"tokens":[[0,3,false],[4,6,false]],"tags":["O","O"]})"
        "\n");
  const auto r = run({"decode", "--mode", "basic", "--tokens", path("pred.jsonl")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "document\tcomment_id\ttype\tstart\tend\n");
  EXPECT_NE(r.err.find("\"postprocessing\":\"basic\""), std::string::npos);
}

TEST_F(CliTest, ScoreSpansAgainstItself) {
  const auto r = run({"score-spans", "--gold", sample + "/spans.tsv", "--pred", sample + "/spans.tsv"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto first = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(first["scope"], "overall");
  EXPECT_EQ(first["f1"], "1.0000");
}

TEST_F(CliTest, SplitIsByteIdenticalAcrossRuns) {
  const std::vector<std::string> args = {"split",  "--comments", sample + "/comments.tsv",
                                         "--labels", sample + "/labels.tsv", "--k", "5",
                                         "--mode", "binary", "--seed", "42"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", path("a.tsv")});
  b.insert(b.end(), {"--out", path("b.tsv")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  const auto ta = slurp(path("a.tsv"));
  EXPECT_EQ(ta, slurp(path("b.tsv")));
  EXPECT_EQ(ta.substr(0, ta.find('\n')), "document\tcomment_id\tfold");
  EXPECT_EQ(std::count(ta.begin(), ta.end(), '\n'), 13);
}

TEST_F(CliTest, SplitHoldout) {
  const auto r = run({"split", "--comments", sample + "/comments.tsv", "--fraction", "0.25",
                      "--mode", "first_span_type"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "document\tcomment_id\tpartition");
  std::size_t held = 0;
  for (std::size_t pos = 0; (pos = r.out.find("\tholdout\n", pos)) != std::string::npos; ++pos) ++held;
  EXPECT_EQ(held, 3u);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"decode"}).code, 2);
  EXPECT_EQ(run({"decode", "--tokens", path("missing.jsonl")}).code, 1);
  write("pred.jsonl", R"({"document":"d","comment_id":1,"tokens":[[0,3,false]],"tags":["B-nope"]})" "\n");
  const auto bad = run({"decode", "--tokens", path("pred.jsonl")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("B-nope"), std::string::npos);
  EXPECT_EQ(run({"decode", "--tokens", path("pred.jsonl"), "--mode", "fancy"}).code, 2);
  EXPECT_EQ(run({"split", "--comments", sample + "/comments.tsv", "--k", "50"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, ValidateReportsViolationsAsRecords) {
  EXPECT_EQ(run({"validate", "--comments", sample + "/comments.tsv", "--labels",
                 sample + "/labels.tsv", "--spans", sample + "/spans.tsv"})
                .code,
            0);
  write("labels.tsv", "document\tcomment_id\tflausch\nd\t1\tno\n");
  write("comments.tsv", "document\tcomment_id\tcomment\nd\t1\thallo\n");
  write("spans.tsv", "document\tcomment_id\ttype\tstart\tend\nd\t1\tcompliment\t0\t5\n");
  const auto r = run({"validate", "--comments", path("comments.tsv"), "--labels", path("labels.tsv"),
                      "--spans", path("spans.tsv")});
  EXPECT_EQ(r.code, 1);
  const auto rec = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(rec["code"], "LABEL_SPAN_MISMATCH");
  EXPECT_EQ(rec["document"], "d");
  EXPECT_EQ(rec["comment_id"], 1);
}

TEST_F(CliTest, DedupAndStats) {
  const auto r = run({"dedup", "--comments", sample + "/comments.tsv", "--labels",
                      sample + "/labels.tsv", "--spans", sample + "/spans.tsv", "--out",
                      path("dedup")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = nlohmann::json::parse(r.out);
  EXPECT_EQ(rep["removed_count"], 2);
  EXPECT_EQ(rep["retained_conflict_comment_count"], 2);

  const auto st = run({"stats", "--comments", path("dedup/comments.tsv"), "--labels",
                       path("dedup/labels.tsv"), "--spans", path("dedup/spans.tsv")});
  ASSERT_EQ(st.code, 0) << st.err;
  const auto stats = nlohmann::json::parse(st.out);
  EXPECT_EQ(stats["comment_count"], 10);
  EXPECT_EQ(stats["span_count"], 8);
  EXPECT_EQ(stats["mean_spans_per_comment"], "0.8000");
}

TEST_F(CliTest, OversampleWritesBalancedCorpus) {
  write("comments.tsv", "document\tcomment_id\tcomment\nd\t1\tdanke\nd\t2\ta\nd\t3\tb\nd\t4\tc\n");
  write("spans.tsv", "document\tcomment_id\ttype\tstart\tend\nd\t1\tgratitude\t0\t5\n");
  const std::vector<std::string> args = {"oversample", "--comments", path("comments.tsv"),
                                         "--spans", path("spans.tsv"), "--seed", "3", "--out"};
  auto a = args, b = args;
  a.push_back(path("os"));
  b.push_back(path("os2"));
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(path("os/comments.tsv")), slurp(path("os2/comments.tsv")));
  const auto corpus = candy::parse_corpus(candy::CorpusPaths{
      path("os/comments.tsv"), path("os/labels.tsv"), path("os/spans.tsv")});
  ASSERT_EQ(corpus.size(), 6u);
  std::size_t candy = 0;
  for (const auto& ac : corpus) candy += ac.is_candy;
  EXPECT_EQ(candy, 3u);
  EXPECT_EQ(corpus.back().replica, 2u);
  EXPECT_EQ(corpus.back().spans.size(), 1u);

  // The sample has more candy than non-candy comments, so nothing is added.
  ASSERT_EQ(run({"oversample", "--comments", sample + "/comments.tsv", "--labels",
                 sample + "/labels.tsv", "--out", path("os3")})
                .code,
            0);
  EXPECT_EQ(slurp(path("os3/comments.tsv")), slurp(sample + "/comments.tsv"));
}

TEST_F(CliTest, EncodeDecodeScorePipeline) {
  const auto enc = run({"encode", "--comments", sample + "/comments.tsv", "--spans",
                        sample + "/spans.tsv", "--tokens", sample + "/tokens.jsonl", "--out",
                        path("tagged.jsonl")});
  ASSERT_EQ(enc.code, 0) << enc.err;
  for (const std::string mode : {"basic", "extended"}) {
    const auto dec = run({"decode", "--tokens", path("tagged.jsonl"), "--mode", mode, "--out",
                          path("decoded.tsv")});
    ASSERT_EQ(dec.code, 0) << dec.err;
    const auto score = run({"score-spans", "--gold", sample + "/spans.tsv", "--pred",
                            path("decoded.tsv"), "--comments", sample + "/comments.tsv", "--out",
                            path("report.jsonl")});
    ASSERT_EQ(score.code, 0) << score.err;
    const auto report = slurp(path("report.jsonl"));
    EXPECT_EQ(nlohmann::json::parse(report.substr(0, report.find('\n')))["f1"], "1.0000") << mode;
    EXPECT_NE(score.out.find("overall"), std::string::npos);

    const auto derived = run({"derive-binary", "--pred", path("decoded.tsv"), "--tokens",
                              path("tagged.jsonl"), "--out", path("derived.tsv")});
    ASSERT_EQ(derived.code, 0) << derived.err;
    const auto binary = run({"score-binary", "--gold", sample + "/labels.tsv", "--pred",
                             path("derived.tsv")});
    ASSERT_EQ(binary.code, 0) << binary.err;
    EXPECT_EQ(nlohmann::json::parse(binary.out.substr(0, binary.out.find('\n')))["f1"], "1.0000");
  }
}

TEST_F(CliTest, EncodeReportsDroppedSpans) {
  write("comments.tsv", "document\tcomment_id\tcomment\nd\t1\tabcdefgh\n");
  write("spans.tsv",
        "document\tcomment_id\ttype\tstart\tend\nd\t1\tcompliment\t0\t5\nd\t1\tgratitude\t3\t8\n");
  write("tokens.jsonl", R"({"document":"d","comment_id":1,"tokens":[[0,8,false]]})" "\n");
  const auto r = run({"encode", "--comments", path("comments.tsv"), "--spans", path("spans.tsv"),
                      "--tokens", path("tokens.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"tags\":[\"B-compliment\"]"), std::string::npos);
  EXPECT_NE(r.err.find("DROPPED_SPAN"), std::string::npos);
}
