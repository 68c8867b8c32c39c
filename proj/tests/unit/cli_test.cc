#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "cruciverba/error.h"
#include "cruciverba/util.h"
#include "test_support.h"

namespace cruciverba {
namespace {

using nlohmann::json;
using testing::TempDir;

struct Run {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// Runs the CLI with a scrubbed LLM key; stdout and stderr are captured to files.
class Cli {
 public:
  Run operator()(const std::string& args) const {
    const auto out = tmp_ / "stdout.txt";
    const auto err = tmp_ / "stderr.txt";
    const std::string cmd = "env -u CRUCIVERBA_LLM_API_KEY " + quote(CRUCIVERBA_CLI_PATH) + " --data " +
                            quote((tmp_ / "data").string()) + " --cache " + quote((tmp_ / "cache").string()) + " " +
                            args + " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    Run r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
  }
  std::filesystem::path operator/(const std::string& name) const { return tmp_ / name; }

 private:
  TempDir tmp_;
};

std::string replay_flag() { return "--replay " + quote(testing::replay_dir().string()); }

TEST(Cli, GridWritesAPuzzle) {
  Cli cli;
  write_file_atomic(cli / "accepted.jsonl",
                    R"({"id":"a","keyword":"Roma","clue":"La capitale d'Italia"})" "\n"
                    R"({"id":"b","keyword":"amore","clue":"Sentimento profondo"})" "\n");
  const auto r = cli("grid --in " + quote((cli / "accepted.jsonl").string()) + " --out " +
                     quote((cli / "puzzle.txt").string()));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string puzzle = read_file(cli / "puzzle.txt");
  EXPECT_NE(puzzle.find("La capitale d'Italia (4)"), std::string::npos);
  EXPECT_NE(puzzle.find("Sentimento profondo (5)"), std::string::npos);
}

TEST(Cli, GridJsonSummary) {
  Cli cli;
  write_file_atomic(cli / "in.jsonl", R"({"keyword":"oro","clue":"Metallo prezioso"})" "\n");
  const auto r = cli("--json grid --format json --in " + quote((cli / "in.jsonl").string()) + " --out " +
                     quote((cli / "p.json").string()));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json summary = json::parse(r.out);
  EXPECT_EQ(summary.at("placed"), 1);
  EXPECT_EQ(json::parse(read_file(cli / "p.json")).at("entries").size(), 1u);
}

TEST(Cli, RougeOverPairs) {
  Cli cli;
  const auto r = cli("--json rouge --pairs " + quote((testing::data_dir() / "rouge" / "pairs20.jsonl").string()));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report.at("pair_count"), 20);
  EXPECT_NEAR(report.at("mean_rouge1").get<double>(), 0.5045892392631522, 1e-12);
}

TEST(Cli, LiveGenerationWithoutKeyIsAuthFailure) {
  Cli cli;
  const auto r = cli("gen --text-file " + quote((testing::data_dir() / "e2e" / "context.txt").string()) +
                     " --keyword Uzbekistan");
  EXPECT_EQ(r.exit_code, exit_code(ErrorCode::kAuthFailure)) << r.err;
  EXPECT_NE(r.err.find("AuthFailure"), std::string::npos);
}

TEST(Cli, ReplayGenerationWritesRecords) {
  Cli cli;
  const auto r = cli(replay_flag() + " gen --text-file " +
                     quote((testing::data_dir() / "e2e" / "context.txt").string()) +
                     " --keyword Uzbekistan --styles bare_np --n 3 --out " + quote((cli / "clues.jsonl").string()));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::size_t lines = 0;
  for (char ch : read_file(cli / "clues.jsonl")) lines += ch == '\n';
  EXPECT_EQ(lines, 3u);
}

TEST(Cli, ValidateReportsLeak) {
  Cli cli;
  const auto r = cli("--json validate --clue " + quote("Razza di cane detta Patterdale Terrier") + " --answer " +
                     quote("Patterdale Terrier"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out).at("answer_leak").get<bool>());
}

TEST(Cli, MissingPageIsNotFound) {
  Cli cli;
  const auto r = cli(replay_flag() + " ingest --title " + quote("Pagina inesistente"));
  EXPECT_EQ(r.exit_code, exit_code(ErrorCode::kNotFound)) << r.err;
}

TEST(Cli, ReplayIngestPrintsTheArticle) {
  Cli cli;
  const auto r = cli(replay_flag() + " --json ingest --title Uzbekistan");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("title"), "Uzbekistan");
}

TEST(Cli, UsageErrorsExitTwo) {
  Cli cli;
  EXPECT_EQ(cli("").exit_code, 2);
  EXPECT_EQ(cli("grid").exit_code, 2);
  EXPECT_EQ(cli("frobnicate").exit_code, 2);
}

TEST(Cli, ReplayAndRecordConflict) {
  Cli cli;
  const auto r = cli(replay_flag() + " --record " + quote((cli / "rec").string()) + " ingest --title Uzbekistan");
  EXPECT_EQ(r.exit_code, exit_code(ErrorCode::kInvalidArgument)) << r.err;
}

}  // namespace
}  // namespace cruciverba
