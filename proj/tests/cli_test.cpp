// Copyright 2026 The preorder Authors
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "preorder/cli.hpp"
#include "support.hpp"

namespace preorder {
namespace {

using testing::scratch_dir;
using testing::slurp;

const fs::path kToy = fs::path(PREORDER_SOURCE_DIR) / "data" / "toy";

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "preorder");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_subcommand(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, ScoreBleuIdentity) {
  auto dir = scratch_dir("cli-bleu");
  write_lines(dir / "h.txt", {"a b c d", "e f g h"});
  auto r = run({"score-bleu", "--hyp", (dir / "h.txt").string(), "--ref", (dir / "h.txt").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("BLEU = 100.00 (", 0), 0u) << r.out;
}

TEST(Cli, MissingFileIsInputError) {
  auto dir = scratch_dir("cli-missing");
  write_lines(dir / "x", {"0-0"});
  auto r = run({"symmetrize", "--a2b", (dir / "x").string(), "--b2a", (dir / "missing").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  auto r = run({"score-bleu", "--hyp", "x"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--ref"), std::string::npos);
  EXPECT_EQ(run({"train-lm", "--text", "x", "--order", "two"}).code, 2);
  auto dir = scratch_dir("cli-usage");
  write_lines(dir / "in", {"a ?"});
  EXPECT_EQ(run({"strip-eos", "--in", (dir / "in").string(), "--out", (dir / "o").string(), "--records",
                 (dir / "r").string(), "--marker", "?"})
                .code,
            2);
}

TEST(Cli, HelpExitsZero) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("learn-rules"), std::string::npos);
}

TEST(Cli, SymmetrizeModes) {
  auto dir = scratch_dir("cli-sym");
  write_lines(dir / "a", {"0-0 1-1", "0-1"});
  write_lines(dir / "b", {"0-0 1-0", "1-0"});
  auto r = run({"symmetrize", "--a2b", (dir / "a").string(), "--b2a", (dir / "b").string(), "--mode", "gdf"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0-0 1-0 1-1\n0-1 1-0\n");
  r = run({"symmetrize", "--a2b", (dir / "a").string(), "--b2a", (dir / "b").string(), "--mode", "intersect"});
  EXPECT_EQ(r.out, "0-0\n\n");
  write_lines(dir / "bt", {"0-0 0-1", "0-1"});
  r = run({"symmetrize", "--a2b", (dir / "a").string(), "--b2a", (dir / "bt").string(), "--b2a-target-first",
           "--mode", "union"});
  EXPECT_EQ(r.out, "0-0 1-0 1-1\n0-1 1-0\n");
  r = run({"symmetrize", "--a2b", (dir / "a").string(), "--b2a", (dir / "b").string(), "--mode", "grow"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, EosRoundTripThroughFiles) {
  auto dir = scratch_dir("cli-eos");
  write_lines(dir / "in", {"the cat sat .", "is he here ?", ".", "wow !"});
  ASSERT_EQ(run({"strip-eos", "--in", (dir / "in").string(), "--out", (dir / "s").string(), "--records",
                 (dir / "r").string()})
                .code,
            0);
  EXPECT_EQ(slurp(dir / "s"), "the cat sat\nis he here ?\n.\nwow !\n");
  EXPECT_EQ(slurp(dir / "r"), "0\t.\n");
  ASSERT_EQ(run({"restore-eos", "--in", (dir / "s").string(), "--records", (dir / "r").string(), "--out",
                 (dir / "back").string()})
                .code,
            0);
  EXPECT_EQ(slurp(dir / "back"), slurp(dir / "in"));
}

TEST(Cli, TrainLmAndPpl) {
  auto dir = scratch_dir("cli-lm");
  write_lines(dir / "t", {"a b"});
  ASSERT_EQ(run({"train-lm", "--text", (dir / "t").string(), "--order", "2", "--smoothing", "mle", "--out",
                 (dir / "lm").string()})
                .code,
            0);
  auto r = run({"ppl", "--lm", (dir / "lm").string(), "--text", (dir / "t").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ppl=1.0000"), std::string::npos) << r.out;
  EXPECT_EQ(run({"train-lm", "--text", (dir / "t").string(), "--order", "0"}).code, 1);
  EXPECT_EQ(run({"train-lm", "--text", (dir / "t").string(), "--smoothing", "kn"}).code, 2);
}

TEST(Cli, MbrRerank) {
  auto dir = scratch_dir("cli-mbr");
  write_lines(dir / "n", {"0 ||| x y z ||| 0.5", "0 ||| a b c d ||| 0", "0 ||| a b c e ||| 0", "0 ||| a b c d ||| 0",
                          "1 ||| only ||| -3"});
  auto r = run({"mbr-rerank", "--nbest", (dir / "n").string(), "--alpha", "1.0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "a b c d\nonly\n");
  EXPECT_EQ(run({"mbr-rerank", "--nbest", (dir / "n").string(), "--alpha", "0"}).code, 1);
}

TEST(Cli, OovSubstitute) {
  auto dir = scratch_dir("cli-oov");
  write_lines(dir / "in", {"vah books padhataa hai", "qq hai"});
  write_lines(dir / "d", {"book\tkitaab"});
  write_lines(dir / "sv", {"he reads books"});
  write_lines(dir / "tv", {"vah padhataa hai"});
  auto r = run({"oov-substitute", "--in", (dir / "in").string(), "--dict", (dir / "d").string(), "--src-vocab",
                (dir / "sv").string(), "--tgt-vocab", (dir / "tv").string(), "--out", (dir / "o").string(),
                "--report", (dir / "rep").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "o"), "vah kitaab padhataa hai\nqq hai\n");
  EXPECT_EQ(slurp(dir / "rep"), "0\t1\tbooks\treplaced\tkitaab\n");
}

TEST(Cli, RulesOnLengthMismatchReportsLocation) {
  auto dir = scratch_dir("cli-rules");
  write_lines(dir / "s", {"a b"});
  write_lines(dir / "d", {"1\ta\tX\t0\troot"});
  write_lines(dir / "r", {});
  auto r = run({"apply-rules", "--src", (dir / "s").string(), "--dep", (dir / "d").string(), "--rules",
                (dir / "r").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":1"), std::string::npos) << r.err;
}

// The built executable maps errors to process exit codes.
TEST(CliBinary, ProcessExitCodes) {
  auto status = [](const std::string& args) {
    int s = std::system((std::string(PREORDER_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("bogus"), 2);
  EXPECT_EQ(status("score-bleu --hyp /nonexistent --ref /nonexistent"), 1);
  auto h = (kToy / "train.hi").string();
  EXPECT_EQ(status("score-bleu --hyp " + h + " --ref " + h), 0);
}

class ToyPipeline : public ::testing::Test {
 protected:
  PipelineConfig config(const std::string& name, int workers = 1) {
    auto cfg = PipelineConfig::load(kToy / "config.txt");
    cfg.out_dir = scratch_dir(name);
    cfg.workers = workers;
    return cfg;
  }
};

TEST_F(ToyPipeline, MatchesGoldenReport) {
  auto cfg = config("toy-golden");
  auto report = run_pipeline(cfg);
  EXPECT_GT(report.rules_learned, 0u);
  ASSERT_TRUE(report.final_bleu);
  std::string got;
  for (const auto& l : report.to_lines()) got += l + "\n";
  EXPECT_EQ(got, slurp(fs::path(PREORDER_SOURCE_DIR) / "tests" / "data" / "toy_report.txt"));
  EXPECT_EQ(slurp(cfg.out_dir / "report.txt"), got);
  std::vector<std::string> names;
  for (const auto& s : report.stages) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"config", "symmetrize", "strip-eos", "learn-rules", "apply-rules",
                                             "extract-phrases", "train-lm", "score-bleu", "oov-substitute",
                                             "restore-eos"}));
}

TEST_F(ToyPipeline, DeterministicAcrossRunsAndWorkers) {
  auto a = config("toy-a"), b = config("toy-b"), c = config("toy-c", 8);
  run_pipeline(a);
  run_pipeline(b);
  run_pipeline(c);
  auto fa = testing::slurp_dir(a.out_dir);
  EXPECT_GE(fa.size(), 15u);
  EXPECT_EQ(fa, testing::slurp_dir(b.out_dir));
  EXPECT_EQ(fa, testing::slurp_dir(c.out_dir));
}

TEST_F(ToyPipeline, StagesReproduceFromIntermediates) {
  auto cfg = config("toy-iso");
  run_pipeline(cfg);
  auto o = cfg.out_dir;
  auto redo = scratch_dir("toy-iso-redo");
  auto p = [&](const char* n) { return (o / n).string(); };
  auto q = [&](const char* n) { return (redo / n).string(); };
  auto ok = [](const CliResult& r) { return r.code == 0 ? ::testing::AssertionSuccess() : ::testing::AssertionFailure() << r.err; };

  EXPECT_TRUE(ok(run({"symmetrize", "--a2b", (kToy / "train.a2b").string(), "--b2a", (kToy / "train.b2a").string(),
                      "--src", (kToy / "train.en").string(), "--tgt", (kToy / "train.hi").string(), "--out",
                      q("sym.align")})));
  EXPECT_TRUE(ok(run({"strip-eos", "--in", (kToy / "train.en").string(), "--out", q("train.src"), "--records",
                      q("eos.src.records")})));
  EXPECT_TRUE(ok(run({"learn-rules", "--src", p("train.src"), "--tgt", p("train.tgt"), "--align", p("train.align"),
                      "--dep", p("train.dep"), "--src-pos", p("train.src.pos"), "--out", q("rules.txt")})));
  EXPECT_TRUE(ok(run({"apply-rules", "--src", p("train.src"), "--dep", p("train.dep"), "--src-pos", p("train.src.pos"),
                      "--rules", p("rules.txt"), "--out", q("reordered.src"), "--perm", q("reordered.perm")})));
  EXPECT_TRUE(ok(run({"extract-phrases", "--src", p("reordered.src"), "--tgt", p("train.tgt"), "--align",
                      p("reordered.align"), "--max-len", "4", "--out", q("phrase-table.txt")})));
  EXPECT_TRUE(ok(run({"train-lm", "--text", p("train.tgt"), "--order", "3", "--out", q("lm.arpa")})));
  EXPECT_TRUE(ok(run({"restore-eos", "--in", p("hyp.oov"), "--records", p("eos.src.records"), "--out",
                      q("hyp.final")})));
  for (const auto& e : fs::directory_iterator(redo)) {
    auto name = e.path().filename();
    EXPECT_EQ(slurp(e.path()), slurp(o / name)) << name;
  }
}

TEST_F(ToyPipeline, ValidationFailsBeforeAnyStage) {
  auto dir = scratch_dir("toy-bad");
  auto lines = read_lines(kToy / "config.txt");
  for (auto& l : lines) {
    if (l.rfind("lm_order", 0) == 0) l = "lm_order = 0";
    if (l.rfind("out_dir", 0) == 0) l = "out_dir = " + (dir / "out").string();
  }
  for (auto& l : lines) {
    for (const char* key : {"src", "tgt", "dep", "src_pos", "a2b", "b2a", "hyp", "ref", "dict"}) {
      auto prefix = std::string(key) + " =";
      if (l.rfind(prefix, 0) == 0) l = prefix + " " + (kToy / std::string(trim(l.substr(prefix.size())))).string();
    }
  }
  write_lines(dir / "config.txt", lines);
  auto r = run({"pipeline", "--config", (dir / "config.txt").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("lm_order"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(PipelineConfig, ParsesAndRejects) {
  auto c = PipelineConfig::parse({"# comment", "src = a.txt  # trailing", "lm_order=4", "smoothing = mle",
                                  "eos_markers = . ।"},
                                 "/base");
  EXPECT_EQ(c.src, fs::path("/base/a.txt"));
  EXPECT_EQ(c.lm_order, 4);
  EXPECT_EQ(c.smoothing, Smoothing::kMle);
  EXPECT_EQ(c.eos_markers, (std::vector<std::string>{".", "।"}));
  EXPECT_EQ(c.max_phrase_len, 7);
  EXPECT_EQ(c.distortion_limit, 6);
  EXPECT_THROW(PipelineConfig::parse({"colour = red"}, "/"), InputError);
  EXPECT_THROW(PipelineConfig::parse({"lm_order = five"}, "/"), InputError);
  EXPECT_THROW(PipelineConfig::parse({"just words"}, "/"), InputError);
  EXPECT_THROW(PipelineConfig::parse({"smoothing = kn"}, "/"), InputError);
}

TEST(PipelineConfig, StageFailureNamesStage) {
  auto dir = scratch_dir("pipe-fail");
  write_lines(dir / "s", {"a b ."});
  write_lines(dir / "t", {"x y ."});
  write_lines(dir / "al", {"0-0 1-7"});
  write_lines(dir / "d", {"1\ta\tX\t0\troot", "2\tb\tX\t1\tx", "3\t.\t.\t1\tp"});
  PipelineConfig cfg;
  cfg.src = dir / "s";
  cfg.tgt = dir / "t";
  cfg.dep = dir / "d";
  cfg.align = dir / "al";
  cfg.out_dir = dir / "out";
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("strip-eos"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace preorder
