#include "trainlab/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include "support.hpp"
#include "trainlab/checkpoints.hpp"

using trainlab::testing::fixture;
using trainlab::testing::TempDir;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  std::ostringstream out, err;
  std::istringstream in(stdin_text);
  Run r;
  r.code = trainlab::cli::dispatch(args, out, err, in);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, HelpAndUsage) {
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("schedule"), std::string::npos);
  const auto unknown = run({"nosuch"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("unknown subcommand 'nosuch'"), std::string::npos) << unknown.err;
  EXPECT_NE(unknown.err.find("Usage:"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"epochs", "--subwords"}).code, 2);
  EXPECT_EQ(run({"--format", "xml", "epochs", "--subwords", "1", "--batch", "1"}).code, 2);
}

TEST(Cli, Epochs) {
  const auto r = run({"epochs", "--subwords", "992000000", "--batch", "1500", "--gpus", "8", "--steps", "83000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "subwords\teffective_batch\tsteps_per_epoch\tsteps\tepochs\n"
                   "992000000\t12000\t82666.6667\t83000\t1.00403226\n");
  const auto j = run({"--format", "json", "epochs", "--subwords", "992000000", "--batch", "1500", "--gpus", "8",
                      "--steps", "83000"});
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_NEAR(doc["epochs"]["epochs"].get<double>(), 1.004, 1e-3);
}

TEST(Cli, FormatFromEnvironment) {
  ::setenv("TRAINLAB_FORMAT", "json", 1);
  const auto r = run({"epochs", "--subwords", "327000000", "--batch", "12000"});
  ::unsetenv("TRAINLAB_FORMAT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["epochs"]["steps_per_epoch"].get<double>(), 27250.0);
  // An explicit flag still wins.
  ::setenv("TRAINLAB_FORMAT", "json", 1);
  const auto t = run({"--format", "tsv", "epochs", "--subwords", "327000000", "--batch", "12000"});
  ::unsetenv("TRAINLAB_FORMAT");
  EXPECT_EQ(t.out.rfind("subwords\t", 0), 0u);
}

TEST(Cli, ScheduleEvalAndPlot) {
  const auto r = run({"schedule", "eval", "--lr", "0.20", "--warmup", "16000", "--steps", "1,16000,64000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines_of(r.out);
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "step\tlearning_rate");
  EXPECT_EQ(l[2], "16000\t0.00158113883");
  EXPECT_EQ(l[3], "64000\t0.000790569415");

  const auto p = run({"schedule", "plot", "--warmup", "10", "--max-step", "40", "--stride", "10"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(lines_of(p.out).size(), 5u);
  EXPECT_EQ(lines_of(p.out)[0], "# step\tlearning_rate");
  EXPECT_EQ(run({"schedule", "eval", "--warmup", "0", "--steps", "1"}).code, 1);
}

TEST(Cli, ScheduleNoise) {
  const auto r = run({"--format", "json", "schedule", "noise", "--corpus", "992000000", "--batch", "1500", "--gpus", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["noise"]["noise_scale"].get<double>(), 16533.1333, 1e-3);
}

TEST(Cli, PackManifest) {
  TempDir dir;
  const auto lengths = dir.write("lengths.tsv", "# id src tgt\np0\t11\t3\np1\t9\t9\np2\t10\t2\np3\t4\t10\np4\t80\t5\n");
  const auto r = run({"pack", "--budget", "40", "--max-length", "70", "--lengths", lengths.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines_of(r.out);
  ASSERT_EQ(l.size(), 3u);
  const auto b0 = nlohmann::json::parse(l[0]);
  EXPECT_EQ(b0["ids"], (std::vector<std::string>{"p1", "p2", "p3"}));
  EXPECT_EQ(b0["padded"], 30);
  EXPECT_EQ(b0["payload"], 29);
  const auto summary = nlohmann::json::parse(l[2])["summary"];
  EXPECT_EQ(summary["batches"], 2);
  EXPECT_EQ(summary["excluded"], 1);
  EXPECT_DOUBLE_EQ(summary["exclusion_pct"].get<double>(), 20.0);

  const auto j = run({"--format", "json", "pack", "--budget", "40", "--max-length", "70", "--lengths", lengths.string()});
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["batches"].size(), 2u);
  EXPECT_EQ(doc["excluded"], (std::vector<std::string>{"p4"}));
}

TEST(Cli, PackBadInput) {
  TempDir dir;
  const auto bad = dir.write("bad.tsv", "p0\t1\t2\np1\tx\t2\n");
  const auto r = run({"pack", "--budget", "40", "--lengths", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.tsv:2:"), std::string::npos) << r.err;
  EXPECT_EQ(run({"pack", "--budget", "40", "--lengths", (dir / "missing.tsv").string()}).code, 1);
}

TEST(Cli, Bleu) {
  const auto r = run({"bleu", "--translation", fixture("bleu/toy.hyp").string(), "--reference",
                      fixture("bleu/toy.ref").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines_of(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "BLEU = 44.6298747");
  EXPECT_EQ(l[1].rfind("BLEU+case.lc+numrefs.1+smooth.exp+tok.intl-v1+version.", 0), 0u);

  const auto cs = run({"--format", "json", "bleu", "--case-sensitive", "--translation",
                       fixture("bleu/toy.hyp").string(), "--reference", fixture("bleu/toy.ref").string()});
  const auto doc = nlohmann::json::parse(cs.out);
  EXPECT_NE(doc["signature"].get<std::string>().find("case.mixed"), std::string::npos);
  EXPECT_EQ(doc["totals"], (std::vector<int>{26, 23, 20, 17}));

  EXPECT_EQ(run({"bleu", "--translation", "/nonexistent", "--reference", fixture("bleu/toy.ref").string()}).code, 1);
}

TEST(Cli, CurvesTts) {
  TempDir dir;
  const auto log = dir.write("e.jsonl",
                             "{\"run\":\"r\",\"metric\":\"BLEU\",\"step\":1,\"wall_time\":3600,\"value\":10}\n"
                             "{\"run\":\"r\",\"metric\":\"BLEU\",\"step\":2,\"wall_time\":7200,\"value\":26}\n"
                             "{\"run\":\"r\",\"metric\":\"BLEU\",\"step\":3,\"wall_time\":10800,\"value\":25}\n"
                             "{\"run\":\"r\",\"metric\":\"BLEU\",\"step\":4,\"wall_time\":14400,\"value\":26}\n"
                             "{\"run\":\"r\",\"metric\":\"BLEU\",\"step\":5,\"wall_time\":18000,\"value\":27}\n");
  const auto r = run({"curves", "tts", "--events", log.string(), "--metric", "BLEU", "--threshold", "25.6",
                      "--throughput", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out)[1], "r\tBLEU\t25.6\ttrue\t4\t4\t4000");

  const auto miss = run({"curves", "tts", "--events", log.string(), "--threshold", "30"});
  EXPECT_EQ(miss.code, 0);
  EXPECT_EQ(lines_of(miss.out)[1], "r\tBLEU\t30\tfalse\tNA\tNA");
  EXPECT_EQ(run({"curves", "tts", "--events", log.string(), "--threshold", "30", "--strict"}).code, 1);

  const auto j = run({"--format", "json", "curves", "tts", "--events", log.string(), "--threshold", "30"});
  EXPECT_TRUE(nlohmann::json::parse(j.out)["tts"][0]["tts_hours"].is_null());
  EXPECT_EQ(run({"curves", "tts", "--events", log.string(), "--metric", "loss", "--threshold", "1"}).code, 1);
}

TEST(Cli, CurvesPlotAndSpeed) {
  const auto events = fixture("curves/piecewise.jsonl").string();
  const auto p = run({"curves", "plot", "--events", events, "--x", "examples", "--batch", "1500", "--gpus", "8"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(lines_of(p.out)[0], "# examples\tBLEU");
  EXPECT_EQ(lines_of(p.out)[2], "1200000\t2");
  EXPECT_EQ(run({"curves", "plot", "--events", events, "--x", "examples"}).code, 1);

  const auto s = run({"curves", "speed", "--events", events, "--window", "7200"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto l = lines_of(s.out);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[1], "r\t1\t3");
  EXPECT_EQ(l[4], "r\t4\t0");
}

TEST(Cli, CkptAvg) {
  TempDir dir;
  using namespace trainlab::checkpoints;
  Checkpoint a, b;
  a.step = 10;
  b.step = 30;
  a.tensors["t"] = Tensor{{2}, std::vector<double>{1, 3}};
  b.tensors["t"] = Tensor{{2}, std::vector<double>{3, 5}};
  write_checkpoint(a, dir / "a.tlck");
  write_checkpoint(b, dir / "b.tlck");
  const auto out = (dir / "avg.tlck").string();
  const auto r = run({"ckpt", "avg", "--inputs", (dir / "a.tlck").string(), (dir / "b.tlck").string(), "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_checkpoint(std::filesystem::path(out));
  EXPECT_EQ(m.step, 30u);
  EXPECT_EQ(std::get<std::vector<double>>(m.tensors.at("t").data), (std::vector<double>{2, 4}));
  dir.write("junk.tlck", "nope");
  EXPECT_EQ(run({"ckpt", "avg", "--inputs", (dir / "junk.tlck").string(), "--out", out}).code, 1);
}

TEST(Cli, CkptWatchEmptyDirectory) {
  TempDir dir;
  const auto r = run({"ckpt", "watch", "--dir", dir.path().string(), "--poll", "0.01", "--patience", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "output\tstep\tmembers\n");
}

TEST(Cli, VocabTrainSegmentCount) {
  TempDir dir;
  const auto corpus = dir.write("c.txt", "the cat sat\nthe cat ran\nthe dog sat\n");
  const auto vocab = (dir / "v.txt").string();
  const auto t = run({"vocab", "train", "--inputs", corpus.string(), "--budget", "1000", "--size", "12", "--out", vocab});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto seg = run({"vocab", "segment", "--vocab", vocab}, "the cats\n");
  ASSERT_EQ(seg.code, 0) << seg.err;
  const auto pieces = lines_of(seg.out).at(0);
  std::string joined;
  for (char c : pieces) {
    if (c != ' ' && c != '@') joined += c;
  }
  EXPECT_EQ(joined, "thecats");

  const auto pairs = dir.write("p.tsv", "the cat\tthe dog sat\nthe\t\n");
  const auto c = run({"--format", "json", "vocab", "count", "--vocab", vocab, "--pairs", pairs.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto doc = nlohmann::json::parse(c.out);
  EXPECT_EQ(doc["count"]["pairs"], 2);
  EXPECT_GE(doc["count"]["total_subwords"].get<int>(), 2);
}

TEST(Cli, DeterministicOutput) {
  const std::vector<std::string> args{"--format", "json", "curves", "speed", "--events",
                                      fixture("curves/piecewise.jsonl").string(), "--window", "3600"};
  EXPECT_EQ(run(args).out, run(args).out);
}
