// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/bleu_oracle.hpp"
#include "oracles/mean_oracle.hpp"
#include "oracles/tts_oracle.hpp"
#include "support.hpp"
#include "trainlab/batching.hpp"
#include "trainlab/bleu.hpp"
#include "trainlab/checkpoints.hpp"
#include "trainlab/curves.hpp"
#include "trainlab/schedule.hpp"
#include "trainlab/subword.hpp"

namespace tl = trainlab;
using tl::testing::relative_error;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// -- 1 ----------------------------------------------------------------------

Outcome throughput_tables() {
  Outcome o;
  struct Cell {
    const char* model;
    double batch;
    double ksteps_per_hour;
    double mwords_per_hour;
  };
  // Computation speed and training throughput of single-GPU runs.
  const std::vector<Cell> single_gpu{
      {"BASE", 500, 43.4, 21.7},  {"BASE", 1000, 30.2, 30.2}, {"BASE", 1500, 22.3, 33.4},
      {"BASE", 2000, 16.8, 33.7}, {"BASE", 2500, 14.4, 36.0}, {"BASE", 3000, 12.3, 37.0},
      {"BASE", 4500, 8.2, 36.7},  {"BASE", 6000, 6.6, 39.4},  {"BIG", 500, 23.6, 11.9},
      {"BIG", 1000, 13.5, 13.5},  {"BIG", 1500, 9.8, 14.7},   {"BIG", 2000, 7.5, 15.0},
      {"BIG", 2500, 6.5, 16.2},
  };
  double worst = 0.0;
  for (const auto& c : single_gpu) {
    const double got = tl::batching::throughput(c.ksteps_per_hour * 1000.0, c.batch);
    const double err = relative_error(got, c.mwords_per_hour * 1e6);
    worst = std::max(worst, err);
    o.check(err <= 0.01, std::string(c.model) + "/" + fmt("%.0f", c.batch) + " off by " + fmt("%.3g", err));
  }
  struct Row {
    int gpus;
    double steps_per_hour;
    double words_per_hour;
  };
  const std::vector<Row> multi_gpu{{1, 9800, 14.7e6}, {2, 7400, 22.2e6}, {6, 5400, 48.6e6}, {8, 5600, 67.2e6}};
  for (const auto& r : multi_gpu) {
    const double eff = static_cast<double>(tl::schedule::effective_batch_size(1500, r.gpus));
    o.check(tl::batching::throughput(r.steps_per_hour, eff) == r.words_per_hour,
            std::to_string(r.gpus) + " GPU row not exact");
  }
  if (o.pass) {
    o.detail = std::to_string(single_gpu.size()) + " populated speed cells within 1% (worst " + fmt("%.3g", worst * 100) +
               "%), 4 GPU rows exact";
  }
  return o;
}

// -- 2 ----------------------------------------------------------------------

Outcome epoch_arithmetic() {
  Outcome o;
  const double big = tl::batching::steps_per_epoch({992'000'000, 0}, 12000);
  const double small = tl::batching::steps_per_epoch({327'000'000, 0}, 12000);
  o.check(big >= 82000 && big <= 84000, "992M corpus gives " + fmt("%.9g", big));
  o.check(small >= 27000 && small <= 27500, "327M corpus gives " + fmt("%.9g", small));
  if (o.pass) o.detail = fmt("%.9g", big) + " and " + fmt("%.9g", small) + " steps per epoch";
  return o;
}

// -- 3 ----------------------------------------------------------------------

Outcome schedule_identities() {
  Outcome o;
  for (std::int64_t w : {16000, 1000, 7}) {
    tl::schedule::ScheduleConfig cfg;
    cfg.warmup_steps = w;
    std::int64_t argmax = 1;
    double best = -1.0;
    for (std::int64_t s = 1; s <= 10 * w; ++s) {
      const double lr = tl::schedule::actual_lr(cfg, s);
      if (lr > best) {
        best = lr;
        argmax = s;
      }
    }
    o.check(argmax == w, "argmax " + std::to_string(argmax) + " for warmup " + std::to_string(w));
  }
  tl::schedule::ScheduleConfig cfg;
  double worst = 0.0;
  for (std::int64_t k : {2, 4, 8}) {
    for (std::int64_t s = cfg.warmup_steps; s <= 10 * cfg.warmup_steps; s += 7) {
      const double ratio = tl::schedule::actual_lr(cfg, s) / tl::schedule::actual_lr(cfg, k * s);
      worst = std::max(worst, relative_error(ratio, std::sqrt(static_cast<double>(k))));
      const double via_api = tl::schedule::equivalent_example_rate_ratio(cfg, k, s);
      worst = std::max(worst, relative_error(via_api, std::sqrt(static_cast<double>(k))));
    }
  }
  o.check(worst <= 1e-12, "sqrt(k) ratio off by " + fmt("%.3g", worst));
  auto half = cfg;
  half.warmup_steps = cfg.warmup_steps / 2;
  const double pr = tl::schedule::peak_lr(half) / tl::schedule::peak_lr(cfg);
  o.check(relative_error(pr, std::sqrt(2.0)) <= 1e-12, "peak ratio " + fmt("%.17g", pr));
  if (o.pass) o.detail = "argmax at w, sqrt(k) worst rel err " + fmt("%.3g", worst) + ", peak ratio sqrt(2)";
  return o;
}

// -- 4 ----------------------------------------------------------------------

Outcome noise_scale() {
  Outcome o;
  const double g = tl::schedule::gradient_noise_scale(0.20, 992e6, 12000);
  // Closed form evaluated independently in extended precision.
  const long double closed = 0.20L * (992e6L / 12000.0L - 1.0L);
  const double err = relative_error(g, static_cast<double>(closed));
  o.check(err <= 1e-9, "g = " + fmt("%.12g", g) + " vs closed form " + fmt("%.12g", static_cast<double>(closed)));
  o.check(tl::schedule::gradient_noise_scale(0.20, 12000, 12000) == 0.0, "g != 0 when N = B");
  if (o.pass) {
    o.detail = "g = " + fmt("%.12g", g) + " (closed form, rel err " + fmt("%.2g", err) +
               "), 0 at N = B";
  }
  return o;
}

// -- 5 ----------------------------------------------------------------------

Outcome time_till_score() {
  Outcome o;
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> len(1, 200);
  std::uniform_real_distribution<double> val(0.0, 30.0);
  std::uniform_real_distribution<double> dt(1.0, 600.0);
  std::uniform_real_distribution<double> thr(0.0, 32.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<tl::curves::CurvePoint> pts;
    double t = 0.0;
    for (int i = len(rng), step = 0; i > 0; --i) pts.push_back({step += 100, t += dt(rng), val(rng)});
    const tl::curves::Curve curve("BLEU", "random", pts);
    for (int q = 0; q < 5; ++q) {
      const double threshold = q == 0 ? pts.back().value : thr(rng);
      const auto got = tl::curves::time_till_score(curve, threshold);
      const auto want = tl::oracle::brute_force_tts(pts, threshold);
      if (got.has_value() != want.has_value() || (got && got->wall_time != *want)) ++mismatches;
    }
  }
  o.check(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  const double ets8 = tl::curves::examples_till_score(40.0, 67.2e6);
  const double ets2 = tl::curves::examples_till_score(203.0, 22.2e6);
  o.check(relative_error(ets8, 2728e6) <= 0.05, "8 GPU ETS " + fmt("%.6g", ets8));
  o.check(relative_error(ets2, 4644e6) <= 0.05, "2 GPU ETS " + fmt("%.6g", ets2));
  if (o.pass) {
    o.detail = "5000 queries on 1000 curves match the oracle; ETS " + fmt("%.4g", ets8 / 1e6) + "M (" +
               fmt("%.2f", relative_error(ets8, 2728e6) * 100) + "%) and " + fmt("%.5g", ets2 / 1e6) + "M (" +
               fmt("%.2f", relative_error(ets2, 4644e6) * 100) + "%)";
  }
  return o;
}

// -- 6 ----------------------------------------------------------------------

Outcome bleu_oracle() {
  Outcome o;
  const std::vector<std::string> vocab{"the", "a",  "cat", "dog", "sat", "on",  "mat", "ran",
                                       "and", "it", ",",   ".",   "?",   "red", "big", "old"};
  std::mt19937_64 rng(66);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(0, 15);
  std::uniform_int_distribution<int> lines(1, 12);
  auto sentence = [&] {
    std::string s;
    for (int i = len(rng); i > 0; --i) s += vocab[word(rng)] + (i > 1 ? " " : "");
    return s;
  };
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> hyps, refs;
    std::vector<tl::oracle::Tokens> th, tr;
    for (int i = lines(rng); i > 0; --i) {
      hyps.push_back(sentence());
      refs.push_back(sentence());
      std::istringstream hs(hyps.back()), rs(refs.back());
      th.emplace_back(std::istream_iterator<std::string>(hs), std::istream_iterator<std::string>());
      tr.emplace_back(std::istream_iterator<std::string>(rs), std::istream_iterator<std::string>());
    }
    const double got = tl::bleu::corpus_bleu(hyps, refs).score;
    const double want = tl::oracle::brute_force_bleu(th, tr);
    worst = std::max(worst, std::abs(got - want));
  }
  o.check(worst <= 1e-9, "max abs diff to oracle " + fmt("%.3g", worst));
  const auto refs = tl::bleu::read_lines(tl::testing::fixture("bleu/toy.ref"));
  const double same = tl::bleu::corpus_bleu(refs, refs).score;
  o.check(same == 100.0, "identical input scores " + fmt("%.17g", same));
  const std::vector<std::string> empty(refs.size());
  const double none = tl::bleu::corpus_bleu(empty, refs).score;
  o.check(none == 0.0, "empty hypotheses score " + fmt("%.17g", none));
  if (o.pass) o.detail = "500 corpora, max abs diff " + fmt("%.3g", worst) + "; identical = 100, empty = 0";
  return o;
}

// -- 7 ----------------------------------------------------------------------

class ScriptedClock final : public tl::checkpoints::Clock {
 public:
  double now() override { return t_; }
  void sleep_for(duration d) override {
    t_ += d.count();
    if (on_sleep) on_sleep(++sleeps_);
  }
  std::function<void(int)> on_sleep;

 private:
  double t_ = 0.0;
  int sleeps_ = 0;
};

tl::checkpoints::Checkpoint random_checkpoint(std::mt19937_64& rng, std::uint64_t step) {
  using tl::checkpoints::Tensor;
  std::normal_distribution<double> val(0.0, 3.0);
  tl::checkpoints::Checkpoint c;
  c.step = step;
  std::vector<double> a(24);
  for (auto& x : a) x = val(rng);
  std::vector<float> b(15);
  for (auto& x : b) x = static_cast<float>(val(rng));
  std::vector<double> d(7);
  for (auto& x : d) x = val(rng) * 1e-5;
  c.tensors["layer0/kernel"] = Tensor{{4, 6}, std::move(a)};
  c.tensors["layer0/bias32"] = Tensor{{3, 5}, std::move(b)};
  c.tensors["embed"] = Tensor{{7}, std::move(d)};
  return c;
}

Outcome checkpoint_averaging() {
  namespace ck = tl::checkpoints;
  Outcome o;
  std::mt19937_64 rng(77);
  const auto c = random_checkpoint(rng, 12345);
  std::ostringstream first(std::ios::binary);
  ck::write_checkpoint(c, first);
  std::istringstream in(first.str(), std::ios::binary);
  const auto back = ck::read_checkpoint(in);
  std::ostringstream second(std::ios::binary);
  ck::write_checkpoint(back, second);
  o.check(back == c && first.str() == second.str(), "round trip not bit-identical");

  double worst64 = 0.0;
  bool f32_ok = true;
  std::uniform_int_distribution<int> count(1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ck::Checkpoint> set;
    for (int i = count(rng); i > 0; --i) set.push_back(random_checkpoint(rng, static_cast<std::uint64_t>(i)));
    const auto mean = ck::average_checkpoints(set);
    for (const auto& [name, tensor] : mean.tensors) {
      const auto want = tl::oracle::brute_force_mean(set, name);
      for (std::size_t i = 0; i < want.size(); ++i) {
        if (tensor.dtype() == ck::DType::f64) {
          worst64 = std::max(worst64, relative_error(std::get<std::vector<double>>(tensor.data)[i],
                                                     static_cast<double>(want[i])));
        } else {
          // f32 storage: the exact mean rounded to float, give or take one ulp.
          const float got = std::get<std::vector<float>>(tensor.data)[i];
          const float ref = static_cast<float>(want[i]);
          f32_ok = f32_ok && (got == ref || std::nextafter(got, ref) == ref);
        }
      }
    }
  }
  o.check(worst64 <= 1e-12, "f64 mean off by " + fmt("%.3g", worst64));
  o.check(f32_ok, "f32 mean differs from the rounded oracle by more than one ulp");
  o.check(ck::average_checkpoints(std::vector<ck::Checkpoint>{c}) == c, "average([c]) != c");

  tl::testing::TempDir dir;
  std::vector<ck::Checkpoint> arrivals;
  for (int i = 1; i <= 3; ++i) {
    ck::Checkpoint a;
    a.step = static_cast<std::uint64_t>(i);
    a.tensors["w"] = ck::Tensor{{1}, std::vector<double>{static_cast<double>(i)}};
    arrivals.push_back(a);
  }
  ck::write_checkpoint(arrivals[0], dir / "1.tlck");
  ScriptedClock clock;
  clock.on_sleep = [&](int n) {
    if (n <= 2) ck::write_checkpoint(arrivals[static_cast<std::size_t>(n)], dir / (std::to_string(n + 1) + ".tlck"));
  };
  ck::WatchOptions opts;
  opts.window = {2, 0.0};
  opts.patience = 600.0;
  const auto emitted = ck::watch_and_average(dir.path(), opts, clock);
  std::string seq;
  for (const auto& e : emitted) {
    seq += "{";
    for (std::size_t i = 0; i < e.members.size(); ++i) {
      seq += (i ? "," : "") + e.members[i].stem().string();
    }
    seq += "}";
  }
  o.check(seq == "{1}{1,2}{2,3}", "watch emitted " + seq);
  if (o.pass) {
    o.detail = "bit-identical round trip; 100 sets, f64 worst rel err " + fmt("%.3g", worst64) +
               ", f32 within 1 ulp of rounded oracle; idempotent; watch " + seq;
  }
  return o;
}

// -- 8 ----------------------------------------------------------------------

Outcome packing_properties() {
  namespace bt = tl::batching;
  Outcome o;
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<int> size(1, 300);
  std::uniform_int_distribution<std::int64_t> budget_dist(16, 400);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::int64_t budget = budget_dist(rng);
    std::uniform_int_distribution<std::int64_t> lens(0, budget + budget / 4);
    std::vector<bt::SentencePair> pairs;
    for (int i = size(rng); i > 0; --i) {
      bt::SentencePair p{"s" + std::to_string(i), lens(rng), lens(rng)};
      if (p.src_len == 0 && p.tgt_len == 0) p.src_len = 1;
      pairs.push_back(p);
    }
    const auto plan = bt::plan_batches(pairs, budget, std::nullopt);
    std::map<std::string, const bt::SentencePair*> by_id;
    for (const auto& p : pairs) by_id[p.id] = &p;
    std::vector<std::string> seen(plan.excluded);
    for (const auto& b : plan.batches) {
      if (b.ids.size() > 1 && b.padded_token_cost > budget) ++violations;
      std::int64_t max_cost = 0;
      for (const auto& id : b.ids) {
        seen.push_back(id);
        max_cost = std::max(max_cost, bt::pair_cost(*by_id.at(id)));
      }
      if (static_cast<std::int64_t>(b.ids.size()) * max_cost != b.padded_token_cost) ++violations;
    }
    for (const auto& id : plan.excluded) {
      const auto& p = *by_id.at(id);
      if (p.src_len <= budget && p.tgt_len <= budget) ++violations;
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::string> all;
    for (const auto& p : pairs) all.push_back(p.id);
    std::sort(all.begin(), all.end());
    if (seen != all) ++violations;

    const std::vector<std::int64_t> thresholds{1, 10, 50, 100, 200, 400, 1000};
    const auto pct = bt::exclusion_stats(pairs, thresholds);
    if (!std::is_sorted(pct.rbegin(), pct.rend())) ++violations;
  }
  o.check(violations == 0, std::to_string(violations) + " property violations");
  if (o.pass) o.detail = "1000 corpora: budget, partition, reconstruction and exclusion monotonicity hold";
  return o;
}

// -- 9 ----------------------------------------------------------------------

Outcome subword_properties() {
  namespace sw = tl::subword;
  Outcome o;
  const std::vector<std::filesystem::path> files{tl::testing::fixture("subword/english.txt")};
  const auto sample = sw::sample_corpus(files, 32000);
  const auto first = sw::train_vocab(sample.text, 4096);
  const auto again = sw::train_vocab(sw::sample_corpus(files, 32000).text, 4096);
  o.check(first.vocab.units() == again.vocab.units() && first.vocab.min_count() == again.vocab.min_count(),
          "training is not deterministic");

  std::ifstream in(files[0], std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream ws(text);
  std::size_t words = 0;
  std::size_t pieces = 0;
  std::size_t broken = 0;
  for (std::string w; ws >> w;) {
    ++words;
    const auto seg = sw::segment_word(w, first.vocab);
    pieces += seg.size();
    if (sw::join_pieces(seg) != w) ++broken;
  }
  o.check(words >= 10000, "fixture has only " + std::to_string(words) + " words");
  o.check(broken == 0, std::to_string(broken) + " words fail to reconstruct");
  const double ratio = static_cast<double>(pieces) / static_cast<double>(words);
  o.check(ratio >= 1.2 && ratio <= 1.8, "subwords per word " + fmt("%.4g", ratio));
  if (o.pass) {
    o.detail = std::to_string(words) + " words reconstruct; deterministic; " + fmt("%.4g", ratio) +
               " subwords/word (vocab " + std::to_string(first.vocab.size()) + ", min_count " +
               std::to_string(first.vocab.min_count()) + ")";
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "throughput tables", throughput_tables},
      {2, "epoch arithmetic", epoch_arithmetic},
      {3, "schedule identities", schedule_identities},
      {4, "gradient noise scale", noise_scale},
      {5, "time till score", time_till_score},
      {6, "bleu oracle", bleu_oracle},
      {7, "checkpoint averaging", checkpoint_averaging},
      {8, "packing properties", packing_properties},
      {9, "subword properties", subword_properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %d  %-22s %7.3fs  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
    failed += out.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
