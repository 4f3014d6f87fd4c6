#include <doctest.h>

#include <deque>
#include <stdexcept>

#include "sata/decode.hpp"
#include "sata/prompt.hpp"
#include "sata/simulate.hpp"
#include "sata/synthetic.hpp"

using namespace sata;

namespace {

SataQuestion four_options(const IdSet& gold) {
  SataQuestion q;
  q.id = "d1";
  q.question = "decode fixture";
  q.options = {{"A", "alpha"}, {"B", "bravo"}, {"C", "charlie"}, {"D", "delta"}};
  q.gold = gold;
  return q;
}

// Replays scripted probability vectors, one per pass.
class ScriptedBackend : public ScoringBackend {
 public:
  explicit ScriptedBackend(std::deque<std::vector<double>> script)
      : script_(std::move(script)) {}

  OptionDistribution score(const ScoreQuery& query) override {
    if (script_.empty()) throw std::runtime_error("scripted backend exhausted");
    std::vector<double> probs = script_.front();
    script_.pop_front();
    REQUIRE(probs.size() == query.options.size());
    OptionDistribution dist;
    for (const auto& o : query.options) dist.ids.push_back(o.prompt_id);
    dist.probs = std::move(probs);
    return dist;
  }
  BinaryDistribution score_binary(const BinaryQuery&) override { return {}; }
  std::string name() const override { return "scripted"; }

 private:
  std::deque<std::vector<double>> script_;
};

// Every gold option well above threshold, distractors at 0.01.
class SeparatingBackend : public ScoringBackend {
 public:
  OptionDistribution score(const ScoreQuery& query) override {
    OptionDistribution dist;
    size_t n_gold = 0;
    for (const auto& o : query.options)
      if (!o.is_nota && query.question->is_gold(o.original_id)) ++n_gold;
    double distractor = 0.01;
    double gold_mass = 1.0 - distractor * static_cast<double>(query.options.size() - n_gold);
    for (const auto& o : query.options) {
      dist.ids.push_back(o.prompt_id);
      bool gold = !o.is_nota && query.question->is_gold(o.original_id);
      dist.probs.push_back(gold ? gold_mass / static_cast<double>(n_gold) : distractor);
    }
    return dist;
  }
  BinaryDistribution score_binary(const BinaryQuery&) override { return {}; }
  std::string name() const override { return "separating"; }
};

class ThrowingBackend : public ScoringBackend {
 public:
  OptionDistribution score(const ScoreQuery&) override {
    throw std::runtime_error("backend down");
  }
  BinaryDistribution score_binary(const BinaryQuery& q) override {
    if (q.option_id == "B") throw std::runtime_error("flaky option");
    BinaryDistribution bin;
    bin.p_yes = q.question->is_gold(q.option_id) ? 0.9 : 0.1;
    bin.p_no = 1.0 - bin.p_yes;
    return bin;
  }
  std::string name() const override { return "throwing"; }
};

void check_funnel_trace(const DecodeResult& r, const SataQuestion& q) {
  CHECK(r.trace.size() == static_cast<size_t>(r.passes));
  CHECK(r.passes >= 1);
  CHECK(r.passes <= static_cast<long>(q.option_count()) + 1);
  if (r.stopped_by == StopReason::kThreshold)
    CHECK(static_cast<size_t>(r.passes) == r.predicted.size());
  if (r.stopped_by == StopReason::kNota)
    CHECK(static_cast<size_t>(r.passes) == r.predicted.size() + 1);
  for (const auto& id : r.predicted) {
    CHECK(id != kNotaId);
    CHECK(q.find_option(id) != nullptr);
  }
  // NOTA absent from the first pass, present afterwards.
  if (!r.trace.empty()) {
    for (const auto& rem : r.trace.front().remaining) CHECK(rem != kNotaId);
    for (size_t t = 1; t < r.trace.size(); ++t) {
      bool has_nota = false;
      for (const auto& rem : r.trace[t].remaining) has_nota = has_nota || rem == kNotaId;
      CHECK(has_nota);
    }
  }
}

}  // namespace

TEST_CASE("funnel trace: split then concentrated, threshold stop") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  // pass 1 over ABCD: A 0.48; pass 2 over {B,C,D,NOTA} rebalanced: C at 0.95.
  ScriptedBackend backend({{0.48, 0.02, 0.46, 0.04}, {0.02, 0.95, 0.02, 0.01}});
  FunnelConfig cfg;
  cfg.tau = 0.9;
  cfg.debias = false;
  DecodeResult r = decode_choice_funnel(backend, q, cfg, nullptr, ctx);
  CHECK(r.predicted == IdSet{"A", "C"});
  CHECK(r.passes == 2);
  CHECK(r.stopped_by == StopReason::kThreshold);
  check_funnel_trace(r, q);
}

TEST_CASE("funnel trace: gold exhausted, NOTA stop at |gold|+1 passes") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  SyntheticBackend backend(SyntheticModelConfig{});
  FunnelConfig cfg;
  cfg.tau = 0.9;
  cfg.debias = false;
  DecodeResult r = decode_choice_funnel(backend, q, cfg, nullptr, ctx);
  CHECK(r.predicted == q.gold);
  CHECK(r.passes == 3);  // two picks plus the NOTA pass
  CHECK(r.stopped_by == StopReason::kNota);
  check_funnel_trace(r, q);
}

TEST_CASE("funnel trace: confident first pass stops before NOTA ever appears") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  ScriptedBackend backend({{0.95, 0.02, 0.02, 0.01}});
  FunnelConfig cfg;
  cfg.tau = 0.9;
  cfg.debias = false;
  DecodeResult r = decode_choice_funnel(backend, q, cfg, nullptr, ctx);
  CHECK(r.predicted == IdSet{"A"});
  CHECK(r.passes == 1);
  CHECK(r.stopped_by == StopReason::kThreshold);
  check_funnel_trace(r, q);
}

TEST_CASE("funnel: max_passes cap reports exhaustion") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  // Never confident, never NOTA: would walk every option without the cap.
  ScriptedBackend backend({{0.4, 0.3, 0.2, 0.1}, {0.1, 0.5, 0.2, 0.2}});
  FunnelConfig cfg;
  cfg.tau = 0.99;
  cfg.max_passes = 2;
  cfg.debias = false;
  DecodeResult r = decode_choice_funnel(backend, q, cfg, nullptr, ctx);
  CHECK(r.passes == 2);
  CHECK(r.stopped_by == StopReason::kExhausted);
  CHECK(r.predicted.size() == 2);
}

TEST_CASE("funnel: never selects the same id twice, walks every option when forced") {
  SataQuestion q = four_options({"B", "D"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  // Max always at the first real position with low confidence; the funnel
  // consumes all four options then faces the NOTA-only prompt.
  ScriptedBackend backend({{0.4, 0.2, 0.2, 0.2},
                           {0.4, 0.2, 0.2, 0.2},   // {B,C,D}+NOTA
                           {0.4, 0.3, 0.3},         // {C,D}+NOTA
                           {0.6, 0.4},              // {D}+NOTA
                           {1.0}});                 // NOTA only
  FunnelConfig cfg;
  cfg.tau = 0.99;
  cfg.debias = false;
  DecodeResult r = decode_choice_funnel(backend, q, cfg, nullptr, ctx);
  CHECK(r.predicted == IdSet{"A", "B", "C", "D"});
  CHECK(r.passes == 5);
  CHECK(r.stopped_by == StopReason::kNota);
  check_funnel_trace(r, q);
}

TEST_CASE("funnel: prose stop rule halts without accepting") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  ScriptedBackend backend({{0.48, 0.02, 0.46, 0.04}, {0.02, 0.55, 0.42, 0.01}});
  FunnelConfig cfg;
  cfg.tau = 0.6;
  cfg.stop_rule = FunnelStopRule::kHaltBelowTau;
  cfg.debias = false;
  DecodeResult r = decode_choice_funnel(backend, q, cfg, nullptr, ctx);
  // pass 1: best 0.48 < 0.6 -> halt immediately, nothing accepted.
  CHECK(r.predicted.empty());
  CHECK(r.passes == 1);
  CHECK(r.stopped_by == StopReason::kThreshold);
}

TEST_CASE("funnel: backend failure mid-run returns partial result flagged") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  ScriptedBackend backend({{0.48, 0.02, 0.46, 0.04}});  // second pass missing
  FunnelConfig cfg;
  cfg.tau = 0.9;
  cfg.debias = false;
  DecodeResult r = decode_choice_funnel(backend, q, cfg, nullptr, ctx);
  CHECK(r.failed);
  CHECK(r.predicted == IdSet{"A"});
}

TEST_CASE("funnel requires priors when debias is on") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  SyntheticBackend backend(SyntheticModelConfig{});
  FunnelConfig cfg;  // debias defaults to on
  CHECK_THROWS(decode_choice_funnel(backend, q, cfg, nullptr, ctx));
}

TEST_CASE("first token: threshold rule, degenerate thetas, monotone in theta") {
  SataQuestion q = four_options({"A", "B"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};

  auto run = [&](double theta) {
    ScriptedBackend backend({{0.6, 0.3, 0.08, 0.02}});
    return decode_first_token(backend, q, theta, nullptr, ctx);
  };
  DecodeResult mid = run(0.25);
  CHECK(mid.predicted == IdSet{"A", "B"});
  CHECK(mid.passes == 1);
  CHECK(mid.stopped_by == StopReason::kSinglePass);

  CHECK(run(0.0).predicted.size() == 4);
  CHECK(run(0.99).predicted.empty());

  size_t last = 5;
  for (double theta : {0.0, 0.05, 0.2, 0.5, 0.7}) {
    size_t size = run(theta).predicted.size();
    CHECK(size <= last);
    last = size;
  }

  ScriptedBackend uniform({{0.25, 0.25, 0.25, 0.25}});
  CHECK(decode_first_token(uniform, q, 0.5, nullptr, ctx).predicted.empty());
}

TEST_CASE("first token: backend failure marks the question unevaluated") {
  SataQuestion q = four_options({"A", "B"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  ThrowingBackend backend;
  DecodeResult r = decode_first_token(backend, q, 0.5, nullptr, ctx);
  CHECK(r.failed);
  CHECK(r.predicted.empty());
}

TEST_CASE("yes/no: selection rule, tie unselected, per-option failure tolerated") {
  SataQuestion q = four_options({"A", "C"});
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  SyntheticBackend backend(SyntheticModelConfig{});
  DecodeResult r = decode_yes_no(backend, q, ctx);
  CHECK(r.predicted == q.gold);
  CHECK(r.passes == 4);

  ThrowingBackend flaky;  // option B throws
  DecodeResult partial = decode_yes_no(flaky, q, ctx);
  CHECK(partial.failed);
  CHECK(partial.passes == 4);
  CHECK(partial.predicted == IdSet{"A", "C"});  // B unselected, run completed

  // Exact tie stays unselected.
  class TieBackend : public ScoringBackend {
   public:
    OptionDistribution score(const ScoreQuery&) override { return {}; }
    BinaryDistribution score_binary(const BinaryQuery&) override { return {0.5, 0.5, true}; }
    std::string name() const override { return "tie"; }
  } tie;
  CHECK(decode_yes_no(tie, q, ctx).predicted.empty());
}

TEST_CASE("yes/no InfCost equals the sum of option counts") {
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  SimulateConfig sim;
  sim.n_questions = 30;
  sim.options_min = 3;
  sim.options_max = 12;
  sim.gold_min = 2;
  sim.gold_max = 2;
  sim.seed = 17;
  auto questions = simulate_questions(sim, a);
  SyntheticBackend backend(SyntheticModelConfig{});
  long total = 0, expected = 0;
  for (const auto& q : questions) {
    total += decode_yes_no(backend, q, ctx).passes;
    expected += static_cast<long>(q.option_count());
  }
  CHECK(total == expected);
}

TEST_CASE("calibration: separating oracle yields smallest winning theta") {
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  SimulateConfig sim;
  sim.n_questions = 20;
  sim.options_min = sim.options_max = 4;
  sim.gold_min = sim.gold_max = 2;
  sim.seed = 23;
  auto holdout = simulate_questions(sim, a);
  SeparatingBackend backend;

  ThresholdCalibration cal = calibrate_threshold(backend, holdout, 0.01, nullptr, ctx);
  CHECK(cal.achieved_ji == doctest::Approx(1.0));
  CHECK(cal.theta == doctest::Approx(0.02));  // smallest grid value above 0.01
  CHECK(cal.usable_questions == 20);
  CHECK(cal.forward_passes == 20);

  ThresholdCalibration again = calibrate_threshold(backend, holdout, 0.01, nullptr, ctx);
  CHECK(again.theta == cal.theta);
  CHECK(again.grid_ji == cal.grid_ji);
}

TEST_CASE("calibration: degenerate grid and failure handling") {
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  SimulateConfig sim;
  sim.n_questions = 15;
  sim.options_min = sim.options_max = 4;
  sim.gold_min = sim.gold_max = 2;
  sim.seed = 29;
  auto holdout = simulate_questions(sim, a);

  SeparatingBackend backend;
  ThresholdCalibration coarse = calibrate_threshold(backend, holdout, 1.0, nullptr, ctx);
  REQUIRE(coarse.grid.size() == 2);
  CHECK(coarse.grid[0] == doctest::Approx(0.0));
  CHECK(coarse.grid[1] == doctest::Approx(1.0));
  CHECK(coarse.theta == doctest::Approx(0.0));  // theta 0 selects everything; best available

  ThrowingBackend broken;
  CHECK_THROWS(calibrate_threshold(broken, holdout, 0.1, nullptr, ctx));
  CHECK_THROWS(calibrate_threshold(backend, {}, 0.1, nullptr, ctx));
}

TEST_CASE("grid-maximum verification against exhaustive recomputation") {
  IdAlphabet a = IdAlphabet::uppercase();
  DecodeContext ctx{&a, "", ""};
  SimulateConfig sim;
  sim.n_questions = 25;
  sim.options_min = 4;
  sim.options_max = 6;
  sim.gold_min = 2;
  sim.gold_max = 4;
  sim.seed = 31;
  auto holdout = simulate_questions(sim, a);
  SyntheticModelConfig noisy;
  noisy.noise_sigma = 0.6;
  noisy.seed = 3;
  SyntheticBackend backend(noisy);

  ThresholdCalibration cal = calibrate_threshold(backend, holdout, 0.05, nullptr, ctx);
  double best = 0.0;
  for (double ji : cal.grid_ji) best = std::max(best, ji);
  CHECK(cal.achieved_ji == doctest::Approx(best));
  for (size_t i = 0; i < cal.grid.size(); ++i) {
    if (cal.grid[i] < cal.theta) CHECK(cal.grid_ji[i] < cal.achieved_ji);  // smallest-theta tie
  }
}

TEST_CASE("prompt rendering: options block, context elision, placeholders") {
  SataQuestion q = four_options({"A", "B"});
  q.context = "Some paragraph.";
  std::vector<PromptOption> options;
  for (const auto& o : q.options) options.push_back({o.id, o.text, o.id, false});

  std::string text = make_sata_prompt(q, options, kDefaultSataTemplate);
  CHECK(text.find("A. alpha") != std::string::npos);
  CHECK(text.find("B. bravo") != std::string::npos);
  CHECK(text.find("D. delta") != std::string::npos);
  CHECK(text.find("Paragraph: Some paragraph.") != std::string::npos);
  CHECK(text.find("Answers:") == text.size() - 8);
  CHECK(text == make_sata_prompt(q, options, kDefaultSataTemplate));

  q.context.clear();
  std::string bare = make_sata_prompt(q, options, kDefaultSataTemplate);
  CHECK(bare.find("Paragraph") == std::string::npos);
  CHECK(bare.find("{context}") == std::string::npos);

  CHECK_THROWS(make_sata_prompt(q, options, "no placeholders at all"));
  CHECK_THROWS(make_sata_prompt(q, options, "{question} but missing the options slot"));

  std::string yn = make_yes_no_prompt(q, q.options[2], kDefaultYesNoTemplate);
  CHECK(yn.find("Statement: charlie") != std::string::npos);
  CHECK(yn.find("\"Yes\" or \"No\"") != std::string::npos);
}
