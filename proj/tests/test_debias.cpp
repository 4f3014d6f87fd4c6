#include <doctest.h>

#include <cmath>

#include "sata/prior.hpp"
#include "sata/rebalance.hpp"
#include "sata/rng.hpp"
#include "sata/simulate.hpp"
#include "sata/synthetic.hpp"

using namespace sata;

namespace {

PriorTable table_with(std::map<int, std::vector<double>> plain,
                      std::map<int, double> samples) {
  PriorTable t;
  for (auto& [len, probs] : plain) {
    PriorTable::Entry e;
    e.probs = std::move(probs);
    e.samples = samples.at(len);
    t.plain[len] = std::move(e);
  }
  return t;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace

TEST_CASE("prefix supplementation reproduces the ten-to-three worked example") {
  PriorTable t = table_with(
      {{10, {0.12, 0.2, 0.05, 0.17, 0.04, 0.01, 0.01, 0.02, 0.3, 0.2}}}, {{10, 100.0}});
  std::vector<double> v = supplement_prefixes(t, 3);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(0.32).epsilon(0.005));
  CHECK(v[1] == doctest::Approx(0.54).epsilon(0.005));
  CHECK(v[2] == doctest::Approx(0.14).epsilon(0.005));
  CHECK(v[0] + v[1] + v[2] == doctest::Approx(1.0));
}

TEST_CASE("prefix supplementation: uniform stays uniform, native-only unchanged") {
  PriorTable uniform = table_with({{8, std::vector<double>(8, 0.125)}}, {{8, 10.0}});
  for (double x : supplement_prefixes(uniform, 5)) CHECK(x == doctest::Approx(0.2));

  PriorTable native = table_with({{4, {0.4, 0.3, 0.2, 0.1}}}, {{4, 5.0}});
  std::vector<double> same = supplement_prefixes(native, 4);
  CHECK(same[0] == doctest::Approx(0.4));
  CHECK(same[3] == doctest::Approx(0.1));

  CHECK_THROWS(supplement_prefixes(native, 9));  // no stored length >= 9
}

TEST_CASE("prefix supplementation: weighting by effective sample counts") {
  // Native length-2 prior [0.5,0.5] with weight 10; a length-4 prior whose
  // prefix renormalizes to [0.75,0.25] with weight 30 -> 0.25*native + 0.75*prefix.
  PriorTable t = table_with({{2, {0.5, 0.5}}, {4, {0.6, 0.2, 0.1, 0.1}}},
                            {{2, 10.0}, {4, 30.0}});
  std::vector<double> v = supplement_prefixes(t, 2);
  CHECK(v[0] == doctest::Approx(0.25 * 0.5 + 0.75 * 0.75));
  CHECK(v[1] == doctest::Approx(0.25 * 0.5 + 0.75 * 0.25));
  CHECK(v[0] + v[1] == doctest::Approx(1.0));
}

TEST_CASE("supplementation always sums to one on random tables") {
  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    PriorTable t;
    for (int len : {4, 7, 11}) {
      PriorTable::Entry e;
      double total = 0;
      for (int i = 0; i < len; ++i) {
        e.probs.push_back(0.05 + rng.next_unit());
        total += e.probs.back();
      }
      for (double& x : e.probs) x /= total;
      e.samples = 1.0 + 20.0 * rng.next_unit();
      t.plain[len] = std::move(e);
    }
    for (int target : {2, 3, 4, 6, 7, 10, 11}) {
      double sum = 0;
      for (double x : supplement_prefixes(t, target)) sum += x;
      CHECK(sum == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("nota family supplementation keeps the final position") {
  PriorTable t;
  PriorTable::Entry e;
  e.probs = {0.3, 0.25, 0.2, 0.15, 0.1};  // 4 options + NOTA last
  e.samples = 10.0;
  t.with_nota[5] = std::move(e);
  std::vector<double> v = supplement_prefixes_nota(t, 3);  // 2 options + NOTA
  REQUIRE(v.size() == 3);
  // prefix {0.3, 0.25} plus the NOTA slot 0.1, renormalized
  CHECK(v[0] == doctest::Approx(0.3 / 0.65));
  CHECK(v[1] == doctest::Approx(0.25 / 0.65));
  CHECK(v[2] == doctest::Approx(0.1 / 0.65));
}

TEST_CASE("debias_scores: worked example, identities") {
  OptionDistribution observed;
  observed.ids = {"A", "B", "C", "D"};
  observed.probs = {0.5, 0.3, 0.1, 0.1};

  // quotient [1.25, 1.5, 0.5, 0.5]: B becomes top-1
  OptionDistribution debiased = debias_scores(observed, {0.4, 0.2, 0.2, 0.2});
  CHECK(debiased.argmax() == 1);
  double total = 1.25 + 1.5 + 0.5 + 0.5;
  CHECK(debiased.probs[0] == doctest::Approx(1.25 / total));
  CHECK(debiased.probs[1] == doctest::Approx(1.5 / total));
  CHECK(debiased.probs[2] == doctest::Approx(0.5 / total));
  debiased.check();

  // uniform prior is the identity, so applying it twice changes nothing
  OptionDistribution same = debias_scores(observed, {0.25, 0.25, 0.25, 0.25});
  for (size_t i = 0; i < 4; ++i) CHECK(same.probs[i] == doctest::Approx(observed.probs[i]));
  OptionDistribution twice = debias_scores(same, {0.25, 0.25, 0.25, 0.25});
  for (size_t i = 0; i < 4; ++i) CHECK(twice.probs[i] == doctest::Approx(same.probs[i]));

  // observed == prior collapses to uniform
  OptionDistribution flat = debias_scores(observed, {0.5, 0.3, 0.1, 0.1});
  for (double p : flat.probs) CHECK(p == doctest::Approx(0.25));

  CHECK_THROWS(debias_scores(observed, {0.5, 0.5}));           // dimension mismatch
  CHECK_THROWS(debias_scores(observed, {0.5, 0.5, 0.0, 0.0}));  // nonpositive prior
}

TEST_CASE("debias argmax invariant under positive scaling of observed") {
  Rng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    OptionDistribution obs;
    std::vector<double> prior;
    double ptot = 0, ototal = 0;
    for (int i = 0; i < 5; ++i) {
      obs.ids.push_back(std::string(1, static_cast<char>('A' + i)));
      obs.probs.push_back(0.01 + rng.next_unit());
      ototal += obs.probs.back();
      prior.push_back(0.05 + rng.next_unit());
      ptot += prior.back();
    }
    for (double& p : obs.probs) p /= ototal;
    for (double& p : prior) p /= ptot;

    size_t base = debias_scores(obs, prior).argmax();
    OptionDistribution scaled = obs;
    double scale = 0.1 + 5.0 * rng.next_unit();
    for (double& p : scaled.probs) p *= scale;  // unnormalized on purpose
    for (double& p : scaled.probs) p /= scale;  // and back: argmax must be stable
    CHECK(debias_scores(scaled, prior).argmax() == base);

    // Raw quotient argmax equals the renormalized argmax.
    size_t quotient_best = 0;
    for (size_t i = 1; i < 5; ++i)
      if (obs.probs[i] / prior[i] > obs.probs[quotient_best] / prior[quotient_best])
        quotient_best = i;
    CHECK(base == quotient_best);
  }
}

TEST_CASE("rebalance: worked cases and inverse identity") {
  IdAlphabet a = IdAlphabet::uppercase();
  std::vector<Option> acde{{"A", "ta"}, {"C", "tc"}, {"D", "td"}, {"E", "te"}};
  RebalanceResult r = rebalance_ids(acde, a, false, "");
  REQUIRE(r.options.size() == 4);
  CHECK(r.options[0].prompt_id == "A");
  CHECK(r.options[1].prompt_id == "B");
  CHECK(r.options[2].prompt_id == "C");
  CHECK(r.options[3].prompt_id == "D");
  CHECK(r.remap.to_prompt("C") == "B");
  CHECK(r.remap.to_prompt("D") == "C");
  CHECK(r.remap.to_prompt("E") == "D");
  CHECK(r.remap.to_original("B") == "C");

  std::vector<Option> abc{{"A", "ta"}, {"B", "tb"}, {"C", "tc"}};
  RebalanceResult identity = rebalance_ids(abc, a, false, "");
  for (const auto& opt : identity.options) CHECK(opt.prompt_id == opt.original_id);

  std::vector<Option> bd{{"B", "tb"}, {"D", "td"}};
  RebalanceResult nota = rebalance_ids(bd, a, true, "None of the above");
  REQUIRE(nota.options.size() == 3);
  CHECK(nota.options[2].prompt_id == "C");
  CHECK(nota.options[2].is_nota);
  CHECK(nota.remap.to_prompt("B") == "A");
  CHECK(nota.remap.to_prompt("D") == "B");
  CHECK(nota.remap.prompt_id_is_nota("C"));

  // inverse-remap identity over every selection
  for (const auto& opt : nota.options)
    CHECK(nota.remap.to_prompt(nota.remap.to_original(opt.prompt_id)) == opt.prompt_id);

  std::vector<Option> too_many;
  for (int i = 0; i < 16; ++i)
    too_many.push_back(Option{"A", "t" + std::to_string(i)});
  CHECK_THROWS(rebalance_ids(too_many, a, true, "n"));
  CHECK_THROWS(rebalance_ids({}, a, false, ""));
}

TEST_CASE("estimate_priors: single question, one permutation equals the observation") {
  IdAlphabet a = IdAlphabet::uppercase();
  SimulateConfig sim;
  sim.n_questions = 1;
  sim.options_min = sim.options_max = 4;
  sim.gold_min = sim.gold_max = 2;
  sim.seed = 3;
  auto questions = simulate_questions(sim, a);

  SyntheticModelConfig cfg;
  cfg.id_bias = {0.4, 0.2, 0.2, 0.2};
  SyntheticBackend backend(cfg);
  PriorEstimationConfig pc;
  pc.permutations_per_question = 1;
  pc.seed = 12;
  PriorTable table = estimate_priors(backend, questions, pc, a);
  REQUIRE(table.plain.count(4) == 1);
  CHECK(table.plain.at(4).samples == doctest::Approx(1.0));
  CHECK(table.forward_passes == 1);
  double sum = 0;
  for (double p : table.plain.at(4).probs) sum += p;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("estimate_priors recovers injected bias; bias-free stays uniform") {
  IdAlphabet a = IdAlphabet::uppercase();
  SimulateConfig sim;
  sim.n_questions = 60;
  sim.options_min = sim.options_max = 4;
  sim.gold_min = 2;
  sim.gold_max = 3;
  sim.seed = 21;
  auto questions = simulate_questions(sim, a);

  // Content-symmetric scores: gold == distractor, only jitter and id bias.
  SyntheticModelConfig cfg;
  cfg.gold_score = 1.0;
  cfg.distractor_score = 1.0;
  cfg.noise_sigma = 0.4;
  cfg.seed = 77;
  cfg.id_bias = {0.4, 0.2, 0.2, 0.2};
  SyntheticBackend backend(cfg);

  PriorEstimationConfig pc;
  pc.permutations_per_question = 4;  // 240 question-permutations
  pc.seed = 5;
  PriorTable table = estimate_priors(backend, questions, pc, a);
  std::vector<double> target{0.4, 0.2, 0.2, 0.2};
  CHECK(l1(table.plain.at(4).probs, target) < 0.05);

  SyntheticModelConfig flat = cfg;
  flat.id_bias.clear();
  SyntheticBackend flat_backend(flat);
  PriorTable flat_table = estimate_priors(flat_backend, questions, pc, a);
  CHECK(l1(flat_table.plain.at(4).probs, {0.25, 0.25, 0.25, 0.25}) < 0.05);
}

TEST_CASE("estimate_priors: nota family carries the extra position") {
  IdAlphabet a = IdAlphabet::uppercase();
  SimulateConfig sim;
  sim.n_questions = 10;
  sim.options_min = sim.options_max = 5;
  sim.gold_min = 2;
  sim.gold_max = 3;
  sim.seed = 8;
  auto questions = simulate_questions(sim, a);
  SyntheticBackend backend(SyntheticModelConfig{});
  PriorEstimationConfig pc;
  pc.permutations_per_question = 2;
  pc.with_nota_family = true;
  pc.seed = 4;
  PriorTable table = estimate_priors(backend, questions, pc, a);
  CHECK(table.plain.count(5) == 1);
  CHECK(table.with_nota.count(6) == 1);
  CHECK(table.with_nota.at(6).probs.size() == 6);
  CHECK(table.forward_passes == 10 * 2 * 2);

  std::vector<double> via_lookup = table.prior_for(3, true);
  CHECK(via_lookup.size() == 4);
}

TEST_CASE("bias cancellation: mean debiased distribution is uniform under permutations") {
  IdAlphabet a = IdAlphabet::uppercase();
  SimulateConfig sim;
  sim.n_questions = 50;
  sim.options_min = sim.options_max = 4;
  sim.gold_min = sim.gold_max = 2;
  sim.seed = 13;
  auto questions = simulate_questions(sim, a);

  SyntheticModelConfig cfg;
  cfg.gold_score = 1.0;  // content-symmetric
  cfg.distractor_score = 1.0;
  cfg.id_bias = {0.5, 0.25, 0.15, 0.1};
  SyntheticBackend backend(cfg);

  PriorEstimationConfig pc;
  pc.permutations_per_question = 4;
  pc.seed = 19;
  PriorTable table = estimate_priors(backend, questions, pc, a);
  std::vector<double> prior = table.prior_for(4, false);

  std::vector<double> mean(4, 0.0);
  int count = 0;
  for (const auto& q : questions) {
    RebalanceResult reb = rebalance_ids(q.options, a, false, "");
    ScoreQuery query;
    query.question = &q;
    query.options = reb.options;
    OptionDistribution debiased = debias_scores(backend.score(query), prior);
    for (int i = 0; i < 4; ++i) mean[i] += debiased.probs[i];
    ++count;
  }
  for (double& m : mean) m /= count;
  CHECK(l1(mean, {0.25, 0.25, 0.25, 0.25}) < 0.05);
}

TEST_CASE("prior table json round trip") {
  IdAlphabet a = IdAlphabet::uppercase();
  SimulateConfig sim;
  sim.n_questions = 6;
  sim.options_min = 4;
  sim.options_max = 6;
  sim.gold_min = 2;
  sim.gold_max = 3;
  sim.seed = 40;
  auto questions = simulate_questions(sim, a);
  SyntheticBackend backend(SyntheticModelConfig{});
  PriorEstimationConfig pc;
  pc.permutations_per_question = 2;
  pc.with_nota_family = true;
  pc.seed = 2;
  PriorTable table = estimate_priors(backend, questions, pc, a);
  table.subset_fraction = 0.1;

  PriorTable back = PriorTable::from_json(table.to_json());
  CHECK(back.plain.size() == table.plain.size());
  CHECK(back.with_nota.size() == table.with_nota.size());
  CHECK(back.forward_passes == table.forward_passes);
  CHECK(back.subset_fraction == doctest::Approx(0.1));
  for (const auto& [len, entry] : table.plain) {
    CHECK(back.plain.at(len).samples == doctest::Approx(entry.samples));
    CHECK(l1(back.plain.at(len).probs, entry.probs) < 1e-12);
  }
}
