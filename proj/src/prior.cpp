#include "sata/prior.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "sata/parallel.hpp"
#include "sata/prompt.hpp"
#include "sata/rebalance.hpp"
#include "sata/rng.hpp"

namespace sata {

using nlohmann::json;

namespace {

std::vector<double> weighted_prefix_average(const std::map<int, PriorTable::Entry>& family,
                                            int target_length, bool keep_last) {
  if (target_length < 1) throw std::invalid_argument("prior: target length must be >= 1");
  std::vector<double> acc(static_cast<size_t>(target_length), 0.0);
  double total_weight = 0.0;
  for (const auto& [length, entry] : family) {
    if (length < target_length) continue;
    std::vector<double> v(static_cast<size_t>(target_length));
    if (keep_last) {
      // Option positions come from the prefix; the final slot keeps the
      // stored vector's own last (NOTA) position.
      for (int i = 0; i + 1 < target_length; ++i) v[i] = entry.probs[i];
      v[target_length - 1] = entry.probs.back();
    } else {
      for (int i = 0; i < target_length; ++i) v[i] = entry.probs[i];
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum <= 0.0) continue;
    for (double& x : v) x /= sum;
    for (int i = 0; i < target_length; ++i) acc[i] += entry.samples * v[i];
    total_weight += entry.samples;
  }
  if (total_weight <= 0.0)
    throw std::invalid_argument("prior: no stored length >= " + std::to_string(target_length));
  for (double& x : acc) x /= total_weight;
  return acc;
}

}  // namespace

std::vector<double> supplement_prefixes(const PriorTable& table, int target_length) {
  return weighted_prefix_average(table.plain, target_length, false);
}

std::vector<double> supplement_prefixes_nota(const PriorTable& table, int target_length) {
  return weighted_prefix_average(table.with_nota, target_length, true);
}

std::vector<double> PriorTable::prior_for(int n_options, bool nota) const {
  return nota ? supplement_prefixes_nota(*this, n_options + 1)
              : supplement_prefixes(*this, n_options);
}

OptionDistribution debias_scores(const OptionDistribution& observed,
                                 const std::vector<double>& prior) {
  if (observed.probs.size() != prior.size())
    throw std::invalid_argument("debias: prior length " + std::to_string(prior.size()) +
                                " does not match distribution of " +
                                std::to_string(observed.probs.size()));
  OptionDistribution out = observed;
  for (size_t i = 0; i < prior.size(); ++i) {
    if (prior[i] <= 0.0) throw std::invalid_argument("debias: prior entries must be positive");
    out.probs[i] = observed.probs[i] / prior[i];
  }
  out.renormalize();
  return out;
}

PriorTable estimate_priors(ScoringBackend& backend, const std::vector<SataQuestion>& questions,
                           const PriorEstimationConfig& config, const IdAlphabet& alphabet) {
  if (questions.empty()) throw std::invalid_argument("estimate_priors: empty sample");

  struct PerQuestion {
    int length = 0;
    std::vector<double> plain_sum;
    std::vector<double> nota_sum;
    int samples = 0;
    long passes = 0;
    bool failed = false;
    std::string error;
  };
  std::vector<PerQuestion> partial(questions.size());

  const std::string template_text =
      config.template_text.empty() ? kDefaultSataTemplate : config.template_text;

  parallel_for(questions.size(), std::max<size_t>(config.parallelism, 1), [&](size_t qi) {
    const SataQuestion& q = questions[qi];
    PerQuestion& acc = partial[qi];
    const int K = static_cast<int>(q.option_count());
    acc.length = K;
    acc.plain_sum.assign(K, 0.0);
    if (config.with_nota_family) acc.nota_sum.assign(K + 1, 0.0);

    int perms = config.permutations_per_question > 0 ? config.permutations_per_question
                                                     : std::min(K, 8);
    Rng rng = derive_rng(config.seed, "priors/" + q.id);
    try {
      for (int p = 0; p < perms; ++p) {
        // Permute contents; ids keep their positions.
        std::vector<size_t> order(q.options.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        std::vector<Option> permuted(q.options.size());
        for (size_t i = 0; i < order.size(); ++i)
          permuted[i] = Option{q.options[order[i]].id, q.options[order[i]].text};

        RebalanceResult plain = rebalance_ids(permuted, alphabet, false, config.nota_text);
        ScoreQuery query;
        query.question = &q;
        query.options = plain.options;
        query.prompt_text = make_sata_prompt(q, plain.options, template_text);
        OptionDistribution dist = backend.score(query);
        acc.passes += 1;
        for (int i = 0; i < K; ++i) acc.plain_sum[i] += dist.probs[i];

        if (config.with_nota_family) {
          RebalanceResult nota = rebalance_ids(permuted, alphabet, true, config.nota_text);
          ScoreQuery nq;
          nq.question = &q;
          nq.options = nota.options;
          nq.prompt_text = make_sata_prompt(q, nota.options, template_text);
          OptionDistribution ndist = backend.score(nq);
          acc.passes += 1;
          for (int i = 0; i < K + 1; ++i) acc.nota_sum[i] += ndist.probs[i];
        }
        acc.samples += 1;
      }
    } catch (const std::exception& e) {
      acc.failed = true;
      acc.error = e.what();
    }
  });

  PriorTable table;
  table.permutations_per_question = config.permutations_per_question;
  table.seed = config.seed;

  std::map<int, std::vector<double>> plain_sum, nota_sum;
  std::map<int, double> plain_n, nota_n;
  // Reduce in question order so results do not depend on thread scheduling.
  for (size_t qi = 0; qi < partial.size(); ++qi) {
    const PerQuestion& acc = partial[qi];
    table.forward_passes += acc.passes;
    if (acc.failed) {
      table.dropped_questions.push_back(questions[qi].id + ": " + acc.error);
      continue;
    }
    if (acc.samples == 0) continue;
    auto& ps = plain_sum[acc.length];
    if (ps.empty()) ps.assign(acc.length, 0.0);
    for (int i = 0; i < acc.length; ++i) ps[i] += acc.plain_sum[i];
    plain_n[acc.length] += acc.samples;
    if (config.with_nota_family) {
      auto& ns = nota_sum[acc.length + 1];
      if (ns.empty()) ns.assign(acc.length + 1, 0.0);
      for (int i = 0; i < acc.length + 1; ++i) ns[i] += acc.nota_sum[i];
      nota_n[acc.length + 1] += acc.samples;
    }
  }
  if (plain_sum.empty())
    throw std::runtime_error("estimate_priors: every question failed during estimation");

  auto finalize = [](std::map<int, PriorTable::Entry>& family,
                     const std::map<int, std::vector<double>>& sums,
                     const std::map<int, double>& counts) {
    for (const auto& [length, sum] : sums) {
      PriorTable::Entry entry;
      entry.samples = counts.at(length);
      entry.probs = sum;
      double total = 0.0;
      for (double x : entry.probs) total += x;
      for (double& x : entry.probs) x /= total;
      family[length] = std::move(entry);
    }
  };
  finalize(table.plain, plain_sum, plain_n);
  if (config.with_nota_family) finalize(table.with_nota, nota_sum, nota_n);
  return table;
}

std::string PriorTable::to_json() const {
  json j;
  j["config"] = {{"permutations_per_question", permutations_per_question},
                 {"subset_fraction", subset_fraction},
                 {"seed", seed}};
  json priors = json::object(), samples = json::object();
  for (const auto& [length, entry] : plain) {
    priors[std::to_string(length)] = entry.probs;
    samples[std::to_string(length)] = entry.samples;
  }
  j["priors"] = priors;
  j["samples"] = samples;
  if (!with_nota.empty()) {
    json np = json::object(), ns = json::object();
    for (const auto& [length, entry] : with_nota) {
      np[std::to_string(length)] = entry.probs;
      ns[std::to_string(length)] = entry.samples;
    }
    j["priors_nota"] = np;
    j["samples_nota"] = ns;
  }
  j["forward_passes"] = forward_passes;
  j["dropped"] = dropped_questions;
  return j.dump(2);
}

PriorTable PriorTable::from_json(const std::string& text) {
  json j = json::parse(text);
  PriorTable table;
  table.permutations_per_question = j.at("config").value("permutations_per_question", 0);
  table.subset_fraction = j.at("config").value("subset_fraction", 0.0);
  table.seed = j.at("config").value("seed", 0ull);
  auto read_family = [&](const char* pk, const char* sk, std::map<int, Entry>& family) {
    if (!j.contains(pk)) return;
    for (auto it = j[pk].begin(); it != j[pk].end(); ++it) {
      Entry entry;
      entry.probs = it.value().get<std::vector<double>>();
      entry.samples = j.at(sk).at(it.key()).get<double>();
      family[std::stoi(it.key())] = std::move(entry);
    }
  };
  read_family("priors", "samples", table.plain);
  read_family("priors_nota", "samples_nota", table.with_nota);
  table.forward_passes = j.value("forward_passes", 0l);
  if (j.contains("dropped"))
    table.dropped_questions = j["dropped"].get<std::vector<std::string>>();
  return table;
}

}  // namespace sata
