#include "sata/simulate.hpp"

#include <algorithm>
#include <stdexcept>

#include "sata/rng.hpp"

namespace sata {

std::vector<SataQuestion> simulate_questions(const SimulateConfig& config,
                                             const IdAlphabet& alphabet) {
  if (config.options_min < kMinOptions || config.options_max > kMaxOptions ||
      config.options_min > config.options_max)
    throw std::invalid_argument("simulate: option range outside [3,15]");
  if (config.gold_min < kMinGold || config.gold_min > config.gold_max)
    throw std::invalid_argument("simulate: gold range invalid");

  std::vector<SataQuestion> questions;
  questions.reserve(config.n_questions);
  for (size_t n = 0; n < config.n_questions; ++n) {
    std::string qid = "sim-" + std::to_string(n + 1);
    Rng rng = derive_rng(config.seed, "simulate/" + qid);

    size_t k = config.options_min +
               static_cast<size_t>(rng.next_below(config.options_max - config.options_min + 1));
    size_t gold_cap = std::min({config.gold_max, k - 1, kMaxGold});
    if (gold_cap < config.gold_min)
      throw std::invalid_argument("simulate: gold_min incompatible with option count " +
                                  std::to_string(k));
    size_t g = config.gold_min +
               static_cast<size_t>(rng.next_below(gold_cap - config.gold_min + 1));

    SataQuestion q;
    q.id = qid;
    q.question = "Select every statement that holds for item " + std::to_string(n + 1) + ".";
    q.domain = config.domain;
    for (size_t i = 0; i < k; ++i) {
      q.options.push_back(Option{alphabet.symbols().at(i),
                                 "statement " + qid + "-" + std::to_string(i + 1)});
    }
    for (size_t idx : rng.sample_indices(k, g)) q.gold.insert(q.options[idx].id);
    q.validate(alphabet);
    questions.push_back(std::move(q));
  }
  return questions;
}

}  // namespace sata
