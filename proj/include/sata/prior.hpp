#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sata/backend.hpp"
#include "sata/distribution.hpp"
#include "sata/question.hpp"

namespace sata {

// Length-keyed option-ID priors estimated from content permutations.
// `plain` is keyed by option count; `with_nota` is keyed by total prompt
// positions with the NOTA slot last (a funnel prompt with m options plus
// NOTA reads entry m+1). Shorter lengths missing from a family are served by
// prefix supplementation from the longer stored vectors.
struct PriorTable {
  struct Entry {
    std::vector<double> probs;  // sums to 1
    double samples = 0;         // effective sample count behind the estimate
  };

  std::map<int, Entry> plain;
  std::map<int, Entry> with_nota;

  int permutations_per_question = 0;
  double subset_fraction = 0.0;
  uint64_t seed = 0;
  long forward_passes = 0;
  std::vector<std::string> dropped_questions;  // backend failures during estimation

  // Prior for a prompt with `n_options` content options (+ NOTA when asked).
  // Supplements from longer stored lengths when the exact length is absent.
  std::vector<double> prior_for(int n_options, bool nota) const;

  std::string to_json() const;
  static PriorTable from_json(const std::string& text);
};

struct PriorEstimationConfig {
  int permutations_per_question = 0;  // 0 -> min(option count, 8)
  bool with_nota_family = false;
  std::string nota_text = "None of the above";
  uint64_t seed = 0;
  size_t parallelism = 1;
  // Rendered prompt per permutation for text backends; empty renderer is
  // fine for the synthetic backend.
  std::string template_text;
};

// Label-free estimation: contents are permuted uniformly at random (seeded
// per question), the backend scores each permutation, and the observed
// per-position probabilities are averaged within each option-count group,
// then normalized. Backend failures drop the question from estimation and
// are recorded.
PriorTable estimate_priors(ScoringBackend& backend, const std::vector<SataQuestion>& questions,
                           const PriorEstimationConfig& config, const IdAlphabet& alphabet);

// Prefix supplementation over the plain family: every stored length M >= L
// contributes its first L entries renormalized to sum 1; contributions are
// averaged weighted by effective sample count (the native length-L vector
// included). Throws when no stored length reaches L.
std::vector<double> supplement_prefixes(const PriorTable& table, int target_length);

// Same idea for the with-NOTA family, except the last (NOTA) position of
// each longer vector is kept in place of being truncated away.
std::vector<double> supplement_prefixes_nota(const PriorTable& table, int target_length);

// P(debiased) = P(observed) / P(prior), renormalized to a probability vector
// so threshold comparisons keep their meaning. Argmax equals the argmax of
// the raw quotient.
OptionDistribution debias_scores(const OptionDistribution& observed,
                                 const std::vector<double>& prior);

}  // namespace sata
