#pragma once

#include <cstdint>
#include <vector>

#include "sata/backend.hpp"

namespace sata {

// Deterministic stand-in for a real model. Scores gold contents above
// distractors, ramps NOTA up once every gold option has been selected, and
// can inject a per-position multiplicative id bias plus lognormal content
// jitter. With uniform bias and zero noise it is a perfect oracle whose
// distribution is invariant under content permutation up to relabeling --
// the property prior estimation relies on.
struct SyntheticModelConfig {
  double gold_score = 5.0;
  double distractor_score = 1.0;
  double nota_base = 0.5;            // while unselected gold remains
  double nota_high = 8.0;            // once no unselected gold remains
  std::vector<double> id_bias;       // per prompt position; missing => 1.0
  double noise_sigma = 0.0;          // lognormal jitter on content scores
  uint64_t seed = 0;

  void check() const;  // all scores and multipliers must be positive
};

class SyntheticBackend : public ScoringBackend {
 public:
  explicit SyntheticBackend(SyntheticModelConfig config);

  OptionDistribution score(const ScoreQuery& query) override;
  BinaryDistribution score_binary(const BinaryQuery& query) override;
  std::string name() const override { return "synthetic"; }

  const SyntheticModelConfig& config() const { return config_; }

 private:
  double jitter(const std::string& question_id, const std::string& key) const;
  SyntheticModelConfig config_;
};

}  // namespace sata
