#pragma once

#include <cstdint>
#include <vector>

#include "sata/question.hpp"

namespace sata {

// Synthetic question generator for desk-scale verification. Option counts
// and gold counts are drawn uniformly from the configured ranges; gold
// counts never exceed option count - 1 (or 10).
struct SimulateConfig {
  size_t n_questions = 500;
  size_t options_min = 6;
  size_t options_max = 6;
  size_t gold_min = 2;
  size_t gold_max = 5;
  uint64_t seed = 0;
  std::string domain = "synthetic";
};

std::vector<SataQuestion> simulate_questions(const SimulateConfig& config,
                                             const IdAlphabet& alphabet);

}  // namespace sata
