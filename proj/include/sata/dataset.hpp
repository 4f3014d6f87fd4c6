#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sata/question.hpp"

namespace sata {

struct SkippedLine {
  size_t line_number;  // 1-based
  std::string reason;
};

struct LoadResult {
  std::vector<SataQuestion> questions;  // original line order
  std::vector<SkippedLine> skipped;
};

// One JSON object per line:
//   {"id": str, "context": str?, "question": str,
//    "options": [{"id": str, "text": str}, ...], "gold": [str, ...],
//    "domain": str?, "metadata": {str: str}?}
// Malformed or invariant-violating lines are skipped and reported with their
// line number; a duplicate question id aborts (downstream joins key on id).
LoadResult load_dataset(const std::string& path, const IdAlphabet& alphabet);

std::string question_to_json_line(const SataQuestion& q);
SataQuestion question_from_json(const std::string& json_text, const IdAlphabet& alphabet);

void save_dataset(const std::string& path, const std::vector<SataQuestion>& questions);

// Seed-deterministic partition: |holdout| = n, remainder keeps the rest,
// both in original relative order. Throws when n exceeds the input size.
std::pair<std::vector<SataQuestion>, std::vector<SataQuestion>> holdout_split(
    const std::vector<SataQuestion>& questions, size_t n, uint64_t seed);

}  // namespace sata
