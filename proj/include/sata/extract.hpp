#pragma once

#include <string>
#include <vector>

namespace sata {

enum class ExtractMethod { kJsonExact, kJsonFuzzy, kLetterFallback, kNumeric, kEmpty };
const char* to_string(ExtractMethod method);

struct ExtractionResult {
  std::vector<std::string> ids;  // ordered, deduplicated
  ExtractMethod method = ExtractMethod::kEmpty;
  int blocks_found = 0;  // balanced-brace blocks that parsed
};

// Recovers letter ids from model output. Balanced-brace blocks are parsed
// leniently (single quotes, trailing commas, bare keys, <B | E | H> style
// enumerations) and values under "choices"/"choice" keys are unioned across
// blocks. When no block yields ids, letters right after colon patterns are
// taken instead. The scan accepts A..Q; the result is filtered to
// `valid_ids` with first-occurrence dedup. Never throws: worst case is an
// empty result.
ExtractionResult extract_letter_choices(const std::string& text,
                                        const std::vector<std::string>& valid_ids);

// Numeric ids 1..max_id. Multi-digit numbers in [10, max_id] are matched
// first and their spans removed before single digits are read, so "12" can
// never be double-counted as 1 and 2. Results sorted ascending.
ExtractionResult extract_numeric_choices(const std::string& text, int max_id);

}  // namespace sata
