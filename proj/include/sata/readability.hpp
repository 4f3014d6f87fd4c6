#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sata {

struct TextStats {
  long words = 0;
  long sentences = 0;
  long syllables = 0;
  long complex_words = 0;  // three or more syllables
};

// Desk heuristic, frozen for reproducibility: maximal aeiouy groups, minus a
// lone trailing 'e', floor 1. Parity with external readability tools is not
// a goal; gate semantics are.
long count_syllables(const std::string& word);

// Words are maximal alphanumeric runs; sentences end at [.!?] followed by
// whitespace or end of text.
TextStats text_stats(const std::string& text);

// 206.835 - 1.015 * (words/sentences) - 84.6 * (syllables/words).
// nullopt when the text has no words or no sentences.
std::optional<double> fre(const std::string& text);

// 0.4 * ((words/sentences) + 100 * (complex_words/words)).
std::optional<double> gfi(const std::string& text);

}  // namespace sata
