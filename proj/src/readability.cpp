#include "sata/readability.hpp"

#include <cctype>

namespace sata {

namespace {

bool is_vowel(char c) {
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

long count_syllables(const std::string& word) {
  if (word.empty()) return 0;
  long groups = 0;
  long last_group_len = 0;
  bool in_group = false;
  for (char c : word) {
    if (is_vowel(c)) {
      if (!in_group) {
        ++groups;
        in_group = true;
        last_group_len = 1;
      } else {
        ++last_group_len;
      }
    } else {
      in_group = false;
    }
  }
  // A lone final 'e' ("mate") is treated as silent; "bee"/"employee" keep
  // their trailing group.
  char last = static_cast<char>(std::tolower(static_cast<unsigned char>(word.back())));
  if (last == 'e' && in_group && last_group_len == 1 && groups > 0) --groups;
  return groups > 0 ? groups : 1;
}

TextStats text_stats(const std::string& text) {
  TextStats stats;
  std::string word;
  auto flush_word = [&]() {
    if (word.empty()) return;
    ++stats.words;
    long syl = count_syllables(word);
    stats.syllables += syl;
    if (syl >= 3) ++stats.complex_words;
    word.clear();
  };

  bool sentence_open = false;  // at least one word since the last terminator
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (is_word_char(c)) {
      word.push_back(c);
      sentence_open = true;
      continue;
    }
    flush_word();
    if ((c == '.' || c == '!' || c == '?') && sentence_open) {
      bool at_boundary = i + 1 >= text.size() ||
                         std::isspace(static_cast<unsigned char>(text[i + 1])) != 0;
      if (at_boundary) {
        ++stats.sentences;
        sentence_open = false;
      }
    }
  }
  flush_word();
  if (sentence_open) ++stats.sentences;  // trailing text without a terminator
  return stats;
}

std::optional<double> fre(const std::string& text) {
  TextStats s = text_stats(text);
  if (s.words == 0 || s.sentences == 0) return std::nullopt;
  double w = static_cast<double>(s.words);
  return 206.835 - 1.015 * (w / static_cast<double>(s.sentences)) -
         84.6 * (static_cast<double>(s.syllables) / w);
}

std::optional<double> gfi(const std::string& text) {
  TextStats s = text_stats(text);
  if (s.words == 0 || s.sentences == 0) return std::nullopt;
  double w = static_cast<double>(s.words);
  return 0.4 * (w / static_cast<double>(s.sentences) +
                100.0 * (static_cast<double>(s.complex_words) / w));
}

}  // namespace sata
