#include "sata/extract.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace sata {

using nlohmann::json;

const char* to_string(ExtractMethod method) {
  switch (method) {
    case ExtractMethod::kJsonExact: return "json_exact";
    case ExtractMethod::kJsonFuzzy: return "json_fuzzy";
    case ExtractMethod::kLetterFallback: return "letter_fallback";
    case ExtractMethod::kNumeric: return "numeric";
    case ExtractMethod::kEmpty: return "empty";
  }
  return "unknown";
}

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// <B | E | H> -> ["B","E","H"]; applied only when every token is a short
// alphanumeric, so comparisons like "a < b" are left alone.
std::string expand_angle_enums(const std::string& text) {
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '<') {
      out.push_back(text[i++]);
      continue;
    }
    size_t close = text.find('>', i + 1);
    if (close == std::string::npos) {
      out.push_back(text[i++]);
      continue;
    }
    std::string inner = text.substr(i + 1, close - i - 1);
    std::vector<std::string> tokens;
    std::string current;
    bool ok = !inner.empty();
    for (char c : inner) {
      if (c == '|') {
        if (!current.empty()) tokens.push_back(current);
        current.clear();
      } else if (is_word_char(c)) {
        current.push_back(c);
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        ok = false;
        break;
      }
    }
    if (!current.empty()) tokens.push_back(current);
    for (const auto& t : tokens)
      if (t.size() > 2) ok = false;
    if (!ok || tokens.empty()) {
      out.push_back(text[i++]);
      continue;
    }
    out.push_back('[');
    for (size_t t = 0; t < tokens.size(); ++t) {
      if (t) out.push_back(',');
      out.push_back('"');
      out += tokens[t];
      out.push_back('"');
    }
    out.push_back(']');
    i = close + 1;
  }
  return out;
}

// Single quotes become double quotes only when they sit in a delimiter
// position, so apostrophes inside words survive.
std::string fix_single_quotes(const std::string& text) {
  auto prev_nonspace = [&](size_t i) -> char {
    while (i > 0) {
      --i;
      if (!std::isspace(static_cast<unsigned char>(text[i]))) return text[i];
    }
    return '\0';
  };
  auto next_nonspace = [&](size_t i) -> char {
    for (size_t j = i + 1; j < text.size(); ++j)
      if (!std::isspace(static_cast<unsigned char>(text[j]))) return text[j];
    return '\0';
  };
  std::string out = text;
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] != '\'') continue;
    char before = prev_nonspace(i);
    char after = next_nonspace(i);
    bool opening = before == '{' || before == '[' || before == ',' || before == ':' ||
                   before == '\0';
    bool closing = after == '}' || after == ']' || after == ',' || after == ':' || after == '\0';
    if (opening || closing) out[i] = '"';
  }
  return out;
}

std::string quote_bare_keys(const std::string& text) {
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    out.push_back(c);
    ++i;
    if (c != '{' && c != ',') continue;
    size_t j = i;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    size_t start = j;
    while (j < text.size() && (is_word_char(text[j]) || text[j] == '_')) ++j;
    if (j == start) continue;
    size_t k = j;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == ':') {
      out.append(text, i, start - i);
      out.push_back('"');
      out.append(text, start, j - start);
      out.push_back('"');
      i = j;
    }
  }
  return out;
}

std::string strip_trailing_commas(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == ',') {
      size_t j = i + 1;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
    }
    out.push_back(text[i]);
  }
  return out;
}

bool is_choice_key(std::string key) {
  for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return key == "choice" || key == "choices";
}

void append_token(std::vector<std::string>& out, const std::string& token) {
  if (!token.empty()) out.push_back(token);
}

// Splits a string value on non-alphanumerics: "B, E" -> B, E.
void harvest_string(const std::string& value, std::vector<std::string>& out) {
  std::string current;
  for (char c : value) {
    if (is_word_char(c)) {
      current.push_back(c);
    } else {
      append_token(out, current);
      current.clear();
    }
  }
  append_token(out, current);
}

void harvest_value(const json& value, std::vector<std::string>& out) {
  if (value.is_string()) {
    harvest_string(value.get<std::string>(), out);
  } else if (value.is_number_integer()) {
    out.push_back(std::to_string(value.get<long long>()));
  } else if (value.is_array()) {
    for (const auto& item : value) harvest_value(item, out);
  } else if (value.is_object()) {
    for (auto it = value.begin(); it != value.end(); ++it) harvest_value(it.value(), out);
  }
}

void walk_for_choices(const json& node, std::vector<std::string>& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      if (is_choice_key(it.key()))
        harvest_value(it.value(), out);
      else
        walk_for_choices(it.value(), out);
    }
  } else if (node.is_array()) {
    for (const auto& item : node) walk_for_choices(item, out);
  }
}

size_t find_matching_brace(const std::string& text, size_t open) {
  int depth = 0;
  for (size_t i = open; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}') {
      --depth;
      if (depth == 0) return i;
    }
  }
  return std::string::npos;
}

struct BlockScan {
  std::vector<std::string> tokens;  // candidate ids in appearance order
  int blocks_parsed = 0;
  bool used_repair = false;
};

BlockScan scan_blocks(const std::string& text) {
  BlockScan result;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      ++i;
      continue;
    }
    size_t close = find_matching_brace(text, i);
    if (close == std::string::npos) {
      ++i;
      continue;
    }
    std::string block = text.substr(i, close - i + 1);
    bool parsed = false, repaired = false;
    json doc;
    try {
      doc = json::parse(block);
      parsed = true;
    } catch (const json::exception&) {
      std::string fixed = expand_angle_enums(block);
      fixed = fix_single_quotes(fixed);
      fixed = quote_bare_keys(fixed);
      fixed = strip_trailing_commas(fixed);
      try {
        doc = json::parse(fixed);
        parsed = true;
        repaired = true;
      } catch (const json::exception&) {
        parsed = false;
      }
    }
    if (parsed && doc.is_object()) {
      result.blocks_parsed += 1;
      result.used_repair = result.used_repair || repaired;
      walk_for_choices(doc, result.tokens);
      i = close + 1;  // contents already harvested; skip inner blocks
    } else {
      ++i;  // descend: an inner block may still parse
    }
  }
  return result;
}

// Letters right after a colon, e.g. `choices: "B"` or `Answer: B, E`.
std::vector<std::string> letter_fallback(const std::string& text) {
  std::vector<std::string> out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != ':') continue;
    size_t j = i + 1;
    while (j < text.size()) {
      while (j < text.size() &&
             (std::isspace(static_cast<unsigned char>(text[j])) || text[j] == '"' ||
              text[j] == '\'' || text[j] == '[' || text[j] == ']' || text[j] == '{' ||
              text[j] == ',' || text[j] == '|'))
        ++j;
      if (j >= text.size()) break;
      char c = text[j];
      bool boundary = j + 1 >= text.size() || !is_word_char(text[j + 1]);
      if (c >= 'A' && c <= 'Q' && boundary) {
        out.emplace_back(1, c);
        ++j;
      } else {
        break;  // run of candidate letters ended
      }
    }
  }
  return out;
}

std::vector<std::string> dedupe_filter(const std::vector<std::string>& tokens,
                                       const std::vector<std::string>& valid_ids) {
  std::set<std::string> valid(valid_ids.begin(), valid_ids.end());
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!valid.count(t)) continue;
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

}  // namespace

ExtractionResult extract_letter_choices(const std::string& text,
                                        const std::vector<std::string>& valid_ids) {
  ExtractionResult result;
  BlockScan scan = scan_blocks(text);
  result.blocks_found = scan.blocks_parsed;

  result.ids = dedupe_filter(scan.tokens, valid_ids);
  if (!result.ids.empty()) {
    result.method = scan.used_repair ? ExtractMethod::kJsonFuzzy : ExtractMethod::kJsonExact;
    return result;
  }
  result.ids = dedupe_filter(letter_fallback(text), valid_ids);
  result.method = result.ids.empty() ? ExtractMethod::kEmpty : ExtractMethod::kLetterFallback;
  return result;
}

ExtractionResult extract_numeric_choices(const std::string& text, int max_id) {
  if (max_id < 1 || max_id > 15)
    throw std::invalid_argument("extract_numeric_choices: max_id must be in [1,15]");

  ExtractionResult result;
  BlockScan scan = scan_blocks(text);
  result.blocks_found = scan.blocks_parsed;

  // Candidate span: the harvested choice values when any block had them,
  // otherwise the whole text.
  std::string span;
  if (!scan.tokens.empty()) {
    for (const auto& t : scan.tokens) {
      span += t;
      span.push_back(' ');
    }
  } else {
    span = text;
  }

  std::set<int> found;
  // Pass 1: multi-digit numbers in [10, max_id]; matched spans are blanked
  // out so their digits cannot be re-read individually.
  size_t i = 0;
  while (i < span.size()) {
    if (!std::isdigit(static_cast<unsigned char>(span[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < span.size() && std::isdigit(static_cast<unsigned char>(span[j]))) ++j;
    if (j - i >= 2 && j - i <= 9) {
      long value = std::stol(span.substr(i, j - i));
      if (value >= 10 && value <= max_id) {
        found.insert(static_cast<int>(value));
        for (size_t k = i; k < j; ++k) span[k] = ' ';
      }
    }
    i = j;
  }
  // Pass 2: remaining single digit characters.
  for (char c : span) {
    if (c >= '1' && c <= '9' && (c - '0') <= max_id) found.insert(c - '0');
  }

  for (int v : found) result.ids.push_back(std::to_string(v));
  result.method = result.ids.empty() ? ExtractMethod::kEmpty : ExtractMethod::kNumeric;
  return result;
}

}  // namespace sata
