#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sata/alphabet.hpp"

namespace sata {

using IdSet = std::set<std::string>;

struct Option {
  std::string id;
  std::string text;
};

// One select-all-that-apply item: 3..15 options, 2..10 correct answers.
struct SataQuestion {
  std::string id;
  std::string context;  // may be empty
  std::string question;
  std::vector<Option> options;
  IdSet gold;
  std::string domain;
  std::map<std::string, std::string> metadata;

  size_t option_count() const { return options.size(); }
  const Option* find_option(const std::string& option_id) const;
  bool is_gold(const std::string& option_id) const { return gold.count(option_id) > 0; }

  // Throws std::invalid_argument naming the violated constraint:
  // ids distinct and a contiguous alphabet prefix, 3..15 options,
  // 2..10 gold ids all present among options, option texts pairwise distinct.
  void validate(const IdAlphabet& alphabet) const;
};

inline constexpr size_t kMinOptions = 3;
inline constexpr size_t kMaxOptions = 15;
inline constexpr size_t kMinGold = 2;
inline constexpr size_t kMaxGold = 10;

}  // namespace sata
