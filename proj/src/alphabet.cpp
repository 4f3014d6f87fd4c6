#include "sata/alphabet.hpp"

#include <set>
#include <stdexcept>

namespace sata {

IdAlphabet IdAlphabet::uppercase() {
  std::vector<std::string> syms;
  for (char c = 'A'; c <= 'O'; ++c) syms.emplace_back(1, c);
  return IdAlphabet(std::move(syms), "P");
}

IdAlphabet IdAlphabet::numeric() {
  std::vector<std::string> syms;
  for (int i = 1; i <= 15; ++i) syms.push_back(std::to_string(i));
  return IdAlphabet(std::move(syms), "16");
}

IdAlphabet::IdAlphabet(std::vector<std::string> symbols, std::string reserved)
    : symbols_(std::move(symbols)), reserved_(std::move(reserved)) {
  if (symbols_.empty()) throw std::invalid_argument("alphabet: no symbols");
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.empty()) throw std::invalid_argument("alphabet: empty symbol");
    if (!seen.insert(s).second) throw std::invalid_argument("alphabet: duplicate symbol " + s);
  }
  if (reserved_.empty() || seen.count(reserved_))
    throw std::invalid_argument("alphabet: reserved symbol must be distinct and non-empty");
}

const std::string& IdAlphabet::symbol_at(size_t pos) const {
  if (pos < symbols_.size()) return symbols_[pos];
  if (pos == symbols_.size()) return reserved_;
  throw std::out_of_range("alphabet: position beyond reserved slot");
}

int IdAlphabet::index_of(const std::string& symbol) const {
  for (size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return static_cast<int>(i);
  return -1;
}

}  // namespace sata
