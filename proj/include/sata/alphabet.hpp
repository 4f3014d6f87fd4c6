#pragma once

#include <string>
#include <vector>

namespace sata {

// Internal marker for the "None of the above" pseudo-option. Never a valid
// question option id; prompt rendering assigns NOTA the next free symbol.
inline const std::string kNotaId = "<NOTA>";

// Ordered symbol space for option ids. Questions must use a contiguous
// prefix of it. The reserved NOTA symbol sits outside the option range and
// exists so the alphabet can always label |options| + 1 prompt positions.
class IdAlphabet {
 public:
  // Uppercase A..O for options, P reserved for NOTA overflow.
  static IdAlphabet uppercase();
  // "1".."15" with "16" reserved.
  static IdAlphabet numeric();

  IdAlphabet(std::vector<std::string> symbols, std::string reserved);

  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& reserved() const { return reserved_; }
  size_t size() const { return symbols_.size(); }

  // Symbol for prompt position `pos` (0-based) in a prompt with
  // `total` positions; the final position of a with-NOTA prompt may use the
  // reserved symbol when the option symbols are exhausted.
  const std::string& symbol_at(size_t pos) const;

  int index_of(const std::string& symbol) const;  // -1 when absent
  bool contains(const std::string& symbol) const { return index_of(symbol) >= 0; }

  // Largest option count a question may use (one slot is kept for NOTA).
  size_t max_options() const { return symbols_.size(); }

 private:
  std::vector<std::string> symbols_;
  std::string reserved_;
};

}  // namespace sata
