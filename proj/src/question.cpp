#include "sata/question.hpp"

#include <stdexcept>

namespace sata {

const Option* SataQuestion::find_option(const std::string& option_id) const {
  for (const auto& opt : options)
    if (opt.id == option_id) return &opt;
  return nullptr;
}

void SataQuestion::validate(const IdAlphabet& alphabet) const {
  if (id.empty()) throw std::invalid_argument("question id is empty");
  if (question.empty()) throw std::invalid_argument("question text is empty");
  if (options.size() < kMinOptions || options.size() > kMaxOptions)
    throw std::invalid_argument("option count " + std::to_string(options.size()) +
                                " outside [3,15]");
  if (options.size() > alphabet.max_options())
    throw std::invalid_argument("option count exceeds alphabet");

  std::set<std::string> texts;
  for (size_t i = 0; i < options.size(); ++i) {
    const auto& opt = options[i];
    if (opt.text.empty()) throw std::invalid_argument("option text empty for id " + opt.id);
    if (opt.id != alphabet.symbols()[i])
      throw std::invalid_argument("option ids must be the contiguous alphabet prefix; position " +
                                  std::to_string(i) + " has '" + opt.id + "'");
    if (!texts.insert(opt.text).second)
      throw std::invalid_argument("duplicate option text: " + opt.text);
  }

  if (gold.size() < kMinGold || gold.size() > kMaxGold)
    throw std::invalid_argument("gold count " + std::to_string(gold.size()) + " outside [2,10]");
  for (const auto& g : gold)
    if (!find_option(g)) throw std::invalid_argument("gold id '" + g + "' not among options");
}

}  // namespace sata
