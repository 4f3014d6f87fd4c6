#include "sata/rebalance.hpp"

#include <stdexcept>

namespace sata {

const std::string& IdRemap::to_prompt(const std::string& original_id) const {
  auto it = original_to_prompt.find(original_id);
  if (it == original_to_prompt.end())
    throw std::out_of_range("remap: unknown original id '" + original_id + "'");
  return it->second;
}

const std::string& IdRemap::to_original(const std::string& prompt_id) const {
  auto it = prompt_to_original.find(prompt_id);
  if (it == prompt_to_original.end())
    throw std::out_of_range("remap: unknown prompt id '" + prompt_id + "'");
  return it->second;
}

bool IdRemap::prompt_id_is_nota(const std::string& prompt_id) const {
  return to_original(prompt_id) == kNotaId;
}

RebalanceResult rebalance_ids(const std::vector<Option>& remaining, const IdAlphabet& alphabet,
                              bool include_nota, const std::string& nota_text) {
  // A NOTA-only prompt is legal: the funnel's final pass may have consumed
  // every real option.
  if (remaining.empty() && !include_nota)
    throw std::invalid_argument("rebalance_ids: no remaining options");
  size_t total = remaining.size() + (include_nota ? 1 : 0);
  if (total > alphabet.size() + 1)
    throw std::invalid_argument("rebalance_ids: " + std::to_string(total) +
                                " slots exceed the alphabet");

  RebalanceResult result;
  result.options.reserve(total);
  for (size_t i = 0; i < remaining.size(); ++i) {
    const std::string& prompt_id = alphabet.symbol_at(i);
    result.options.push_back(PromptOption{prompt_id, remaining[i].text, remaining[i].id, false});
    result.remap.original_to_prompt[remaining[i].id] = prompt_id;
    result.remap.prompt_to_original[prompt_id] = remaining[i].id;
  }
  if (include_nota) {
    const std::string& prompt_id = alphabet.symbol_at(remaining.size());
    result.options.push_back(PromptOption{prompt_id, nota_text, kNotaId, true});
    result.remap.original_to_prompt[kNotaId] = prompt_id;
    result.remap.prompt_to_original[prompt_id] = kNotaId;
  }
  return result;
}

}  // namespace sata
