#pragma once

#include <map>
#include <string>
#include <vector>

#include "sata/backend.hpp"
#include "sata/question.hpp"

namespace sata {

// Order-preserving bijection between the surviving original ids and a
// contiguous alphabet prefix, so that length-keyed priors stay applicable
// after options are removed ("ACDE" relabels to "ABCD"). NOTA, when present,
// always maps to the final prompt position.
struct IdRemap {
  std::map<std::string, std::string> original_to_prompt;
  std::map<std::string, std::string> prompt_to_original;  // NOTA slot -> kNotaId

  const std::string& to_prompt(const std::string& original_id) const;
  const std::string& to_original(const std::string& prompt_id) const;
  bool prompt_id_is_nota(const std::string& prompt_id) const;
};

struct RebalanceResult {
  std::vector<PromptOption> options;  // prompt order; NOTA last when included
  IdRemap remap;
};

// `remaining` must list survivors in their original relative order.
// Throws when |remaining| (+1 for NOTA) exceeds the alphabet.
RebalanceResult rebalance_ids(const std::vector<Option>& remaining, const IdAlphabet& alphabet,
                              bool include_nota, const std::string& nota_text);

}  // namespace sata
