#pragma once

#include <string>
#include <vector>

#include "sata/distribution.hpp"
#include "sata/question.hpp"

namespace sata {

// One prompt slot. Decoders build these with rebalanced ids; backends that
// work on text read `prompt_id`/`text`, the synthetic model reads
// `original_id` so the same decoder path drives both.
struct PromptOption {
  std::string prompt_id;
  std::string text;
  std::string original_id;  // kNotaId for the abstention slot
  bool is_nota = false;
};

struct ScoreQuery {
  const SataQuestion* question = nullptr;
  std::vector<PromptOption> options;        // prompt order
  std::string prompt_text;                  // rendered prompt (text backends)
  std::vector<std::string> already_selected;  // original ids accepted so far
};

struct BinaryQuery {
  const SataQuestion* question = nullptr;
  std::string option_id;
  std::string option_text;
  std::string prompt_text;
};

// Model access point. Implementations must tolerate concurrent calls and be
// deterministic whenever their configuration says so (synthetic backend).
class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual OptionDistribution score(const ScoreQuery& query) = 0;
  virtual BinaryDistribution score_binary(const BinaryQuery& query) = 0;
  virtual std::string name() const = 0;
};

}  // namespace sata
