#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sata/backend.hpp"
#include "sata/distribution.hpp"
#include "sata/prior.hpp"
#include "sata/question.hpp"

namespace sata {

enum class StopReason { kNota, kThreshold, kExhausted, kSinglePass };
const char* to_string(StopReason reason);
StopReason stop_reason_from_string(const std::string& name);

struct PassRecord {
  std::vector<std::string> remaining;  // original ids in the prompt (kNotaId included)
  OptionDistribution distribution;     // debiased when debiasing is on
  std::string chosen;                  // original id or kNotaId
  double chosen_prob = 0.0;
};

struct DecodeResult {
  std::string question_id;
  IdSet predicted;                     // original option ids, never NOTA
  long passes = 0;
  std::vector<PassRecord> trace;       // trace.size() == passes
  std::string decoder;
  StopReason stopped_by = StopReason::kSinglePass;
  bool failed = false;                 // backend failure; predicted may be partial
  std::string error;
};

// The iterative decoder: repeatedly pick the highest (debiased) probability
// option, stop on NOTA or once an accepted option clears tau. kAcceptAboveTau
// is the algorithmic rule (accept, then break on p > tau); kHaltBelowTau is
// the alternative where decoding halts, without accepting, as soon as the
// best option's probability drops below tau.
enum class FunnelStopRule { kAcceptAboveTau, kHaltBelowTau };

struct FunnelConfig {
  double tau = 0.9;
  std::string nota_text = "None of the above";
  int max_passes = 0;  // 0 -> option count + 2
  bool debias = true;
  FunnelStopRule stop_rule = FunnelStopRule::kAcceptAboveTau;

  void check() const;
};

struct ThresholdCalibration {
  double theta = 0.0;
  std::vector<double> grid;
  std::vector<double> grid_ji;  // holdout mean JI per grid value
  double achieved_ji = 0.0;
  uint64_t seed = 0;
  size_t usable_questions = 0;
  long forward_passes = 0;
};

struct DecodeContext {
  const IdAlphabet* alphabet = nullptr;
  std::string sata_template;    // empty -> default
  std::string yes_no_template;  // empty -> default
};

// One forward pass; selects every id whose probability reaches theta.
DecodeResult decode_first_token(ScoringBackend& backend, const SataQuestion& question,
                                double theta, const PriorTable* priors,
                                const DecodeContext& ctx);

// One binary pass per option; an option is selected iff P(yes) > P(no).
// A failed per-option call leaves that option unselected and is recorded.
DecodeResult decode_yes_no(ScoringBackend& backend, const SataQuestion& question,
                           const DecodeContext& ctx);

// Choice Funnel. With debiasing on, `priors` must cover the question's
// option count (plain family) and, for the with-NOTA passes, total lengths
// down to 2.
DecodeResult decode_choice_funnel(ScoringBackend& backend, const SataQuestion& question,
                                  const FunnelConfig& config, const PriorTable* priors,
                                  const DecodeContext& ctx);

// Grid search for the theta maximizing holdout mean JI; one forward pass per
// question, smallest theta on ties. Questions whose backend call fails are
// skipped; fewer than 10 usable questions aborts.
ThresholdCalibration calibrate_threshold(ScoringBackend& backend,
                                         const std::vector<SataQuestion>& holdout,
                                         double grid_step, const PriorTable* priors,
                                         const DecodeContext& ctx, size_t parallelism = 1);

}  // namespace sata
