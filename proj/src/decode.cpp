#include "sata/decode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sata/metrics.hpp"
#include "sata/parallel.hpp"
#include "sata/prompt.hpp"
#include "sata/rebalance.hpp"

namespace sata {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kNota: return "nota";
    case StopReason::kThreshold: return "threshold";
    case StopReason::kExhausted: return "exhausted";
    case StopReason::kSinglePass: return "single_pass";
  }
  return "unknown";
}

StopReason stop_reason_from_string(const std::string& name) {
  if (name == "nota") return StopReason::kNota;
  if (name == "threshold") return StopReason::kThreshold;
  if (name == "exhausted") return StopReason::kExhausted;
  if (name == "single_pass") return StopReason::kSinglePass;
  throw std::invalid_argument("unknown stop reason: " + name);
}

void FunnelConfig::check() const {
  if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("funnel: tau must be in (0,1]");
  if (max_passes != 0 && max_passes < 2)
    throw std::invalid_argument("funnel: max_passes must be >= 2");
}

namespace {

std::vector<std::string> original_ids(const std::vector<PromptOption>& options) {
  std::vector<std::string> ids;
  ids.reserve(options.size());
  for (const auto& o : options) ids.push_back(o.original_id);
  return ids;
}

}  // namespace

DecodeResult decode_first_token(ScoringBackend& backend, const SataQuestion& question,
                                double theta, const PriorTable* priors,
                                const DecodeContext& ctx) {
  DecodeResult result;
  result.question_id = question.id;
  result.decoder = priors ? "first_token_debias" : "first_token";
  result.stopped_by = StopReason::kSinglePass;

  RebalanceResult prompt = rebalance_ids(question.options, *ctx.alphabet, false, "");
  ScoreQuery query;
  query.question = &question;
  query.options = prompt.options;
  query.prompt_text = make_sata_prompt(
      question, prompt.options, ctx.sata_template.empty() ? kDefaultSataTemplate : ctx.sata_template);

  try {
    OptionDistribution dist = backend.score(query);
    if (priors)
      dist = debias_scores(dist, priors->prior_for(static_cast<int>(question.option_count()), false));
    PassRecord pass;
    pass.remaining = original_ids(prompt.options);
    pass.distribution = dist;
    for (size_t i = 0; i < dist.ids.size(); ++i) {
      if (dist.probs[i] >= theta)
        result.predicted.insert(prompt.remap.to_original(dist.ids[i]));
    }
    size_t best = dist.argmax();
    pass.chosen = prompt.remap.to_original(dist.ids[best]);
    pass.chosen_prob = dist.probs[best];
    result.trace.push_back(std::move(pass));
    result.passes = 1;
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
    result.passes = std::max<long>(result.passes, 1);
  }
  return result;
}

DecodeResult decode_yes_no(ScoringBackend& backend, const SataQuestion& question,
                           const DecodeContext& ctx) {
  DecodeResult result;
  result.question_id = question.id;
  result.decoder = "yes_no";
  result.stopped_by = StopReason::kSinglePass;

  const std::string& tmpl =
      ctx.yes_no_template.empty() ? kDefaultYesNoTemplate : ctx.yes_no_template;
  for (const auto& option : question.options) {
    BinaryQuery query;
    query.question = &question;
    query.option_id = option.id;
    query.option_text = option.text;
    query.prompt_text = make_yes_no_prompt(question, option, tmpl);
    PassRecord pass;
    pass.remaining = {option.id};
    try {
      BinaryDistribution bin = backend.score_binary(query);
      pass.distribution.ids = {"Yes", "No"};
      pass.distribution.probs = {bin.p_yes, bin.p_no};
      if (!bin.covered) pass.distribution.coverage = 0.0;
      if (bin.p_yes > bin.p_no) {
        result.predicted.insert(option.id);
        pass.chosen = option.id;
        pass.chosen_prob = bin.p_yes;
      }
    } catch (const std::exception& e) {
      // Failed option counts as unselected; the question still completes.
      result.failed = true;
      result.error = e.what();
    }
    result.passes += 1;
    result.trace.push_back(std::move(pass));
  }
  return result;
}

DecodeResult decode_choice_funnel(ScoringBackend& backend, const SataQuestion& question,
                                  const FunnelConfig& config, const PriorTable* priors,
                                  const DecodeContext& ctx) {
  config.check();
  if (config.debias && priors == nullptr)
    throw std::invalid_argument("choice funnel: debiasing requested without priors");

  DecodeResult result;
  result.question_id = question.id;
  result.decoder = "choice_funnel";

  const std::string& tmpl = ctx.sata_template.empty() ? kDefaultSataTemplate : ctx.sata_template;
  long cap = config.max_passes > 0 ? config.max_passes
                                   : static_cast<long>(question.option_count()) + 2;

  std::vector<Option> remaining = question.options;
  bool nota_inserted = false;
  std::vector<std::string> selected_order;
  result.stopped_by = StopReason::kExhausted;

  try {
    while (!remaining.empty() || nota_inserted) {
      if (result.passes >= cap) {
        result.stopped_by = StopReason::kExhausted;
        break;
      }
      RebalanceResult prompt =
          rebalance_ids(remaining, *ctx.alphabet, nota_inserted, config.nota_text);
      ScoreQuery query;
      query.question = &question;
      query.options = prompt.options;
      query.already_selected = selected_order;
      query.prompt_text = make_sata_prompt(question, prompt.options, tmpl);

      OptionDistribution dist = backend.score(query);
      if (config.debias) {
        std::vector<double> prior =
            priors->prior_for(static_cast<int>(remaining.size()), nota_inserted);
        dist = debias_scores(dist, prior);
      }
      result.passes += 1;

      size_t best = dist.argmax();
      std::string chosen = prompt.remap.to_original(dist.ids[best]);
      double p_best = dist.probs[best];

      PassRecord pass;
      pass.remaining = original_ids(prompt.options);
      pass.distribution = dist;
      pass.chosen = chosen;
      pass.chosen_prob = p_best;
      result.trace.push_back(std::move(pass));

      if (chosen == kNotaId) {
        result.stopped_by = StopReason::kNota;
        break;
      }
      if (config.stop_rule == FunnelStopRule::kHaltBelowTau && p_best < config.tau) {
        // Prose variant: the next option is no longer confident enough, so
        // decoding halts without accepting it.
        result.stopped_by = StopReason::kThreshold;
        break;
      }
      result.predicted.insert(chosen);
      selected_order.push_back(chosen);
      if (config.stop_rule == FunnelStopRule::kAcceptAboveTau && p_best > config.tau) {
        result.stopped_by = StopReason::kThreshold;
        break;
      }
      if (selected_order.size() == 1) nota_inserted = true;
      remaining.erase(std::find_if(remaining.begin(), remaining.end(),
                                   [&](const Option& o) { return o.id == chosen; }));
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

ThresholdCalibration calibrate_threshold(ScoringBackend& backend,
                                         const std::vector<SataQuestion>& holdout,
                                         double grid_step, const PriorTable* priors,
                                         const DecodeContext& ctx, size_t parallelism) {
  if (holdout.empty()) throw std::invalid_argument("calibrate: empty holdout");
  if (grid_step <= 0.0 || grid_step > 1.0)
    throw std::invalid_argument("calibrate: grid step must be in (0,1]");

  struct Scored {
    OptionDistribution dist;
    IdSet gold_prompt_ids;
    bool ok = false;
  };
  std::vector<Scored> scored(holdout.size());
  const std::string& tmpl = ctx.sata_template.empty() ? kDefaultSataTemplate : ctx.sata_template;

  parallel_for(holdout.size(), std::max<size_t>(parallelism, 1), [&](size_t i) {
    const SataQuestion& q = holdout[i];
    RebalanceResult prompt = rebalance_ids(q.options, *ctx.alphabet, false, "");
    ScoreQuery query;
    query.question = &q;
    query.options = prompt.options;
    query.prompt_text = make_sata_prompt(q, prompt.options, tmpl);
    try {
      OptionDistribution dist = backend.score(query);
      if (priors)
        dist = debias_scores(dist, priors->prior_for(static_cast<int>(q.option_count()), false));
      scored[i].dist = std::move(dist);
      // Question ids are already a contiguous prefix, so prompt ids equal
      // original ids here; keep gold in prompt space for the sweep.
      scored[i].gold_prompt_ids = q.gold;
      scored[i].ok = true;
    } catch (const std::exception&) {
      scored[i].ok = false;
    }
  });

  ThresholdCalibration cal;
  size_t steps = static_cast<size_t>(std::floor(1.0 / grid_step + 1e-9));
  for (size_t k = 0; k <= steps; ++k)
    cal.grid.push_back(std::min(static_cast<double>(k) * grid_step, 1.0));
  if (cal.grid.back() < 1.0) cal.grid.push_back(1.0);

  size_t usable = 0;
  for (const auto& s : scored)
    if (s.ok) ++usable;
  if (usable < 10)
    throw std::runtime_error("calibrate: only " + std::to_string(usable) +
                             " usable holdout questions (need 10)");
  cal.usable_questions = usable;
  cal.forward_passes = static_cast<long>(holdout.size());

  cal.grid_ji.resize(cal.grid.size());
  for (size_t gi = 0; gi < cal.grid.size(); ++gi) {
    double theta = cal.grid[gi];
    double total = 0.0;
    for (const auto& s : scored) {
      if (!s.ok) continue;
      IdSet pred;
      for (size_t k = 0; k < s.dist.ids.size(); ++k)
        if (s.dist.probs[k] >= theta) pred.insert(s.dist.ids[k]);
      total += jaccard(pred, s.gold_prompt_ids);
    }
    cal.grid_ji[gi] = total / static_cast<double>(usable);
  }

  size_t best = 0;
  for (size_t gi = 1; gi < cal.grid.size(); ++gi)
    if (cal.grid_ji[gi] > cal.grid_ji[best]) best = gi;  // ties keep the smallest theta
  cal.theta = cal.grid[best];
  cal.achieved_ji = cal.grid_ji[best];
  return cal;
}

}  // namespace sata
