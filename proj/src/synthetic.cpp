#include "sata/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sata/rng.hpp"

namespace sata {

void SyntheticModelConfig::check() const {
  if (gold_score <= 0 || distractor_score <= 0 || nota_base <= 0 || nota_high <= 0)
    throw std::invalid_argument("synthetic scores must be positive");
  for (double b : id_bias)
    if (b <= 0) throw std::invalid_argument("id_bias entries must be positive");
  if (noise_sigma < 0) throw std::invalid_argument("noise_sigma must be nonnegative");
}

SyntheticBackend::SyntheticBackend(SyntheticModelConfig config) : config_(std::move(config)) {
  config_.check();
}

double SyntheticBackend::jitter(const std::string& question_id, const std::string& key) const {
  if (config_.noise_sigma == 0.0) return 1.0;
  // Keyed by (seed, question, option) so an option keeps its jitter across
  // funnel passes while permutations see independent content noise.
  Rng rng = derive_rng(config_.seed, question_id + "\x1f" + key);
  return std::exp(config_.noise_sigma * rng.next_normal());
}

OptionDistribution SyntheticBackend::score(const ScoreQuery& query) {
  if (query.question == nullptr) throw std::invalid_argument("synthetic: query has no question");
  if (query.options.empty()) throw std::invalid_argument("synthetic: empty option list");
  const SataQuestion& q = *query.question;

  IdSet unselected_gold = q.gold;
  for (const auto& sel : query.already_selected) unselected_gold.erase(sel);
  bool gold_remains = false;
  for (const auto& opt : query.options)
    if (!opt.is_nota && unselected_gold.count(opt.original_id)) gold_remains = true;

  OptionDistribution dist;
  dist.ids.reserve(query.options.size());
  dist.probs.reserve(query.options.size());
  for (size_t pos = 0; pos < query.options.size(); ++pos) {
    const auto& opt = query.options[pos];
    double content;
    if (opt.is_nota) {
      content = gold_remains ? config_.nota_base : config_.nota_high;
    } else if (unselected_gold.count(opt.original_id)) {
      content = config_.gold_score;
    } else {
      content = config_.distractor_score;
    }
    double bias = pos < config_.id_bias.size() ? config_.id_bias[pos] : 1.0;
    double score = content * bias * jitter(q.id, opt.is_nota ? kNotaId : opt.original_id);
    dist.ids.push_back(opt.prompt_id);
    dist.probs.push_back(score);
  }
  dist.renormalize();
  dist.coverage = 1.0;
  return dist;
}

BinaryDistribution SyntheticBackend::score_binary(const BinaryQuery& query) {
  if (query.question == nullptr) throw std::invalid_argument("synthetic: query has no question");
  const SataQuestion& q = *query.question;
  bool gold = q.is_gold(query.option_id);
  double yes = (gold ? config_.gold_score : config_.distractor_score) *
               jitter(q.id, query.option_id + "\x1fyn");
  double no = gold ? config_.distractor_score : config_.gold_score;
  BinaryDistribution out;
  out.p_yes = yes / (yes + no);
  out.p_no = no / (yes + no);
  out.covered = true;
  return out;
}

}  // namespace sata
