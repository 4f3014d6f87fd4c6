#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sata/question.hpp"

namespace sata {

// ---- per-question metrics ------------------------------------------------

// |pred n gold| / |pred u gold|. Gold is never empty, so the both-empty
// convention is unreachable; an empty prediction scores 0.
double jaccard(const IdSet& pred, const IdSet& gold);

// 1 iff the sets are equal.
int exact_match(const IdSet& pred, const IdSet& gold);

// 1 iff the prediction contains any id outside gold (speculation indicator).
int fpr_indicator(const IdSet& pred, const IdSet& gold);

// Empty prediction scores 0 (no credit, no divide-by-zero).
double set_precision(const IdSet& pred, const IdSet& gold);
double set_recall(const IdSet& pred, const IdSet& gold);

// ---- dispersion metrics over label-level rates ----------------------------

// Population (1/k) standard deviation of class-wise recalls.
double rstd(const std::vector<double>& recalls);

// Population std of class-wise accuracies normalized by their mean;
// nullopt when the mean accuracy is zero.
std::optional<double> rsd(const std::vector<double>& accuracies);

// Selection probability divergence: sum_i (1 - q_i/p_i) * ln(p_i/q_i) with
// both rates clamped to >= epsilon. Zero iff q == p; every summand is
// nonnegative. Labels that hit the clamp are reported by index (or by name
// when `labels` is given).
struct SpdResult {
  double value = 0.0;
  std::vector<std::string> clamped_labels;
};
SpdResult spd(const std::vector<double>& gold_rates, const std::vector<double>& pred_rates,
              double epsilon = 1e-9, const std::vector<std::string>* labels = nullptr);

// ---- label-level bookkeeping ----------------------------------------------

struct LabelCounts {
  long eligible = 0;    // questions whose option set contains the label
  long gold_count = 0;  // eligible questions where the label is gold
  long pred_count = 0;  // eligible questions where the label was predicted
  long tp = 0, fp = 0, fn = 0, tn = 0;

  std::optional<double> recall() const;     // tp / gold_count
  std::optional<double> accuracy() const;   // (tp + tn) / eligible
  double gold_rate() const;                 // gold_count / eligible
  double pred_rate() const;                 // pred_count / eligible
};

// Accumulates counts per label, only over questions whose option set
// contains that label.
class LabelStats {
 public:
  void add(const SataQuestion& question, const IdSet& pred);
  const std::map<std::string, LabelCounts>& per_label() const { return counts_; }

 private:
  std::map<std::string, LabelCounts> counts_;
};

// ---- aggregate report -----------------------------------------------------

struct QuestionOutcome {
  std::string question_id;
  IdSet pred;
  IdSet gold;
  long passes = 1;
};

// ctdif = mean(|pred| - |gold|), ctdifabs = mean(||pred| - |gold||),
// ctacc = fraction with matching sizes.
struct CountMetrics {
  double ctdif = 0, ctdifabs = 0, ctacc = 0;
};
CountMetrics count_metrics(const std::vector<QuestionOutcome>& outcomes);

// Total forward passes across results.
long infcost(const std::vector<QuestionOutcome>& outcomes);

struct MetricsReport {
  size_t n_questions = 0;
  double ji = 0, em = 0, fpr = 0, precision = 0, recall = 0;
  double rstd = 0;
  std::optional<double> rsd;
  double spd = 0;
  double ctdif = 0, ctdifabs = 0, ctacc = 0;
  long infcost = 0;
  std::map<std::string, LabelCounts> per_label;
  std::vector<std::string> spd_clamped_labels;
};

// Means over questions plus label-level dispersion metrics. `spd_epsilon`
// is the clamp floor for SPD.
MetricsReport aggregate_metrics(const std::vector<const SataQuestion*>& questions,
                                const std::vector<QuestionOutcome>& outcomes,
                                double spd_epsilon = 1e-9);

// Raw fractions keyed by the usual column names (JI, FPR, EM, ...).
std::string metrics_to_json(const MetricsReport& report);

// Human-readable table: fraction-valued columns scaled x100, SPD / RSD /
// CtDif / CtDifAbs raw, two decimals.
std::string metrics_to_markdown(const MetricsReport& report, const std::string& row_label);

}  // namespace sata
