#include "sata/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sata {

namespace {

size_t intersection_size(const IdSet& a, const IdSet& b) {
  size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

double population_std(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("std of empty sample");
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

double jaccard(const IdSet& pred, const IdSet& gold) {
  if (gold.empty()) throw std::invalid_argument("jaccard: gold set empty");
  size_t inter = intersection_size(pred, gold);
  size_t uni = pred.size() + gold.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

int exact_match(const IdSet& pred, const IdSet& gold) { return pred == gold ? 1 : 0; }

int fpr_indicator(const IdSet& pred, const IdSet& gold) {
  for (const auto& p : pred)
    if (!gold.count(p)) return 1;
  return 0;
}

double set_precision(const IdSet& pred, const IdSet& gold) {
  if (gold.empty()) throw std::invalid_argument("precision: gold set empty");
  if (pred.empty()) return 0.0;
  return static_cast<double>(intersection_size(pred, gold)) / static_cast<double>(pred.size());
}

double set_recall(const IdSet& pred, const IdSet& gold) {
  if (gold.empty()) throw std::invalid_argument("recall: gold set empty");
  return static_cast<double>(intersection_size(pred, gold)) / static_cast<double>(gold.size());
}

double rstd(const std::vector<double>& recalls) { return population_std(recalls); }

std::optional<double> rsd(const std::vector<double>& accuracies) {
  if (accuracies.empty()) throw std::invalid_argument("rsd of empty sample");
  double mean = 0;
  for (double a : accuracies) mean += a;
  mean /= static_cast<double>(accuracies.size());
  if (mean <= 0.0) return std::nullopt;
  return population_std(accuracies) / mean;
}

SpdResult spd(const std::vector<double>& gold_rates, const std::vector<double>& pred_rates,
              double epsilon, const std::vector<std::string>* labels) {
  if (gold_rates.size() != pred_rates.size())
    throw std::invalid_argument("spd: rate vectors differ in length");
  if (labels && labels->size() != gold_rates.size())
    throw std::invalid_argument("spd: label list length mismatch");
  if (epsilon <= 0) throw std::invalid_argument("spd: epsilon must be positive");

  SpdResult result;
  for (size_t i = 0; i < gold_rates.size(); ++i) {
    double p = gold_rates[i];
    double q = pred_rates[i];
    if (p < 0 || p > 1 || q < 0 || q > 1) throw std::invalid_argument("spd: rate outside [0,1]");
    bool clamped = false;
    if (p < epsilon) {
      p = epsilon;
      clamped = true;
    }
    if (q < epsilon) {
      q = epsilon;
      clamped = true;
    }
    if (clamped)
      result.clamped_labels.push_back(labels ? (*labels)[i] : std::to_string(i));
    result.value += (1.0 - q / p) * std::log(p / q);
  }
  return result;
}

std::optional<double> LabelCounts::recall() const {
  if (gold_count == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(gold_count);
}

std::optional<double> LabelCounts::accuracy() const {
  if (eligible == 0) return std::nullopt;
  return static_cast<double>(tp + tn) / static_cast<double>(eligible);
}

double LabelCounts::gold_rate() const {
  return eligible ? static_cast<double>(gold_count) / static_cast<double>(eligible) : 0.0;
}

double LabelCounts::pred_rate() const {
  return eligible ? static_cast<double>(pred_count) / static_cast<double>(eligible) : 0.0;
}

void LabelStats::add(const SataQuestion& question, const IdSet& pred) {
  for (const auto& opt : question.options) {
    LabelCounts& c = counts_[opt.id];
    c.eligible += 1;
    bool in_gold = question.gold.count(opt.id) > 0;
    bool in_pred = pred.count(opt.id) > 0;
    if (in_gold) c.gold_count += 1;
    if (in_pred) c.pred_count += 1;
    if (in_gold && in_pred) c.tp += 1;
    if (!in_gold && in_pred) c.fp += 1;
    if (in_gold && !in_pred) c.fn += 1;
    if (!in_gold && !in_pred) c.tn += 1;
  }
}

CountMetrics count_metrics(const std::vector<QuestionOutcome>& outcomes) {
  CountMetrics m;
  if (outcomes.empty()) return m;
  for (const auto& o : outcomes) {
    double diff = static_cast<double>(o.pred.size()) - static_cast<double>(o.gold.size());
    m.ctdif += diff;
    m.ctdifabs += std::abs(diff);
    m.ctacc += o.pred.size() == o.gold.size() ? 1.0 : 0.0;
  }
  double n = static_cast<double>(outcomes.size());
  m.ctdif /= n;
  m.ctdifabs /= n;
  m.ctacc /= n;
  return m;
}

long infcost(const std::vector<QuestionOutcome>& outcomes) {
  long total = 0;
  for (const auto& o : outcomes) total += o.passes;
  return total;
}

MetricsReport aggregate_metrics(const std::vector<const SataQuestion*>& questions,
                                const std::vector<QuestionOutcome>& outcomes,
                                double spd_epsilon) {
  if (questions.size() != outcomes.size())
    throw std::invalid_argument("aggregate_metrics: question/outcome count mismatch");

  MetricsReport rep;
  rep.n_questions = outcomes.size();
  if (outcomes.empty()) return rep;

  LabelStats labels;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const SataQuestion& q = *questions[i];
    const QuestionOutcome& o = outcomes[i];
    rep.ji += jaccard(o.pred, o.gold);
    rep.em += exact_match(o.pred, o.gold);
    rep.fpr += fpr_indicator(o.pred, o.gold);
    rep.precision += set_precision(o.pred, o.gold);
    rep.recall += set_recall(o.pred, o.gold);
    double diff = static_cast<double>(o.pred.size()) - static_cast<double>(o.gold.size());
    rep.ctdif += diff;
    rep.ctdifabs += std::abs(diff);
    rep.ctacc += o.pred.size() == o.gold.size() ? 1.0 : 0.0;
    rep.infcost += o.passes;
    labels.add(q, o.pred);
  }
  double n = static_cast<double>(outcomes.size());
  rep.ji /= n;
  rep.em /= n;
  rep.fpr /= n;
  rep.precision /= n;
  rep.recall /= n;
  rep.ctdif /= n;
  rep.ctdifabs /= n;
  rep.ctacc /= n;
  rep.per_label = labels.per_label();

  std::vector<double> recalls, accs, gold_rates, pred_rates;
  std::vector<std::string> label_names;
  for (const auto& [label, counts] : rep.per_label) {
    if (counts.eligible == 0) continue;
    if (auto r = counts.recall()) recalls.push_back(*r);
    if (auto a = counts.accuracy()) accs.push_back(*a);
    gold_rates.push_back(counts.gold_rate());
    pred_rates.push_back(counts.pred_rate());
    label_names.push_back(label);
  }
  rep.rstd = recalls.empty() ? 0.0 : rstd(recalls);
  rep.rsd = accs.empty() ? std::nullopt : rsd(accs);
  SpdResult s = spd(gold_rates, pred_rates, spd_epsilon, &label_names);
  rep.spd = s.value;
  rep.spd_clamped_labels = s.clamped_labels;
  return rep;
}

std::string metrics_to_json(const MetricsReport& rep) {
  nlohmann::json j;
  j["n_questions"] = rep.n_questions;
  j["JI"] = rep.ji;
  j["EM"] = rep.em;
  j["FPR"] = rep.fpr;
  j["Precision"] = rep.precision;
  j["Recall"] = rep.recall;
  j["RStd"] = rep.rstd;
  if (rep.rsd)
    j["RSD"] = *rep.rsd;
  else
    j["RSD"] = nullptr;
  j["SPD"] = rep.spd;
  j["CtDif"] = rep.ctdif;
  j["CtDifAbs"] = rep.ctdifabs;
  j["CtAcc"] = rep.ctacc;
  j["InfCost"] = rep.infcost;
  j["spd_clamped_labels"] = rep.spd_clamped_labels;
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [label, c] : rep.per_label) {
    labels[label] = {{"eligible", c.eligible}, {"gold_count", c.gold_count},
                     {"pred_count", c.pred_count}, {"tp", c.tp}, {"fp", c.fp},
                     {"fn", c.fn}, {"tn", c.tn}};
  }
  j["per_label"] = labels;
  return j.dump(2);
}

std::string metrics_to_markdown(const MetricsReport& rep, const std::string& row_label) {
  auto fmt = [](double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
  };
  std::ostringstream out;
  out << "| Run | JI | FPR | EM | Precision | Recall | SPD | RStd | RSD | CtDif | CtDifAbs | "
         "CtAcc | InfCost |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  out << "| " << row_label << " | " << fmt(rep.ji * 100) << " | " << fmt(rep.fpr * 100) << " | "
      << fmt(rep.em * 100) << " | " << fmt(rep.precision * 100) << " | "
      << fmt(rep.recall * 100) << " | " << fmt(rep.spd) << " | " << fmt(rep.rstd * 100) << " | "
      << (rep.rsd ? fmt(*rep.rsd) : std::string("n/a")) << " | " << fmt(rep.ctdif) << " | "
      << fmt(rep.ctdifabs) << " | " << fmt(rep.ctacc * 100) << " | " << rep.infcost << " |\n";
  return out.str();
}

}  // namespace sata
