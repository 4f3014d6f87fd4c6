#include "sata/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "sata/metrics.hpp"
#include "sata/rng.hpp"

namespace sata {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance (n - 1)
};

Moments moments(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("need at least two observations");
  Moments m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(xs.size() - 1);
  return m;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double two_sided_p_from_normal(double t) { return std::erfc(std::abs(t) / std::sqrt(2.0)); }

bool speculation_check(double fpr, double em) { return fpr > em; }

TestResult count_bias_ttest(const std::vector<double>& ctdifs) {
  Moments m = moments(ctdifs);
  if (m.var <= 0.0) throw std::invalid_argument("count_bias_ttest: zero sample variance");
  double n = static_cast<double>(ctdifs.size());
  TestResult r;
  r.t = m.mean / std::sqrt(m.var / n);
  r.p = two_sided_p_from_normal(r.t);
  r.df = n - 1;
  r.n_a = ctdifs.size();
  return r;
}

TestResult welch_t(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
  Moments a = moments(sample_a);
  Moments b = moments(sample_b);
  double na = static_cast<double>(sample_a.size());
  double nb = static_cast<double>(sample_b.size());
  double sa = a.var / na;
  double sb = b.var / nb;
  if (sa + sb <= 0.0) throw std::invalid_argument("welch_t: both samples have zero variance");
  TestResult r;
  r.t = (a.mean - b.mean) / std::sqrt(sa + sb);
  // Welch-Satterthwaite degrees of freedom.
  double denom = sa * sa / (na - 1.0) + sb * sb / (nb - 1.0);
  r.df = denom > 0 ? (sa + sb) * (sa + sb) / denom : na + nb - 2.0;
  r.p = two_sided_p_from_normal(r.t);
  r.n_a = sample_a.size();
  r.n_b = sample_b.size();
  return r;
}

std::vector<double> spd_random_baseline(const std::vector<double>& gold_rates,
                                        size_t n_questions, size_t replicates, uint64_t seed,
                                        double epsilon) {
  if (gold_rates.empty()) throw std::invalid_argument("spd_random_baseline: no labels");
  if (n_questions == 0) throw std::invalid_argument("spd_random_baseline: n_questions == 0");
  std::vector<double> out;
  out.reserve(replicates);
  Rng rng = derive_rng(seed, "spd_random_baseline");
  std::vector<double> pred_rates(gold_rates.size());
  for (size_t r = 0; r < replicates; ++r) {
    for (size_t i = 0; i < gold_rates.size(); ++i) {
      size_t hits = 0;
      for (size_t n = 0; n < n_questions; ++n)
        if (rng.next_bernoulli(gold_rates[i])) ++hits;
      pred_rates[i] = static_cast<double>(hits) / static_cast<double>(n_questions);
    }
    out.push_back(spd(gold_rates, pred_rates, epsilon).value);
  }
  return out;
}

size_t SpdCurve::argmin() const {
  if (mean_spd.empty()) throw std::logic_error("argmin of empty curve");
  size_t best = 0;
  for (size_t i = 1; i < mean_spd.size(); ++i)
    if (mean_spd[i] < mean_spd[best]) best = i;
  return best;
}

SpdCurve spd_curve_simulation(double p, const std::vector<double>& q_grid, size_t n_options,
                              size_t samples, size_t replicates, uint64_t seed, double epsilon) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("spd_curve_simulation: p in (0,1) required");
  if (n_options == 0 || samples == 0 || replicates == 0 || q_grid.empty())
    throw std::invalid_argument("spd_curve_simulation: empty inputs");

  SpdCurve curve;
  curve.q_grid = q_grid;
  curve.mean_spd.resize(q_grid.size());
  curve.std_spd.resize(q_grid.size());

  std::vector<double> gold_rates(n_options), pred_rates(n_options);
  std::vector<size_t> gold_hits(n_options), pred_hits(n_options);
  for (size_t qi = 0; qi < q_grid.size(); ++qi) {
    double q = q_grid[qi];
    Rng rng = derive_rng(seed, "spd_curve/" + std::to_string(qi));
    double sum = 0, sumsq = 0;
    for (size_t rep = 0; rep < replicates; ++rep) {
      gold_hits.assign(n_options, 0);
      pred_hits.assign(n_options, 0);
      for (size_t s = 0; s < samples; ++s) {
        for (size_t i = 0; i < n_options; ++i) {
          if (rng.next_bernoulli(p)) ++gold_hits[i];
          double pred_rate = i == 0 ? q : p;
          if (rng.next_bernoulli(pred_rate)) ++pred_hits[i];
        }
      }
      for (size_t i = 0; i < n_options; ++i) {
        gold_rates[i] = static_cast<double>(gold_hits[i]) / static_cast<double>(samples);
        pred_rates[i] = static_cast<double>(pred_hits[i]) / static_cast<double>(samples);
      }
      double v = spd(gold_rates, pred_rates, epsilon).value;
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / static_cast<double>(replicates);
    curve.mean_spd[qi] = mean;
    double var = sumsq / static_cast<double>(replicates) - mean * mean;
    curve.std_spd[qi] = var > 0 ? std::sqrt(var) : 0.0;
  }
  return curve;
}

}  // namespace sata
