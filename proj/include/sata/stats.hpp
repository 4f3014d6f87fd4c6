#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sata {

// p-values use the standard-normal approximation of the t statistic; the
// exact degrees of freedom are carried alongside so callers can report them.
struct TestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided, normal approximation
  double df = 0.0;
  size_t n_a = 0, n_b = 0;
};

// True iff the model predicts at least one incorrect option more often than
// it produces exact matches.
bool speculation_check(double fpr, double em);

// One-sample t against mean 0 over per-question count differences.
// Requires n >= 2 and nonzero sample variance.
TestResult count_bias_ttest(const std::vector<double>& ctdifs);

// Welch's unequal-variance two-sample t.
TestResult welch_t(const std::vector<double>& sample_a, const std::vector<double>& sample_b);

// Null distribution of SPD under unbiased prediction: each replicate draws
// per-label predictions as independent Bernoulli(p_i) over n questions and
// scores the resulting empirical rates against p.
std::vector<double> spd_random_baseline(const std::vector<double>& gold_rates,
                                        size_t n_questions, size_t replicates, uint64_t seed,
                                        double epsilon = 1e-9);

// Monte-Carlo SPD-vs-q curve: four labels, ground truth sampled at rate p for
// every label, prediction sampled at rate q for the first label and p for the
// rest; M samples per replicate. Mean curve attains its minimum at q = p.
struct SpdCurve {
  std::vector<double> q_grid;
  std::vector<double> mean_spd;
  std::vector<double> std_spd;
  size_t argmin() const;
};
SpdCurve spd_curve_simulation(double p, const std::vector<double>& q_grid, size_t n_options,
                              size_t samples, size_t replicates, uint64_t seed,
                              double epsilon = 1e-9);

double normal_cdf(double x);
double two_sided_p_from_normal(double t);

}  // namespace sata
