#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sata/backend.hpp"
#include "sata/decode.hpp"
#include "sata/http_backend.hpp"
#include "sata/metrics.hpp"
#include "sata/stats.hpp"
#include "sata/synthetic.hpp"

namespace sata {

// Single JSON config file; CLI flags override individual fields. Secrets
// (API key) come from the environment only.
struct RunConfig {
  std::string dataset;
  std::string model_name = "model";
  std::string decoder = "choice_funnel";  // first_token | first_token_debias |
                                          // yes_no | choice_funnel

  std::string backend_kind = "synthetic";  // synthetic | http
  SyntheticModelConfig synthetic;
  HttpBackendConfig http;

  FunnelConfig funnel;
  std::optional<double> theta;  // fixed threshold; unset -> calibrate
  size_t holdout_n = 100;
  double grid_step = 0.01;

  double prior_subset_fraction = 0.1;
  int prior_permutations = 0;  // 0 -> min(option count, 8)
  bool exclude_estimation_from_eval = false;

  std::string alphabet = "uppercase";  // uppercase | numeric
  std::string sata_template_path;
  std::string yes_no_template_path;
  size_t parallelism = 1;
  std::string output_dir = "out";
  uint64_t seed = 0;
  double spd_epsilon = 1e-9;
  size_t spd_replicates = 1000;
  size_t bootstrap_resamples = 1000;

  static RunConfig from_json(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
  std::string to_json() const;

  void check() const;  // fatal config errors, raised before any backend call
  IdAlphabet make_alphabet() const;
  std::unique_ptr<ScoringBackend> make_backend() const;
  bool needs_theta() const;
  bool needs_priors() const;
  bool needs_nota_priors() const;
};

struct BiasTests {
  bool speculation = false;  // FPR > EM
  std::optional<TestResult> count_ttest;
  std::string count_ttest_note;
  std::optional<TestResult> spd_vs_random;
  double spd_observed = 0;
  double spd_baseline_mean = 0;
  double spd_baseline_std = 0;
};

struct RunSummary {
  MetricsReport metrics;
  BiasTests tests;
  size_t n_total = 0;      // questions in the eval split
  size_t n_evaluated = 0;  // with a successful decode
  size_t n_failed = 0;
  long estimation_passes = 0;
  long calibration_passes = 0;
  std::optional<double> theta_used;
  std::string results_path;
  std::string metrics_path;
  std::string report_path;
};

// load -> holdout split -> priors (if needed) -> calibration (if needed) ->
// decode -> metrics -> bias tests -> artifacts. Per-question results append
// to <output_dir>/results.jsonl, so an interrupted run resumes without
// repeating backend calls; priors and calibration are cached the same way.
RunSummary run_eval(const RunConfig& config);

// Just the calibration leg; writes calibration.json and returns it.
ThresholdCalibration run_calibration(const RunConfig& config);

// Table-style comparison across runs: one row per (model, decoder), best
// value per column bolded. Throws when the runs disagree on the dataset.
std::string render_comparison(const std::vector<std::string>& metrics_paths);

std::string decode_result_to_json_line(const DecodeResult& result);
DecodeResult decode_result_from_json_line(const std::string& line);

}  // namespace sata
