#pragma once

#include <cstdint>
#include <string>

#include "sata/backend.hpp"

namespace sata {

// Completions-style endpoint that returns top-N first-token log-probabilities.
struct HttpBackendConfig {
  std::string base_url;              // e.g. http://127.0.0.1:8080
  std::string path = "/v1/completions";
  std::string model;
  std::string api_key;               // empty -> read SATA_API_KEY
  bool chat = false;                 // use messages + top_logprobs instead of prompt + logprobs
  int top_logprobs = 20;
  int max_retries = 3;
  int backoff_ms = 250;
  int timeout_sec = 60;
  std::string yes_token = "Yes";
  std::string no_token = "No";
};

class HttpBackend : public ScoringBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  OptionDistribution score(const ScoreQuery& query) override;
  BinaryDistribution score_binary(const BinaryQuery& query) override;
  std::string name() const override { return config_.model.empty() ? "http" : config_.model; }

  // Raw first-token logprob map for one prompt, as (token, logprob) pairs.
  std::vector<std::pair<std::string, double>> first_token_logprobs(const std::string& prompt);

  static constexpr double kFloor = 1e-12;  // keeps debias division finite

 private:
  std::string post_with_retries(const std::string& body);
  HttpBackendConfig config_;
};

}  // namespace sata
