#include "sata/http_backend.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace sata {

using nlohmann::json;

namespace {

std::string trim_ws(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw std::invalid_argument("http backend: base_url required");
  if (config_.api_key.empty()) {
    if (const char* env = std::getenv("SATA_API_KEY")) config_.api_key = env;
  }
}

std::string HttpBackend::post_with_retries(const std::string& body) {
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(config_.backoff_ms << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    // One client per call: httplib clients are not safe for concurrent reuse.
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_sec, 0);
    client.set_read_timeout(config_.timeout_sec, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(config_.path, headers, body, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
    if (!retryable_status(res->status)) break;
  }
  throw std::runtime_error("backend request failed after retries: " + last_error);
}

std::vector<std::pair<std::string, double>> HttpBackend::first_token_logprobs(
    const std::string& prompt) {
  json req;
  req["model"] = config_.model;
  req["max_tokens"] = 1;
  req["temperature"] = 0;
  if (config_.chat) {
    req["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    req["logprobs"] = true;
    req["top_logprobs"] = config_.top_logprobs;
  } else {
    req["prompt"] = prompt;
    req["logprobs"] = config_.top_logprobs;
  }

  json resp = json::parse(post_with_retries(req.dump()));
  std::vector<std::pair<std::string, double>> out;
  const json& choice = resp.at("choices").at(0);
  if (config_.chat) {
    const json& entries = choice.at("logprobs").at("content").at(0).at("top_logprobs");
    for (const auto& e : entries)
      out.emplace_back(e.at("token").get<std::string>(), e.at("logprob").get<double>());
  } else {
    const json& top = choice.at("logprobs").at("top_logprobs").at(0);
    for (auto it = top.begin(); it != top.end(); ++it)
      out.emplace_back(it.key(), it.value().get<double>());
  }
  return out;
}

OptionDistribution HttpBackend::score(const ScoreQuery& query) {
  auto logprobs = first_token_logprobs(query.prompt_text);

  OptionDistribution dist;
  dist.ids.reserve(query.options.size());
  dist.probs.assign(query.options.size(), 0.0);
  for (const auto& opt : query.options) dist.ids.push_back(opt.prompt_id);

  // Exact match on the id after trimming whitespace, case-sensitive; a
  // leading-space variant (" A") therefore folds into the same id.
  double matched_mass = 0.0;
  for (const auto& [token, logprob] : logprobs) {
    std::string key = trim_ws(token);
    for (size_t i = 0; i < dist.ids.size(); ++i) {
      if (dist.ids[i] == key) {
        double mass = std::exp(logprob);
        dist.probs[i] += mass;
        matched_mass += mass;
      }
    }
  }
  dist.coverage = matched_mass;
  for (size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] <= 0.0) {
      dist.probs[i] = kFloor;
      dist.floored.push_back(dist.ids[i]);
    }
  }
  dist.renormalize();
  return dist;
}

BinaryDistribution HttpBackend::score_binary(const BinaryQuery& query) {
  auto logprobs = first_token_logprobs(query.prompt_text);

  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  const std::string yes = lower(config_.yes_token);
  const std::string no = lower(config_.no_token);

  double yes_mass = 0.0, no_mass = 0.0;
  for (const auto& [token, logprob] : logprobs) {
    std::string key = lower(trim_ws(token));
    if (key == yes) yes_mass += std::exp(logprob);
    if (key == no) no_mass += std::exp(logprob);
  }
  BinaryDistribution out;
  if (yes_mass + no_mass <= 0.0) {
    out.p_yes = out.p_no = 0.5;
    out.covered = false;
    return out;
  }
  out.p_yes = yes_mass / (yes_mass + no_mass);
  out.p_no = no_mass / (yes_mass + no_mass);
  out.covered = true;
  return out;
}

}  // namespace sata
