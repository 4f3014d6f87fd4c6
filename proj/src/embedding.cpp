#include "sata/embedding.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sata/rng.hpp"

namespace sata {

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

HashedNgramEmbedder::HashedNgramEmbedder(size_t dims, size_t ngram)
    : dims_(dims), ngram_(ngram) {
  if (dims_ == 0 || ngram_ == 0) throw std::invalid_argument("embedder: dims and ngram > 0");
}

std::vector<double> HashedNgramEmbedder::embed(const std::string& text) {
  std::string norm;
  norm.reserve(text.size());
  bool last_space = true;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!last_space) norm.push_back(' ');
      last_space = true;
    } else {
      norm.push_back(static_cast<char>(std::tolower(c)));
      last_space = false;
    }
  }
  while (!norm.empty() && norm.back() == ' ') norm.pop_back();

  std::vector<double> vec(dims_, 0.0);
  if (norm.size() < ngram_) {
    if (!norm.empty()) vec[fnv1a64(norm) % dims_] += 1.0;
  } else {
    for (size_t i = 0; i + ngram_ <= norm.size(); ++i)
      vec[fnv1a64(std::string_view(norm).substr(i, ngram_)) % dims_] += 1.0;
  }
  double sq = 0;
  for (double v : vec) sq += v * v;
  if (sq > 0) {
    double inv = 1.0 / std::sqrt(sq);
    for (double& v : vec) v *= inv;
  }
  return vec;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config)
    : config_(std::move(config)) {
  if (config_.base_url.empty()) throw std::invalid_argument("embedding: base_url required");
  if (config_.api_key.empty()) {
    if (const char* env = std::getenv("SATA_API_KEY")) config_.api_key = env;
  }
}

std::vector<double> HttpEmbeddingProvider::embed(const std::string& text) {
  nlohmann::json req;
  req["model"] = config_.model;
  req["input"] = nlohmann::json::array({text});

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_sec, 0);
    client.set_read_timeout(config_.timeout_sec, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(config_.path, headers, req.dump(), "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      if (res->status == 429 || res->status >= 500) continue;
      break;
    }
    nlohmann::json resp = nlohmann::json::parse(res->body);
    std::vector<double> vec = resp.at("data").at(0).at("embedding").get<std::vector<double>>();
    double sq = 0;
    for (double v : vec) sq += v * v;
    if (sq <= 0) throw std::runtime_error("embedding provider returned a zero vector");
    double inv = 1.0 / std::sqrt(sq);
    for (double& v : vec) v *= inv;
    return vec;
  }
  throw std::runtime_error("embedding request failed after retries: " + last_error);
}

}  // namespace sata
