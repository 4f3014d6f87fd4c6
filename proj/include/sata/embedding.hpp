#pragma once

#include <memory>
#include <string>
#include <vector>

namespace sata {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
  virtual std::string name() const = 0;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Deterministic offline fallback: character n-gram counts hashed into a
// fixed-width vector, L2-normalized. No semantics, but overlapping strings
// score higher than disjoint ones, which is all the tests need.
class HashedNgramEmbedder : public EmbeddingProvider {
 public:
  explicit HashedNgramEmbedder(size_t dims = 256, size_t ngram = 3);
  std::vector<double> embed(const std::string& text) override;
  std::string name() const override { return "hashed-ngram"; }

 private:
  size_t dims_;
  size_t ngram_;
};

struct HttpEmbeddingConfig {
  std::string base_url;
  std::string path = "/v1/embeddings";
  std::string model;
  std::string api_key;  // empty -> SATA_API_KEY
  int max_retries = 3;
  int backoff_ms = 250;
  int timeout_sec = 60;
};

// Speaks {model, input:[text]} -> {data:[{embedding:[...]}]}. Output is
// re-normalized to unit length.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpEmbeddingConfig config);
  std::vector<double> embed(const std::string& text) override;
  std::string name() const override { return config_.model.empty() ? "http-embed" : config_.model; }

 private:
  HttpEmbeddingConfig config_;
};

}  // namespace sata
