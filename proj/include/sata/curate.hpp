#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sata/embedding.hpp"
#include "sata/question.hpp"
#include "sata/rng.hpp"

namespace sata {

// One multi-label source item before SATA conversion.
struct SourceRecord {
  std::string id;
  std::string text;
  std::set<std::string> gold_labels;
  std::set<std::string> label_pool;  // proper superset of gold_labels

  void check() const;
};

struct TransformConfig {
  double ratio_low = 2.0;   // option count k stays within [2c, 3c] ...
  double ratio_high = 3.0;
  double ratio_point = 2.5;  // ... aiming for round(2.5 * c)
  size_t max_options = kMaxOptions;
  std::string question_text = "Which of the following apply to the text above?";
  std::string domain;
};

// k = min(max_options, clamp(round(2.5c), 2c, 3c)); distractors sampled
// uniformly without replacement from pool \ gold; all options shuffled
// before ids are assigned. Throws when c < 2 or the pool is too small.
SataQuestion transform_to_sata(const SourceRecord& record, const TransformConfig& config,
                               const IdAlphabet& alphabet, Rng& rng);

// Default contents of data/vague_terms.txt (one term per line, '#' comments).
std::vector<std::string> default_vague_terms();
std::vector<std::string> load_vague_terms(const std::string& path);

struct FilterDecision {
  bool keep = true;
  std::string reason;  // short | vague | readability | similarity
};

// Drops questions under ten words (context + question) or containing any
// vague term as a whole word/phrase, case-insensitive.
FilterDecision initial_filter(const SataQuestion& question,
                              const std::vector<std::string>& vague_terms);

struct ReadabilityGate {
  double fre_low = 20.0, fre_high = 100.0;
  double gfi_low = 6.0, gfi_high = 17.0;
};

struct ReadabilityScores {
  std::optional<double> fre;
  std::optional<double> gfi;
};

FilterDecision readability_filter(const SataQuestion& question, const ReadabilityGate& gate,
                                  ReadabilityScores* scores_out = nullptr);

// TF-IDF (idf = ln(N/df)) cosine over lowercase word tokens of
// context + question; for every pair at or above the threshold the later
// question in input order is dropped.
struct DedupResult {
  std::vector<SataQuestion> retained;
  std::vector<std::pair<std::string, std::string>> dropped_pairs;  // (earlier id, dropped id)
};
DedupResult tfidf_dedup(const std::vector<SataQuestion>& questions, double threshold = 0.8);

double tfidf_cosine(const std::string& text_a, const std::string& text_b, size_t corpus_size,
                    const std::map<std::string, size_t>& doc_freq);

// Mean embedding cosine over all (gold text, distractor text) pairs.
double confusion_score(const SataQuestion& question, EmbeddingProvider& embedder);

struct BinSampleConfig {
  size_t bins = 10;
  size_t per_bin_min = 50;   // smaller bins are kept whole and flagged
  size_t per_bin_max = 300;
};

struct BinSampleResult {
  std::vector<SataQuestion> sampled;
  std::vector<size_t> bin_sizes;
  std::vector<size_t> bin_taken;
  std::vector<size_t> underfull_bins;  // below per_bin_min
};

// Equal-width bins over the observed score range; per bin a uniform seeded
// sample of at most per_bin_max.
BinSampleResult bin_and_sample(const std::vector<SataQuestion>& questions,
                               const std::vector<double>& scores, const BinSampleConfig& config,
                               Rng& rng);

// Per-stage bookkeeping; kept + dropped always equals the stage input.
struct StageReport {
  std::string name;
  size_t input = 0;
  size_t kept = 0;
  std::map<std::string, size_t> dropped_by_reason;
};

struct CurationReport {
  std::vector<StageReport> stages;
  std::map<std::string, double> fre_scores;
  std::map<std::string, double> gfi_scores;
  std::map<std::string, double> confusion_scores;
  std::vector<size_t> underfull_bins;

  std::string to_json() const;
};

struct CurateConfig {
  TransformConfig transform;
  std::vector<std::string> vague_terms;  // empty -> defaults
  ReadabilityGate readability;
  double dedup_threshold = 0.8;
  BinSampleConfig binning;
  uint64_t seed = 0;
};

// Full pipeline: transform -> initial filter -> readability -> dedup ->
// confusion scoring -> bin-and-sample.
std::vector<SataQuestion> curate_pipeline(const std::vector<SourceRecord>& records,
                                          const CurateConfig& config, const IdAlphabet& alphabet,
                                          EmbeddingProvider& embedder, CurationReport& report);

}  // namespace sata
