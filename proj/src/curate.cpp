#include "sata/curate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sata/readability.hpp"

namespace sata {

void SourceRecord::check() const {
  if (id.empty()) throw std::invalid_argument("source record: empty id");
  if (gold_labels.empty()) throw std::invalid_argument("source record: no gold labels");
  for (const auto& g : gold_labels)
    if (!label_pool.count(g))
      throw std::invalid_argument("source record: gold label '" + g + "' missing from pool");
  if (label_pool.size() <= gold_labels.size())
    throw std::invalid_argument("source record: label pool must exceed gold labels");
}

SataQuestion transform_to_sata(const SourceRecord& record, const TransformConfig& config,
                               const IdAlphabet& alphabet, Rng& rng) {
  record.check();
  size_t c = record.gold_labels.size();
  if (c < kMinGold)
    throw std::invalid_argument("transform: need at least two gold labels, got " +
                                std::to_string(c));

  double point = std::round(config.ratio_point * static_cast<double>(c));
  double low = config.ratio_low * static_cast<double>(c);
  double high = config.ratio_high * static_cast<double>(c);
  size_t k = static_cast<size_t>(std::min(static_cast<double>(config.max_options),
                                          std::clamp(point, low, high)));
  size_t distractor_count = k - c;

  std::vector<std::string> pool;
  for (const auto& label : record.label_pool)
    if (!record.gold_labels.count(label)) pool.push_back(label);
  if (pool.size() < distractor_count)
    throw std::invalid_argument("transform: pool of " + std::to_string(pool.size()) +
                                " distractors cannot fill " + std::to_string(distractor_count));

  std::vector<std::string> contents(record.gold_labels.begin(), record.gold_labels.end());
  std::vector<bool> is_gold(contents.size(), true);
  for (size_t idx : rng.sample_indices(pool.size(), distractor_count)) {
    contents.push_back(pool[idx]);
    is_gold.push_back(false);
  }

  // Shuffle options so gold answers are not clustered at the front.
  std::vector<size_t> order(contents.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  SataQuestion q;
  q.id = record.id;
  q.context = record.text;
  q.question = config.question_text;
  q.domain = config.domain;
  for (size_t i = 0; i < order.size(); ++i) {
    const std::string& option_id = alphabet.symbols().at(i);
    q.options.push_back(Option{option_id, contents[order[i]]});
    if (is_gold[order[i]]) q.gold.insert(option_id);
  }
  q.validate(alphabet);
  return q;
}

std::vector<std::string> default_vague_terms() {
  // Vague quantities, likelihood, temporal ambiguity, subjectivity,
  // comparative uncertainty, undefined references.
  return {
      "some", "several", "many", "few", "a lot", "plenty", "numerous", "various", "partially",
      "a handful", "a bit", "a portion",
      "maybe", "possibly", "probably", "likely", "unlikely", "apparently", "presumably",
      "seemingly", "conceivably", "arguably", "occasionally",
      "sometimes", "often", "rarely", "once in a while", "from time to time", "now and then",
      "every so often",
      "bad", "nice", "significant", "substantial", "important", "interesting", "sufficient",
      "adequate", "reasonable", "moderate",
      "more or less", "about", "around", "roughly", "close to", "kind of", "sort of", "nearly",
      "almost", "approximately",
      "thing", "things", "anything", "everything", "whatever", "such", "kind", "type", "sort",
  };
}

std::vector<std::string> load_vague_terms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vague term list: " + path);
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos || line[start] == '#') continue;
    terms.push_back(line.substr(start));
  }
  return terms;
}

namespace {

std::vector<std::string> lower_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

// Whole-word phrase match over the token stream.
bool contains_phrase(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& phrase) {
  if (phrase.empty() || tokens.size() < phrase.size()) return false;
  for (size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[i + j] != phrase[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

std::string question_text(const SataQuestion& q) {
  return q.context.empty() ? q.question : q.context + " " + q.question;
}

}  // namespace

FilterDecision initial_filter(const SataQuestion& question,
                              const std::vector<std::string>& vague_terms) {
  std::vector<std::string> tokens = lower_tokens(question_text(question));
  if (tokens.size() < 10) return {false, "short"};
  for (const auto& term : vague_terms) {
    if (contains_phrase(tokens, lower_tokens(term))) return {false, "vague"};
  }
  return {true, ""};
}

FilterDecision readability_filter(const SataQuestion& question, const ReadabilityGate& gate,
                                  ReadabilityScores* scores_out) {
  std::string text = question_text(question);
  ReadabilityScores scores{fre(text), gfi(text)};
  if (scores_out) *scores_out = scores;
  if (!scores.fre || !scores.gfi) return {false, "readability"};
  if (*scores.fre < gate.fre_low || *scores.fre > gate.fre_high) return {false, "readability"};
  if (*scores.gfi < gate.gfi_low || *scores.gfi > gate.gfi_high) return {false, "readability"};
  return {true, ""};
}

namespace {

std::map<std::string, double> term_counts(const std::string& text) {
  std::map<std::string, double> counts;
  for (const auto& tok : lower_tokens(text)) counts[tok] += 1.0;
  return counts;
}

double weighted_cosine(const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b,
                       const std::map<std::string, size_t>& doc_freq, size_t corpus_size) {
  auto weight = [&](const std::string& term, double tf) {
    auto it = doc_freq.find(term);
    size_t df = it == doc_freq.end() ? 1 : it->second;
    return tf * std::log(static_cast<double>(corpus_size) / static_cast<double>(df));
  };
  double dot = 0, na = 0, nb = 0;
  for (const auto& [term, tf] : a) {
    double w = weight(term, tf);
    na += w * w;
    auto it = b.find(term);
    if (it != b.end()) dot += w * weight(term, it->second);
  }
  for (const auto& [term, tf] : b) {
    double w = weight(term, tf);
    nb += w * w;
  }
  if (na <= 0 || nb <= 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double tfidf_cosine(const std::string& text_a, const std::string& text_b, size_t corpus_size,
                    const std::map<std::string, size_t>& doc_freq) {
  return weighted_cosine(term_counts(text_a), term_counts(text_b), doc_freq, corpus_size);
}

DedupResult tfidf_dedup(const std::vector<SataQuestion>& questions, double threshold) {
  DedupResult result;
  size_t n = questions.size();
  std::vector<std::map<std::string, double>> vectors(n);
  std::map<std::string, size_t> doc_freq;
  for (size_t i = 0; i < n; ++i) {
    vectors[i] = term_counts(question_text(questions[i]));
    for (const auto& [term, _] : vectors[i]) doc_freq[term] += 1;
  }

  std::vector<bool> dropped(n, false);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (dropped[j]) continue;
      double sim = weighted_cosine(vectors[i], vectors[j], doc_freq, n);
      if (sim >= threshold) {
        dropped[j] = true;
        result.dropped_pairs.emplace_back(questions[i].id, questions[j].id);
      }
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (!dropped[i]) result.retained.push_back(questions[i]);
  return result;
}

double confusion_score(const SataQuestion& question, EmbeddingProvider& embedder) {
  std::vector<std::vector<double>> gold_vecs, distractor_vecs;
  for (const auto& opt : question.options) {
    auto vec = embedder.embed(opt.text);
    if (question.is_gold(opt.id))
      gold_vecs.push_back(std::move(vec));
    else
      distractor_vecs.push_back(std::move(vec));
  }
  if (gold_vecs.empty() || distractor_vecs.empty())
    throw std::invalid_argument("confusion_score: question lacks gold or distractor options");
  double total = 0;
  for (const auto& g : gold_vecs)
    for (const auto& d : distractor_vecs) total += cosine_similarity(g, d);
  return total / static_cast<double>(gold_vecs.size() * distractor_vecs.size());
}

BinSampleResult bin_and_sample(const std::vector<SataQuestion>& questions,
                               const std::vector<double>& scores, const BinSampleConfig& config,
                               Rng& rng) {
  if (questions.size() != scores.size())
    throw std::invalid_argument("bin_and_sample: score count mismatch");
  BinSampleResult result;
  if (questions.empty()) return result;

  double lo = scores[0], hi = scores[0];
  for (double s : scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  size_t bins = hi > lo ? config.bins : 1;  // degenerate range collapses to one bin
  double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;

  std::vector<std::vector<size_t>> members(bins);
  for (size_t i = 0; i < scores.size(); ++i) {
    size_t b = hi > lo ? std::min(bins - 1, static_cast<size_t>((scores[i] - lo) / width)) : 0;
    members[b].push_back(i);
  }

  result.bin_sizes.resize(bins);
  result.bin_taken.resize(bins);
  std::vector<bool> take(questions.size(), false);
  for (size_t b = 0; b < bins; ++b) {
    result.bin_sizes[b] = members[b].size();
    size_t want = std::min(members[b].size(), config.per_bin_max);
    if (members[b].size() < config.per_bin_min && !members[b].empty())
      result.underfull_bins.push_back(b);
    for (size_t pick : rng.sample_indices(members[b].size(), want))
      take[members[b][pick]] = true;
    result.bin_taken[b] = want;
  }
  for (size_t i = 0; i < questions.size(); ++i)
    if (take[i]) result.sampled.push_back(questions[i]);
  return result;
}

std::string CurationReport::to_json() const {
  nlohmann::json j;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json dropped = nlohmann::json::object();
    size_t dropped_total = 0;
    for (const auto& [reason, count] : s.dropped_by_reason) {
      dropped[reason] = count;
      dropped_total += count;
    }
    j["stages"].push_back({{"name", s.name},
                           {"input", s.input},
                           {"kept", s.kept},
                           {"dropped", dropped_total},
                           {"dropped_by_reason", dropped}});
  }
  auto score_map = [](const std::map<std::string, double>& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
  };
  j["fre"] = score_map(fre_scores);
  j["gfi"] = score_map(gfi_scores);
  j["confusion"] = score_map(confusion_scores);
  j["underfull_bins"] = underfull_bins;
  return j.dump(2);
}

std::vector<SataQuestion> curate_pipeline(const std::vector<SourceRecord>& records,
                                          const CurateConfig& config, const IdAlphabet& alphabet,
                                          EmbeddingProvider& embedder, CurationReport& report) {
  const std::vector<std::string>& vague =
      config.vague_terms.empty() ? default_vague_terms() : config.vague_terms;

  Rng rng = derive_rng(config.seed, "curate");

  StageReport transform_stage{"transform", records.size(), 0, {}};
  std::vector<SataQuestion> questions;
  for (const auto& record : records) {
    try {
      questions.push_back(transform_to_sata(record, config.transform, alphabet, rng));
      transform_stage.kept += 1;
    } catch (const std::exception&) {
      transform_stage.dropped_by_reason["transform"] += 1;
    }
  }
  report.stages.push_back(transform_stage);

  StageReport initial_stage{"initial_filter", questions.size(), 0, {}};
  std::vector<SataQuestion> after_initial;
  for (const auto& q : questions) {
    FilterDecision d = initial_filter(q, vague);
    if (d.keep) {
      after_initial.push_back(q);
      initial_stage.kept += 1;
    } else {
      initial_stage.dropped_by_reason[d.reason] += 1;
    }
  }
  report.stages.push_back(initial_stage);

  StageReport read_stage{"readability", after_initial.size(), 0, {}};
  std::vector<SataQuestion> after_read;
  for (const auto& q : after_initial) {
    ReadabilityScores scores;
    FilterDecision d = readability_filter(q, config.readability, &scores);
    if (scores.fre) report.fre_scores[q.id] = *scores.fre;
    if (scores.gfi) report.gfi_scores[q.id] = *scores.gfi;
    if (d.keep) {
      after_read.push_back(q);
      read_stage.kept += 1;
    } else {
      read_stage.dropped_by_reason[d.reason] += 1;
    }
  }
  report.stages.push_back(read_stage);

  DedupResult dedup = tfidf_dedup(after_read, config.dedup_threshold);
  StageReport dedup_stage{"dedup", after_read.size(), dedup.retained.size(), {}};
  if (!dedup.dropped_pairs.empty())
    dedup_stage.dropped_by_reason["similarity"] = dedup.dropped_pairs.size();
  report.stages.push_back(dedup_stage);

  std::vector<double> scores;
  scores.reserve(dedup.retained.size());
  for (const auto& q : dedup.retained) {
    double score = confusion_score(q, embedder);
    report.confusion_scores[q.id] = score;
    scores.push_back(score);
  }
  BinSampleResult binned = bin_and_sample(dedup.retained, scores, config.binning, rng);
  StageReport bin_stage{"binning", dedup.retained.size(), binned.sampled.size(), {}};
  if (binned.sampled.size() < dedup.retained.size())
    bin_stage.dropped_by_reason["binning"] = dedup.retained.size() - binned.sampled.size();
  report.stages.push_back(bin_stage);
  report.underfull_bins = binned.underfull_bins;

  return binned.sampled;
}

}  // namespace sata
