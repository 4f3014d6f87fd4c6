#include "sata/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "sata/rng.hpp"

namespace sata {

using nlohmann::json;

namespace {

SataQuestion question_from_parsed(const json& j, const IdAlphabet& alphabet) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  SataQuestion q;
  q.id = j.at("id").get<std::string>();
  q.question = j.at("question").get<std::string>();
  if (j.contains("context") && !j["context"].is_null()) q.context = j["context"].get<std::string>();
  if (j.contains("domain") && !j["domain"].is_null()) q.domain = j["domain"].get<std::string>();
  for (const auto& o : j.at("options")) {
    q.options.push_back(Option{o.at("id").get<std::string>(), o.at("text").get<std::string>()});
  }
  for (const auto& g : j.at("gold")) q.gold.insert(g.get<std::string>());
  if (j.contains("metadata") && j["metadata"].is_object()) {
    for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it) {
      if (it.value().is_string())
        q.metadata[it.key()] = it.value().get<std::string>();
      else
        q.metadata[it.key()] = it.value().dump();
    }
  }
  q.validate(alphabet);
  return q;
}

}  // namespace

SataQuestion question_from_json(const std::string& json_text, const IdAlphabet& alphabet) {
  return question_from_parsed(json::parse(json_text), alphabet);
}

std::string question_to_json_line(const SataQuestion& q) {
  json j;
  j["id"] = q.id;
  if (!q.context.empty()) j["context"] = q.context;
  j["question"] = q.question;
  j["options"] = json::array();
  for (const auto& o : q.options) j["options"].push_back({{"id", o.id}, {"text", o.text}});
  j["gold"] = json::array();
  for (const auto& g : q.gold) j["gold"].push_back(g);
  if (!q.domain.empty()) j["domain"] = q.domain;
  if (!q.metadata.empty()) {
    json m = json::object();
    for (const auto& [k, v] : q.metadata) m[k] = v;
    j["metadata"] = m;
  }
  return j.dump();
}

LoadResult load_dataset(const std::string& path, const IdAlphabet& alphabet) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  LoadResult result;
  std::set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SataQuestion q;
    try {
      q = question_from_json(line, alphabet);
    } catch (const std::exception& e) {
      result.skipped.push_back(SkippedLine{line_no, e.what()});
      continue;
    }
    if (!seen_ids.insert(q.id).second)
      throw std::runtime_error("duplicate question id '" + q.id + "' at line " +
                               std::to_string(line_no));
    result.questions.push_back(std::move(q));
  }
  return result;
}

void save_dataset(const std::string& path, const std::vector<SataQuestion>& questions) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  for (const auto& q : questions) out << question_to_json_line(q) << "\n";
}

std::pair<std::vector<SataQuestion>, std::vector<SataQuestion>> holdout_split(
    const std::vector<SataQuestion>& questions, size_t n, uint64_t seed) {
  if (n > questions.size())
    throw std::invalid_argument("holdout size " + std::to_string(n) + " exceeds dataset size " +
                                std::to_string(questions.size()));
  Rng rng = derive_rng(seed, "holdout_split");
  std::vector<size_t> picked = rng.sample_indices(questions.size(), n);
  std::vector<bool> in_holdout(questions.size(), false);
  for (size_t i : picked) in_holdout[i] = true;

  std::vector<SataQuestion> holdout, remainder;
  holdout.reserve(n);
  remainder.reserve(questions.size() - n);
  for (size_t i = 0; i < questions.size(); ++i) {
    (in_holdout[i] ? holdout : remainder).push_back(questions[i]);
  }
  return {std::move(holdout), std::move(remainder)};
}

}  // namespace sata
