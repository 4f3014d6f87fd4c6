#include "sata/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sata/dataset.hpp"
#include "sata/parallel.hpp"
#include "sata/prompt.hpp"
#include "sata/rng.hpp"

namespace sata {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config ---------------------------------------------------------------

RunConfig RunConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  RunConfig c;
  c.dataset = j.value("dataset", c.dataset);
  c.model_name = j.value("model_name", c.model_name);
  c.decoder = j.value("decoder", c.decoder);
  if (j.contains("backend")) {
    const json& b = j["backend"];
    c.backend_kind = b.value("kind", c.backend_kind);
    c.synthetic.gold_score = b.value("gold_score", c.synthetic.gold_score);
    c.synthetic.distractor_score = b.value("distractor_score", c.synthetic.distractor_score);
    c.synthetic.nota_base = b.value("nota_base", c.synthetic.nota_base);
    c.synthetic.nota_high = b.value("nota_high", c.synthetic.nota_high);
    if (b.contains("id_bias")) c.synthetic.id_bias = b["id_bias"].get<std::vector<double>>();
    c.synthetic.noise_sigma = b.value("noise_sigma", c.synthetic.noise_sigma);
    c.synthetic.seed = b.value("seed", c.synthetic.seed);
    c.http.base_url = b.value("base_url", c.http.base_url);
    c.http.path = b.value("path", c.http.path);
    c.http.model = b.value("model", c.http.model);
    c.http.chat = b.value("chat", c.http.chat);
    c.http.top_logprobs = b.value("top_logprobs", c.http.top_logprobs);
    c.http.max_retries = b.value("max_retries", c.http.max_retries);
    c.http.backoff_ms = b.value("backoff_ms", c.http.backoff_ms);
    c.http.timeout_sec = b.value("timeout_sec", c.http.timeout_sec);
  }
  if (j.contains("funnel")) {
    const json& f = j["funnel"];
    c.funnel.tau = f.value("tau", c.funnel.tau);
    c.funnel.nota_text = f.value("nota_text", c.funnel.nota_text);
    c.funnel.max_passes = f.value("max_passes", c.funnel.max_passes);
    c.funnel.debias = f.value("debias", c.funnel.debias);
    std::string rule = f.value("stop_rule", std::string("accept_above_tau"));
    if (rule == "accept_above_tau")
      c.funnel.stop_rule = FunnelStopRule::kAcceptAboveTau;
    else if (rule == "halt_below_tau")
      c.funnel.stop_rule = FunnelStopRule::kHaltBelowTau;
    else
      throw std::invalid_argument("unknown funnel stop_rule: " + rule);
  }
  if (j.contains("theta") && !j["theta"].is_null()) c.theta = j["theta"].get<double>();
  if (j.contains("calibration")) {
    c.holdout_n = j["calibration"].value("holdout", c.holdout_n);
    c.grid_step = j["calibration"].value("grid_step", c.grid_step);
  }
  if (j.contains("prior")) {
    c.prior_subset_fraction = j["prior"].value("subset_fraction", c.prior_subset_fraction);
    c.prior_permutations = j["prior"].value("permutations", c.prior_permutations);
    c.exclude_estimation_from_eval =
        j["prior"].value("exclude_estimation_from_eval", c.exclude_estimation_from_eval);
  }
  c.alphabet = j.value("alphabet", c.alphabet);
  if (j.contains("templates")) {
    c.sata_template_path = j["templates"].value("sata", c.sata_template_path);
    c.yes_no_template_path = j["templates"].value("yes_no", c.yes_no_template_path);
  }
  c.parallelism = j.value("parallelism", c.parallelism);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.seed = j.value("seed", c.seed);
  c.spd_epsilon = j.value("spd_epsilon", c.spd_epsilon);
  if (j.contains("bias_tests")) {
    c.spd_replicates = j["bias_tests"].value("spd_replicates", c.spd_replicates);
    c.bootstrap_resamples = j["bias_tests"].value("bootstrap_resamples", c.bootstrap_resamples);
  }
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string RunConfig::to_json() const {
  json j;
  j["dataset"] = dataset;
  j["model_name"] = model_name;
  j["decoder"] = decoder;
  json b{{"kind", backend_kind}};
  if (backend_kind == "synthetic") {
    b["gold_score"] = synthetic.gold_score;
    b["distractor_score"] = synthetic.distractor_score;
    b["nota_base"] = synthetic.nota_base;
    b["nota_high"] = synthetic.nota_high;
    b["id_bias"] = synthetic.id_bias;
    b["noise_sigma"] = synthetic.noise_sigma;
    b["seed"] = synthetic.seed;
  } else {
    b["base_url"] = http.base_url;
    b["path"] = http.path;
    b["model"] = http.model;
    b["chat"] = http.chat;
    b["top_logprobs"] = http.top_logprobs;
  }
  j["backend"] = b;
  j["funnel"] = {{"tau", funnel.tau},
                 {"nota_text", funnel.nota_text},
                 {"max_passes", funnel.max_passes},
                 {"debias", funnel.debias},
                 {"stop_rule", funnel.stop_rule == FunnelStopRule::kAcceptAboveTau
                                   ? "accept_above_tau"
                                   : "halt_below_tau"}};
  if (theta)
    j["theta"] = *theta;
  else
    j["theta"] = nullptr;
  j["calibration"] = {{"holdout", holdout_n}, {"grid_step", grid_step}};
  j["prior"] = {{"subset_fraction", prior_subset_fraction},
                {"permutations", prior_permutations},
                {"exclude_estimation_from_eval", exclude_estimation_from_eval}};
  j["alphabet"] = alphabet;
  j["templates"] = {{"sata", sata_template_path}, {"yes_no", yes_no_template_path}};
  j["parallelism"] = parallelism;
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  j["spd_epsilon"] = spd_epsilon;
  j["bias_tests"] = {{"spd_replicates", spd_replicates},
                     {"bootstrap_resamples", bootstrap_resamples}};
  return j.dump(2);
}

void RunConfig::check() const {
  if (dataset.empty()) throw std::invalid_argument("config: dataset path required");
  if (!fs::exists(dataset)) throw std::invalid_argument("config: dataset not found: " + dataset);
  if (decoder != "first_token" && decoder != "first_token_debias" && decoder != "yes_no" &&
      decoder != "choice_funnel")
    throw std::invalid_argument("config: unknown decoder: " + decoder);
  if (backend_kind != "synthetic" && backend_kind != "http")
    throw std::invalid_argument("config: unknown backend kind: " + backend_kind);
  if (backend_kind == "http" && http.base_url.empty())
    throw std::invalid_argument("config: http backend requires base_url");
  if (alphabet != "uppercase" && alphabet != "numeric")
    throw std::invalid_argument("config: unknown alphabet: " + alphabet);
  if (needs_priors() && backend_kind != "synthetic" && backend_kind != "http")
    throw std::invalid_argument("config: debiasing requires a probability backend");
  if (!sata_template_path.empty() && !fs::exists(sata_template_path))
    throw std::invalid_argument("config: template not found: " + sata_template_path);
  if (!yes_no_template_path.empty() && !fs::exists(yes_no_template_path))
    throw std::invalid_argument("config: template not found: " + yes_no_template_path);
  if (grid_step <= 0 || grid_step > 1) throw std::invalid_argument("config: bad grid_step");
  if (prior_subset_fraction <= 0 || prior_subset_fraction > 1)
    throw std::invalid_argument("config: prior subset_fraction must be in (0,1]");
  funnel.check();
  if (backend_kind == "synthetic") synthetic.check();
  if (theta && (*theta < 0 || *theta > 1))
    throw std::invalid_argument("config: theta must be in [0,1]");
}

IdAlphabet RunConfig::make_alphabet() const {
  return alphabet == "numeric" ? IdAlphabet::numeric() : IdAlphabet::uppercase();
}

std::unique_ptr<ScoringBackend> RunConfig::make_backend() const {
  if (backend_kind == "synthetic") return std::make_unique<SyntheticBackend>(synthetic);
  return std::make_unique<HttpBackend>(http);
}

bool RunConfig::needs_theta() const {
  return decoder == "first_token" || decoder == "first_token_debias";
}

bool RunConfig::needs_priors() const {
  return decoder == "first_token_debias" || (decoder == "choice_funnel" && funnel.debias);
}

bool RunConfig::needs_nota_priors() const {
  return decoder == "choice_funnel" && funnel.debias;
}

// ---- decode result serialization -------------------------------------------

std::string decode_result_to_json_line(const DecodeResult& r) {
  json j;
  j["question_id"] = r.question_id;
  j["decoder"] = r.decoder;
  j["predicted"] = std::vector<std::string>(r.predicted.begin(), r.predicted.end());
  j["passes"] = r.passes;
  j["stopped_by"] = to_string(r.stopped_by);
  j["failed"] = r.failed;
  if (r.failed) j["error"] = r.error;
  json trace = json::array();
  for (const auto& pass : r.trace) {
    trace.push_back({{"remaining", pass.remaining},
                     {"ids", pass.distribution.ids},
                     {"probs", pass.distribution.probs},
                     {"chosen", pass.chosen},
                     {"chosen_prob", pass.chosen_prob}});
  }
  j["trace"] = trace;
  return j.dump();
}

DecodeResult decode_result_from_json_line(const std::string& line) {
  json j = json::parse(line);
  DecodeResult r;
  r.question_id = j.at("question_id").get<std::string>();
  r.decoder = j.value("decoder", "");
  for (const auto& p : j.at("predicted")) r.predicted.insert(p.get<std::string>());
  r.passes = j.at("passes").get<long>();
  r.stopped_by = stop_reason_from_string(j.at("stopped_by").get<std::string>());
  r.failed = j.value("failed", false);
  r.error = j.value("error", "");
  if (j.contains("trace")) {
    for (const auto& t : j["trace"]) {
      PassRecord pass;
      pass.remaining = t.value("remaining", std::vector<std::string>{});
      pass.distribution.ids = t.value("ids", std::vector<std::string>{});
      pass.distribution.probs = t.value("probs", std::vector<double>{});
      pass.chosen = t.value("chosen", "");
      pass.chosen_prob = t.value("chosen_prob", 0.0);
      r.trace.push_back(std::move(pass));
    }
  }
  return r;
}

// ---- run_eval ---------------------------------------------------------------

namespace {

struct Templates {
  std::string sata;
  std::string yes_no;
};

Templates load_templates(const RunConfig& config) {
  Templates t;
  if (!config.sata_template_path.empty()) t.sata = load_template_file(config.sata_template_path);
  if (!config.yes_no_template_path.empty())
    t.yes_no = load_template_file(config.yes_no_template_path);
  return t;
}

// Seeded estimation subset; always covers the dataset's longest option count
// so prefix supplementation can reach every length.
std::vector<SataQuestion> estimation_subset(const std::vector<SataQuestion>& eval_set,
                                            double fraction, uint64_t seed) {
  size_t want = static_cast<size_t>(std::ceil(fraction * static_cast<double>(eval_set.size())));
  want = std::max<size_t>(want, 1);
  want = std::min(want, eval_set.size());
  Rng rng = derive_rng(seed, "prior_subset");
  std::vector<size_t> picked = rng.sample_indices(eval_set.size(), want);
  std::sort(picked.begin(), picked.end());

  size_t max_len = 0, max_idx = 0;
  for (size_t i = 0; i < eval_set.size(); ++i) {
    if (eval_set[i].option_count() > max_len) {
      max_len = eval_set[i].option_count();
      max_idx = i;
    }
  }
  bool covered = false;
  for (size_t i : picked)
    if (eval_set[i].option_count() == max_len) covered = true;
  if (!covered) picked.push_back(max_idx);

  std::vector<SataQuestion> subset;
  subset.reserve(picked.size());
  for (size_t i : picked) subset.push_back(eval_set[i]);
  return subset;
}

std::map<std::string, DecodeResult> load_existing_results(const std::string& path) {
  std::map<std::string, DecodeResult> results;
  std::ifstream in(path);
  if (!in) return results;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DecodeResult r = decode_result_from_json_line(line);
    results[r.question_id] = std::move(r);
  }
  return results;
}

}  // namespace

ThresholdCalibration run_calibration(const RunConfig& config) {
  config.check();
  IdAlphabet alphabet = config.make_alphabet();
  auto backend = config.make_backend();
  Templates templates = load_templates(config);

  LoadResult loaded = load_dataset(config.dataset, alphabet);
  if (config.holdout_n > loaded.questions.size())
    throw std::invalid_argument("config: holdout larger than dataset");
  auto [holdout, remainder] = holdout_split(loaded.questions, config.holdout_n, config.seed);

  PriorTable priors;
  bool have_priors = false;
  if (config.needs_priors()) {
    PriorEstimationConfig pc;
    pc.permutations_per_question = config.prior_permutations;
    pc.with_nota_family = config.needs_nota_priors();
    pc.nota_text = config.funnel.nota_text;
    pc.seed = config.seed;
    pc.parallelism = config.parallelism;
    pc.template_text = templates.sata;
    priors = estimate_priors(*backend,
                             estimation_subset(remainder, config.prior_subset_fraction, config.seed),
                             pc, alphabet);
    priors.subset_fraction = config.prior_subset_fraction;
    have_priors = true;
  }

  DecodeContext ctx{&alphabet, templates.sata, templates.yes_no};
  ThresholdCalibration cal = calibrate_threshold(*backend, holdout, config.grid_step,
                                                 have_priors ? &priors : nullptr, ctx,
                                                 config.parallelism);
  cal.seed = config.seed;

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    json j{{"theta", cal.theta},
           {"achieved_ji", cal.achieved_ji},
           {"grid", cal.grid},
           {"grid_ji", cal.grid_ji},
           {"seed", cal.seed},
           {"usable_questions", cal.usable_questions},
           {"forward_passes", cal.forward_passes}};
    std::ofstream out(fs::path(config.output_dir) / "calibration.json");
    out << j.dump(2) << "\n";
  }
  return cal;
}

RunSummary run_eval(const RunConfig& config) {
  config.check();
  IdAlphabet alphabet = config.make_alphabet();
  auto backend = config.make_backend();
  Templates templates = load_templates(config);
  DecodeContext ctx{&alphabet, templates.sata, templates.yes_no};

  fs::create_directories(config.output_dir);
  fs::path out_dir(config.output_dir);
  const std::string results_path = (out_dir / "results.jsonl").string();
  const std::string priors_path = (out_dir / "priors.json").string();
  const std::string calibration_path = (out_dir / "calibration.json").string();
  const std::string metrics_path = (out_dir / "metrics.json").string();
  const std::string report_path = (out_dir / "report.md").string();

  LoadResult loaded = load_dataset(config.dataset, alphabet);
  if (config.holdout_n > loaded.questions.size())
    throw std::invalid_argument("config: holdout larger than dataset");
  auto [holdout, remainder] = holdout_split(loaded.questions, config.holdout_n, config.seed);

  RunSummary summary;

  // Priors: cached across reruns so resume issues no estimation calls.
  PriorTable priors;
  bool have_priors = false;
  if (config.needs_priors()) {
    if (fs::exists(priors_path)) {
      std::ifstream in(priors_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      priors = PriorTable::from_json(buf.str());
    } else {
      PriorEstimationConfig pc;
      pc.permutations_per_question = config.prior_permutations;
      pc.with_nota_family = config.needs_nota_priors();
      pc.nota_text = config.funnel.nota_text;
      pc.seed = config.seed;
      pc.parallelism = config.parallelism;
      pc.template_text = templates.sata;
      priors = estimate_priors(
          *backend, estimation_subset(remainder, config.prior_subset_fraction, config.seed), pc,
          alphabet);
      priors.subset_fraction = config.prior_subset_fraction;
      std::ofstream out(priors_path);
      out << priors.to_json() << "\n";
    }
    have_priors = true;
    summary.estimation_passes = priors.forward_passes;
  }

  // Threshold: explicit config value, cached calibration, or a fresh sweep.
  double theta = 0.0;
  if (config.needs_theta()) {
    if (config.theta) {
      theta = *config.theta;
    } else if (fs::exists(calibration_path)) {
      // Cached: no new calls; the artifact keeps its original cost so
      // resumed runs report identical totals.
      std::ifstream in(calibration_path);
      json j = json::parse(in);
      theta = j.at("theta").get<double>();
      summary.calibration_passes = j.value("forward_passes", 0l);
    } else {
      ThresholdCalibration cal = calibrate_threshold(
          *backend, holdout, config.grid_step, have_priors ? &priors : nullptr, ctx,
          config.parallelism);
      cal.seed = config.seed;
      theta = cal.theta;
      summary.calibration_passes = cal.forward_passes;
      json j{{"theta", cal.theta},
             {"achieved_ji", cal.achieved_ji},
             {"grid", cal.grid},
             {"grid_ji", cal.grid_ji},
             {"seed", cal.seed},
             {"usable_questions", cal.usable_questions},
             {"forward_passes", cal.forward_passes}};
      std::ofstream out(calibration_path);
      out << j.dump(2) << "\n";
    }
    summary.theta_used = theta;
  }

  // Eval set: the remainder, optionally minus the estimation subset.
  std::vector<SataQuestion> eval_set;
  if (config.exclude_estimation_from_eval && have_priors) {
    std::set<std::string> estimation_ids;
    for (const auto& q :
         estimation_subset(remainder, config.prior_subset_fraction, config.seed))
      estimation_ids.insert(q.id);
    for (const auto& q : remainder)
      if (!estimation_ids.count(q.id)) eval_set.push_back(q);
  } else {
    eval_set = remainder;
  }
  summary.n_total = eval_set.size();

  std::map<std::string, DecodeResult> results = load_existing_results(results_path);

  // Successful results are never re-queried; failed ones get another try
  // (the appended file keeps both lines, the later one wins on load).
  std::vector<size_t> todo;
  for (size_t i = 0; i < eval_set.size(); ++i) {
    auto it = results.find(eval_set[i].id);
    if (it == results.end() || it->second.failed) todo.push_back(i);
  }

  std::mutex io_mutex;
  std::ofstream appender(results_path, std::ios::app);
  std::vector<DecodeResult> fresh(todo.size());
  parallel_for(todo.size(), config.parallelism, [&](size_t t) {
    const SataQuestion& q = eval_set[todo[t]];
    DecodeResult r;
    if (config.decoder == "first_token") {
      r = decode_first_token(*backend, q, theta, nullptr, ctx);
    } else if (config.decoder == "first_token_debias") {
      r = decode_first_token(*backend, q, theta, &priors, ctx);
    } else if (config.decoder == "yes_no") {
      r = decode_yes_no(*backend, q, ctx);
    } else {
      r = decode_choice_funnel(*backend, q, config.funnel, have_priors ? &priors : nullptr, ctx);
    }
    {
      std::lock_guard<std::mutex> lock(io_mutex);
      appender << decode_result_to_json_line(r) << "\n";
      appender.flush();
    }
    fresh[t] = std::move(r);
  });
  appender.close();
  for (auto& r : fresh) results[r.question_id] = std::move(r);

  // Aggregation in dataset order keeps reports byte-identical regardless of
  // scheduling.
  std::vector<const SataQuestion*> questions;
  std::vector<QuestionOutcome> outcomes;
  std::vector<double> ctdifs;
  for (const auto& q : eval_set) {
    auto it = results.find(q.id);
    if (it == results.end()) continue;
    if (it->second.failed && config.decoder != "yes_no") {
      summary.n_failed += 1;
      continue;
    }
    QuestionOutcome o;
    o.question_id = q.id;
    o.pred = it->second.predicted;
    o.gold = q.gold;
    o.passes = it->second.passes;
    ctdifs.push_back(static_cast<double>(o.pred.size()) - static_cast<double>(o.gold.size()));
    questions.push_back(&q);
    outcomes.push_back(std::move(o));
  }
  summary.n_evaluated = outcomes.size();
  summary.metrics = aggregate_metrics(questions, outcomes, config.spd_epsilon);

  // Bias indicator statistics.
  summary.tests.speculation = speculation_check(summary.metrics.fpr, summary.metrics.em);
  if (ctdifs.size() >= 2) {
    try {
      summary.tests.count_ttest = count_bias_ttest(ctdifs);
    } catch (const std::exception& e) {
      summary.tests.count_ttest_note = e.what();
    }
  }
  if (!outcomes.empty()) {
    std::vector<double> gold_rates;
    std::vector<std::string> label_names;
    for (const auto& [label, counts] : summary.metrics.per_label) {
      if (counts.eligible == 0) continue;
      gold_rates.push_back(counts.gold_rate());
      label_names.push_back(label);
    }
    std::vector<double> baseline = spd_random_baseline(gold_rates, outcomes.size(),
                                                       config.spd_replicates, config.seed,
                                                       config.spd_epsilon);
    double bmean = 0;
    for (double v : baseline) bmean += v;
    bmean /= static_cast<double>(baseline.size());
    double bvar = 0;
    for (double v : baseline) bvar += (v - bmean) * (v - bmean);
    summary.tests.spd_baseline_mean = bmean;
    summary.tests.spd_baseline_std = std::sqrt(bvar / static_cast<double>(baseline.size()));
    summary.tests.spd_observed = summary.metrics.spd;

    // Observed-side sampling variability via nonparametric bootstrap over
    // questions, then Welch against the random baseline.
    if (config.bootstrap_resamples >= 2 && outcomes.size() >= 2) {
      Rng rng = derive_rng(config.seed, "spd_bootstrap");
      std::vector<double> boot;
      boot.reserve(config.bootstrap_resamples);
      for (size_t b = 0; b < config.bootstrap_resamples; ++b) {
        LabelStats stats;
        for (size_t n = 0; n < outcomes.size(); ++n) {
          size_t pick = static_cast<size_t>(rng.next_below(outcomes.size()));
          stats.add(*questions[pick], outcomes[pick].pred);
        }
        std::vector<double> p, q;
        for (const auto& [label, counts] : stats.per_label()) {
          if (counts.eligible == 0) continue;
          p.push_back(counts.gold_rate());
          q.push_back(counts.pred_rate());
        }
        boot.push_back(spd(p, q, config.spd_epsilon).value);
      }
      try {
        summary.tests.spd_vs_random = welch_t(boot, baseline);
      } catch (const std::exception&) {
        summary.tests.spd_vs_random = std::nullopt;  // degenerate variance
      }
    }
  }

  // Artifacts.
  json m = json::parse(metrics_to_json(summary.metrics));
  m["model"] = config.model_name;
  m["decoder"] = config.decoder;
  m["dataset"] = config.dataset;
  m["seed"] = config.seed;
  m["holdout_n"] = config.holdout_n;
  m["n_total"] = summary.n_total;
  m["n_evaluated"] = summary.n_evaluated;
  m["n_failed"] = summary.n_failed;
  m["n_skipped_load"] = loaded.skipped.size();
  m["estimation_passes"] = summary.estimation_passes;
  m["calibration_passes"] = summary.calibration_passes;
  m["total_passes"] =
      summary.metrics.infcost + summary.estimation_passes + summary.calibration_passes;
  if (summary.theta_used)
    m["theta"] = *summary.theta_used;
  else
    m["theta"] = nullptr;
  json tests;
  tests["speculation_fpr_gt_em"] = summary.tests.speculation;
  if (summary.tests.count_ttest) {
    tests["count_ttest"] = {{"t", summary.tests.count_ttest->t},
                            {"p_normal_approx", summary.tests.count_ttest->p},
                            {"df", summary.tests.count_ttest->df},
                            {"n", summary.tests.count_ttest->n_a}};
  } else if (!summary.tests.count_ttest_note.empty()) {
    tests["count_ttest"] = {{"undefined", summary.tests.count_ttest_note}};
  }
  tests["spd_observed"] = summary.tests.spd_observed;
  tests["spd_baseline_mean"] = summary.tests.spd_baseline_mean;
  tests["spd_baseline_std"] = summary.tests.spd_baseline_std;
  if (summary.tests.spd_vs_random) {
    tests["spd_vs_random_welch"] = {{"t", summary.tests.spd_vs_random->t},
                                    {"p_normal_approx", summary.tests.spd_vs_random->p},
                                    {"df", summary.tests.spd_vs_random->df}};
  }
  m["bias_tests"] = tests;
  {
    std::ofstream out(metrics_path);
    out << m.dump(2) << "\n";
  }
  {
    std::ofstream out(report_path);
    out << "# " << config.model_name << " + " << config.decoder << "\n\n";
    out << metrics_to_markdown(summary.metrics, config.model_name + " + " + config.decoder);
    out << "\nEvaluated " << summary.n_evaluated << "/" << summary.n_total << " questions ("
        << summary.n_failed << " failed); InfCost " << summary.metrics.infcost
        << ", estimation " << summary.estimation_passes << ", calibration "
        << summary.calibration_passes << ".\n";
  }
  summary.results_path = results_path;
  summary.metrics_path = metrics_path;
  summary.report_path = report_path;
  return summary;
}

// ---- comparison report ------------------------------------------------------

std::string render_comparison(const std::vector<std::string>& metrics_paths) {
  if (metrics_paths.empty()) throw std::invalid_argument("report: no metrics files given");

  struct Row {
    std::string model, decoder, dataset;
    double em, precision, recall, ji, spd, ctdifabs, ctacc;
    long infcost;
  };
  std::vector<Row> rows;
  for (const auto& path : metrics_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("report: cannot open " + path);
    json j = json::parse(in);
    Row r;
    r.model = j.value("model", "?");
    r.decoder = j.value("decoder", "?");
    r.dataset = j.value("dataset", "");
    r.em = j.at("EM").get<double>();
    r.precision = j.at("Precision").get<double>();
    r.recall = j.at("Recall").get<double>();
    r.ji = j.at("JI").get<double>();
    r.spd = j.at("SPD").get<double>();
    r.ctdifabs = j.at("CtDifAbs").get<double>();
    r.ctacc = j.at("CtAcc").get<double>();
    r.infcost = j.value("total_passes", j.at("InfCost").get<long>());
    rows.push_back(std::move(r));
  }
  for (const auto& r : rows)
    if (r.dataset != rows.front().dataset)
      throw std::runtime_error("report: runs use different datasets (" + rows.front().dataset +
                               " vs " + r.dataset + ")");

  // Column extractors; higher_better drives the bolding.
  struct Column {
    const char* name;
    bool higher_better;
    bool percent;
    std::function<double(const Row&)> get;
  };
  std::vector<Column> columns = {
      {"EM", true, true, [](const Row& r) { return r.em; }},
      {"Precision", true, true, [](const Row& r) { return r.precision; }},
      {"Recall", true, true, [](const Row& r) { return r.recall; }},
      {"JI", true, true, [](const Row& r) { return r.ji; }},
      {"SPD", false, false, [](const Row& r) { return r.spd; }},
      {"CtDifAbs", false, false, [](const Row& r) { return r.ctdifabs; }},
      {"CtAcc", true, false, [](const Row& r) { return r.ctacc; }},
      {"InfCost", false, false, [](const Row& r) { return static_cast<double>(r.infcost); }},
  };

  std::ostringstream out;
  out << "| Model | Decoder |";
  for (const auto& c : columns) out << " " << c.name << " |";
  out << "\n|---|---|";
  for (size_t i = 0; i < columns.size(); ++i) out << "---|";
  out << "\n";

  std::vector<double> best(columns.size());
  for (size_t ci = 0; ci < columns.size(); ++ci) {
    best[ci] = columns[ci].get(rows[0]);
    for (const auto& r : rows) {
      double v = columns[ci].get(r);
      if (columns[ci].higher_better ? v > best[ci] : v < best[ci]) best[ci] = v;
    }
  }
  auto fmt = [](double v, bool percent, bool integer) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    if (integer) {
      os << static_cast<long>(v);
    } else {
      os.precision(2);
      os << (percent ? v * 100.0 : v);
    }
    return os.str();
  };
  for (const auto& r : rows) {
    out << "| " << r.model << " | " << r.decoder << " |";
    for (size_t ci = 0; ci < columns.size(); ++ci) {
      double v = columns[ci].get(r);
      bool integer = std::string(columns[ci].name) == "InfCost";
      std::string cell = fmt(v, columns[ci].percent, integer);
      if (v == best[ci]) cell = "**" + cell + "**";
      out << " " << cell << " |";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace sata
