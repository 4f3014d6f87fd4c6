#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sata/curate.hpp"
#include "sata/dataset.hpp"
#include "sata/extract.hpp"
#include "sata/run.hpp"
#include "sata/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EvalFlags {
  std::string config_path;
  std::string dataset;
  std::string decoder;
  std::string output_dir;
  std::string model_name;
  std::optional<double> tau;
  std::optional<double> theta;
  std::optional<uint64_t> seed;
  std::optional<size_t> parallelism;
  std::optional<size_t> holdout;
  std::optional<bool> debias;
};

sata::RunConfig build_config(const EvalFlags& flags) {
  sata::RunConfig config = flags.config_path.empty()
                               ? sata::RunConfig{}
                               : sata::RunConfig::from_json_file(flags.config_path);
  if (!flags.dataset.empty()) config.dataset = flags.dataset;
  if (!flags.decoder.empty()) config.decoder = flags.decoder;
  if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
  if (!flags.model_name.empty()) config.model_name = flags.model_name;
  if (flags.tau) config.funnel.tau = *flags.tau;
  if (flags.theta) config.theta = *flags.theta;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.parallelism) config.parallelism = *flags.parallelism;
  if (flags.holdout) config.holdout_n = *flags.holdout;
  if (flags.debias) config.funnel.debias = *flags.debias;
  return config;
}

int cmd_eval(const EvalFlags& flags) {
  sata::RunConfig config = build_config(flags);
  sata::RunSummary summary = sata::run_eval(config);
  std::cout << "evaluated " << summary.n_evaluated << "/" << summary.n_total << " questions, "
            << summary.n_failed << " failed\n";
  std::cout << "JI " << summary.metrics.ji << "  EM " << summary.metrics.em << "  SPD "
            << summary.metrics.spd << "  CtAcc " << summary.metrics.ctacc << "  InfCost "
            << summary.metrics.infcost << "\n";
  if (summary.theta_used) std::cout << "theta " << *summary.theta_used << "\n";
  std::cout << "metrics: " << summary.metrics_path << "\n";
  std::cout << "report:  " << summary.report_path << "\n";
  return 0;
}

int cmd_calibrate(const EvalFlags& flags) {
  sata::RunConfig config = build_config(flags);
  sata::ThresholdCalibration cal = sata::run_calibration(config);
  std::cout << "theta " << cal.theta << " (holdout mean JI " << cal.achieved_ji << ", "
            << cal.usable_questions << " usable questions)\n";
  return 0;
}

int cmd_simulate(size_t n, size_t options_min, size_t options_max, size_t gold_min,
                 size_t gold_max, uint64_t seed, const std::string& output) {
  sata::SimulateConfig config;
  config.n_questions = n;
  config.options_min = options_min;
  config.options_max = options_max == 0 ? options_min : options_max;
  config.gold_min = gold_min;
  config.gold_max = gold_max;
  config.seed = seed;
  sata::IdAlphabet alphabet = sata::IdAlphabet::uppercase();
  auto questions = sata::simulate_questions(config, alphabet);
  sata::save_dataset(output, questions);
  std::cout << "wrote " << questions.size() << " questions to " << output << "\n";
  return 0;
}

int cmd_extract(const std::string& input, const std::string& output, bool numeric, int max_id) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);

  std::string line;
  size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::string text = j.at("text").get<std::string>();
    sata::ExtractionResult result;
    if (numeric || j.contains("max_id")) {
      int line_max = j.value("max_id", max_id);
      result = sata::extract_numeric_choices(text, line_max);
    } else {
      std::vector<std::string> valid = j.at("valid_ids").get<std::vector<std::string>>();
      result = sata::extract_letter_choices(text, valid);
    }
    json o{{"question_id", j.value("question_id", "")},
           {"ids", result.ids},
           {"method", sata::to_string(result.method)}};
    out << o.dump() << "\n";
    ++count;
  }
  std::cout << "extracted " << count << " records to " << output << "\n";
  return 0;
}

int cmd_curate(const std::string& input, const std::string& output,
               const std::string& report_path, const std::string& vague_path, uint64_t seed,
               const std::string& question_text) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  std::vector<sata::SourceRecord> records;
  std::string line;
  size_t line_no = 0, bad = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      sata::SourceRecord r;
      r.id = j.at("id").get<std::string>();
      r.text = j.at("text").get<std::string>();
      for (const auto& g : j.at("gold_labels")) r.gold_labels.insert(g.get<std::string>());
      for (const auto& p : j.at("label_pool")) r.label_pool.insert(p.get<std::string>());
      r.check();
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      std::cerr << "line " << line_no << " skipped: " << e.what() << "\n";
      ++bad;
    }
  }

  sata::CurateConfig config;
  config.seed = seed;
  if (!question_text.empty()) config.transform.question_text = question_text;
  if (!vague_path.empty()) config.vague_terms = sata::load_vague_terms(vague_path);
  sata::IdAlphabet alphabet = sata::IdAlphabet::uppercase();
  sata::HashedNgramEmbedder embedder;
  sata::CurationReport report;
  auto questions = sata::curate_pipeline(records, config, alphabet, embedder, report);
  sata::save_dataset(output, questions);
  if (!report_path.empty()) {
    std::ofstream rep(report_path);
    rep << report.to_json() << "\n";
  }
  std::cout << "curated " << questions.size() << " / " << records.size() << " records ("
            << bad << " unreadable lines)\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& output) {
  std::string table = sata::render_comparison(paths);
  if (output.empty()) {
    std::cout << table;
  } else {
    std::ofstream out(output);
    out << table;
    std::cout << "wrote " << output << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satakit: decoding and evaluation toolkit for select-all-that-apply QA"};
  app.require_subcommand(1);

  EvalFlags flags;
  double tau_val = 0, theta_val = 0;
  uint64_t seed_val = 0;
  size_t par_val = 0, holdout_val = 0;
  bool debias_on = false, debias_off = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "run config JSON");
    cmd->add_option("--dataset", flags.dataset, "dataset JSONL (overrides config)");
    cmd->add_option("--decoder", flags.decoder,
                    "first_token | first_token_debias | yes_no | choice_funnel");
    cmd->add_option("--output-dir", flags.output_dir, "artifact directory");
    cmd->add_option("--model-name", flags.model_name, "row label for reports");
    cmd->add_option("--tau", tau_val, "funnel confidence threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--theta", theta_val, "fixed first-token threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", seed_val, "run seed");
    cmd->add_option("--parallelism", par_val, "max concurrent questions");
    cmd->add_option("--holdout", holdout_val, "calibration holdout size");
    cmd->add_flag("--debias", debias_on, "enable funnel debiasing");
    cmd->add_flag("--no-debias", debias_off, "disable funnel debiasing");
  };

  CLI::App* eval = app.add_subcommand("eval", "run an evaluation");
  add_common(eval);
  CLI::App* calibrate = app.add_subcommand("calibrate", "calibrate the first-token threshold");
  add_common(calibrate);

  size_t sim_n = 500, sim_opt_min = 6, sim_opt_max = 0, sim_gold_min = 2, sim_gold_max = 5;
  uint64_t sim_seed = 0;
  std::string sim_out = "simulated.jsonl";
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  simulate->add_option("--n", sim_n, "number of questions");
  simulate->add_option("--options", sim_opt_min, "option count (min when --options-max set)");
  simulate->add_option("--options-max", sim_opt_max, "max option count");
  simulate->add_option("--gold-min", sim_gold_min, "min gold count");
  simulate->add_option("--gold-max", sim_gold_max, "max gold count");
  simulate->add_option("--seed", sim_seed, "generator seed");
  simulate->add_option("--output", sim_out, "output JSONL path");

  std::string ext_in, ext_out = "extracted.jsonl";
  bool ext_numeric = false;
  int ext_max_id = 15;
  CLI::App* extract = app.add_subcommand("extract", "recover answer ids from model text");
  extract->add_option("--input", ext_in, "JSONL of {question_id, text, valid_ids|max_id}")
      ->required();
  extract->add_option("--output", ext_out, "output JSONL path");
  extract->add_flag("--numeric", ext_numeric, "numeric-id recovery");
  extract->add_option("--max-id", ext_max_id, "largest numeric id")->check(CLI::Range(1, 15));

  std::string cur_in, cur_out = "curated.jsonl", cur_report = "curation_report.json";
  std::string cur_vague, cur_question;
  uint64_t cur_seed = 0;
  CLI::App* curate = app.add_subcommand("curate", "convert and filter a multi-label corpus");
  curate->add_option("--input", cur_in, "SourceRecord JSONL")->required();
  curate->add_option("--output", cur_out, "curated question JSONL");
  curate->add_option("--report", cur_report, "curation report JSON");
  curate->add_option("--vague-terms", cur_vague, "vague term list (default: built-in)");
  curate->add_option("--seed", cur_seed, "sampling seed");
  curate->add_option("--question", cur_question, "question text for transformed records");

  std::vector<std::string> rep_paths;
  std::string rep_out;
  CLI::App* report = app.add_subcommand("report", "comparison table across runs");
  report->add_option("metrics", rep_paths, "metrics.json files")->required();
  report->add_option("--output", rep_out, "write table to a file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed() || calibrate->parsed()) {
      CLI::App* cmd = eval->parsed() ? eval : calibrate;
      if (cmd->count("--tau")) flags.tau = tau_val;
      if (cmd->count("--theta")) flags.theta = theta_val;
      if (cmd->count("--seed")) flags.seed = seed_val;
      if (cmd->count("--parallelism")) flags.parallelism = par_val;
      if (cmd->count("--holdout")) flags.holdout = holdout_val;
      if (debias_on) flags.debias = true;
      if (debias_off) flags.debias = false;
      return eval->parsed() ? cmd_eval(flags) : cmd_calibrate(flags);
    }
    if (simulate->parsed())
      return cmd_simulate(sim_n, sim_opt_min, sim_opt_max, sim_gold_min, sim_gold_max, sim_seed,
                          sim_out);
    if (extract->parsed()) return cmd_extract(ext_in, ext_out, ext_numeric, ext_max_id);
    if (curate->parsed())
      return cmd_curate(cur_in, cur_out, cur_report, cur_vague, cur_seed, cur_question);
    if (report->parsed()) return cmd_report(rep_paths, rep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
