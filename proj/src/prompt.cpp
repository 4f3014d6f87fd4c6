#include "sata/prompt.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sata {

const char* kDefaultSataTemplate =
    "You are presented with the following:\n"
    "\n"
    "Paragraph: {context}\n"
    "\n"
    "Question: {question}\n"
    "\n"
    "Choices:\n"
    "{options}\n"
    "\n"
    "Task:\n"
    "Identify and select all the correct answers based on the paragraph and the question.\n"
    "\n"
    "Answers:";

const char* kDefaultYesNoTemplate =
    "You are presented with the following:\n"
    "\n"
    "Paragraph: {context}\n"
    "\n"
    "Question: {question}\n"
    "\n"
    "Statement: {options}\n"
    "\n"
    "Task:\n"
    "Determine if the statement answers the question correctly and reply with \"Yes\" or \"No\" "
    "only.\n"
    "\n"
    "Answer:";

namespace {

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Removes every line that contains the {context} placeholder, plus a blank
// line directly after it so the surrounding spacing stays intact.
std::string drop_context_lines(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  bool first = true, skip_blank = false;
  while (std::getline(in, line)) {
    if (line.find("{context}") != std::string::npos) {
      skip_blank = true;
      continue;
    }
    if (skip_blank && line.empty()) {
      skip_blank = false;
      continue;
    }
    skip_blank = false;
    if (!first) out << "\n";
    out << line;
    first = false;
  }
  return out.str();
}

std::string fill(const std::string& template_text, const std::string& context,
                 const std::string& question, const std::string& options) {
  if (template_text.find("{question}") == std::string::npos)
    throw std::invalid_argument("prompt template missing {question} placeholder");
  if (template_text.find("{options}") == std::string::npos)
    throw std::invalid_argument("prompt template missing {options} placeholder");

  std::string text = template_text;
  if (context.empty())
    text = drop_context_lines(text);
  else
    replace_all(text, "{context}", context);
  replace_all(text, "{question}", question);
  replace_all(text, "{options}", options);
  return text;
}

}  // namespace

std::string make_sata_prompt(const SataQuestion& question,
                             const std::vector<PromptOption>& options,
                             const std::string& template_text) {
  std::ostringstream lines;
  for (size_t i = 0; i < options.size(); ++i) {
    if (i) lines << "\n";
    lines << options[i].prompt_id << ". " << options[i].text;
  }
  return fill(template_text, question.context, question.question, lines.str());
}

std::string make_yes_no_prompt(const SataQuestion& question, const Option& option,
                               const std::string& template_text) {
  return fill(template_text, question.context, question.question, option.text);
}

std::string load_template_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace sata
