#pragma once

#include <string>
#include <vector>

#include "sata/backend.hpp"
#include "sata/question.hpp"

namespace sata {

// Templates are plain text with {context}, {question} and {options}
// placeholders. Options render as "ID. text" lines. When the question has no
// context, every template line that references {context} is dropped.
extern const char* kDefaultSataTemplate;
extern const char* kDefaultYesNoTemplate;  // {options} holds the single statement

// Throws when the template lacks {question} or {options}. Byte-deterministic.
std::string make_sata_prompt(const SataQuestion& question,
                             const std::vector<PromptOption>& options,
                             const std::string& template_text);

std::string make_yes_no_prompt(const SataQuestion& question, const Option& option,
                               const std::string& template_text);

std::string load_template_file(const std::string& path);

}  // namespace sata
