#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mambai::prompting {

/// Everything that goes into one few-shot translation prompt. Example and
/// dictionary lists may be empty (zero-shot); input may not.
struct PromptSpec {
  std::vector<std::pair<std::string, std::string>> examples;      // (english, mambai)
  std::vector<std::pair<std::string, std::string>> dict_entries;  // (english word, mambai word)
  std::string input;
};

/// Renders the fixed translation prompt. Section headers are always
/// emitted, even with empty bodies; line endings are "\n"; the result ends
/// with "\nMambai:" (no trailing space or newline).
/// Throws std::invalid_argument on empty input.
std::string build_prompt(const PromptSpec& spec);

}  // namespace mambai::prompting
