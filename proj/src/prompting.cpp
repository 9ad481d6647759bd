#include "mambai/prompting.hpp"

#include <stdexcept>

namespace mambai::prompting {

namespace {
constexpr const char* kSystemLine =
    "You are a translator for the Mambai language, originally from Timor-Leste.";
constexpr const char* kInstruction =
    "Please provide the translation for the following sentence. Do not provide any explanations "
    "or text apart from the translation.";
}  // namespace

std::string build_prompt(const PromptSpec& spec) {
  if (spec.input.empty()) throw std::invalid_argument("build_prompt: empty input sentence");

  std::vector<std::string> paragraphs;
  paragraphs.reserve(spec.examples.size() + spec.dict_entries.size() + 5);
  paragraphs.emplace_back(kSystemLine);
  paragraphs.emplace_back("# Example sentences");
  for (const auto& [english, mambai] : spec.examples)
    paragraphs.push_back("English: " + english + "\nMambai: " + mambai);
  paragraphs.emplace_back("# Dictionary entries");
  for (const auto& [english, mambai] : spec.dict_entries)
    paragraphs.push_back("English: " + english + "\nMambai: " + mambai);
  paragraphs.emplace_back(kInstruction);
  paragraphs.push_back("English: " + spec.input + "\nMambai:");

  std::string prompt;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    if (i > 0) prompt += "\n\n";
    prompt += paragraphs[i];
  }
  return prompt;
}

}  // namespace mambai::prompting
