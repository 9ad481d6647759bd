#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "mambai/prompting.hpp"

using namespace mambai::prompting;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(MAMBAI_TEST_DATA_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::vector<std::pair<std::string, std::string>>& fixture_examples() {
  static const std::vector<std::pair<std::string, std::string>> examples = {
      {"Good morning, friend.", "Dader di'ak, kolega."},
      {"I am going to the market.", "Au ba merkadu."},
      {"We drink sweet tea at home.", "Ami hemu xa midar iha uma."},
      {"The big dog runs fast.", "Asu boot nee halai lalais."},
      {"Can you help me?", "Ita bele tulun au ka?"},
      {"The children play outside.", "Labarik sira halimar iha lolon."},
      {"Her house is near the river.", "Ina nia uma besik mota."},
      {"We eat rice and fish tonight.", "Ami han etu ho ikan kalan nee."},
      {"He works in a big garden.", "Nia servisu iha to'os boot."},
      {"My name is Maria.", "Hau nia naran Maria."},
  };
  return examples;
}

const std::vector<std::pair<std::string, std::string>>& fixture_entries() {
  static const std::vector<std::pair<std::string, std::string>> entries = {
      {"silly", "beik"}, {"dog", "asu"}, {"big", "boot"}, {"tea", "xa"}};
  return entries;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::size_t count_lines(const std::string& text) {
  return count_occurrences(text, "\n") + 1;
}

}  // namespace

TEST_CASE("zero-shot prompt matches the committed golden byte for byte") {
  PromptSpec spec;
  spec.input = "He is silly";
  CHECK(build_prompt(spec) == slurp("golden_prompt_zero_shot.txt"));
}

TEST_CASE("10-example prompt matches its golden") {
  PromptSpec spec;
  spec.examples = fixture_examples();
  spec.input = "The big dog drinks tea.";
  CHECK(build_prompt(spec) == slurp("golden_prompt_tfidf10.txt"));
}

TEST_CASE("5+5 prompt with dictionary entries matches its golden") {
  PromptSpec spec;
  spec.examples = fixture_examples();
  spec.dict_entries = fixture_entries();
  spec.input = "The big dog drinks tea.";
  const std::string prompt = build_prompt(spec);
  CHECK(prompt == slurp("golden_prompt_mixed5_5_dict.txt"));
  // block structure: 4 prefix lines, 3 per example, 2 header lines,
  // 3 per entry, 4 tail lines
  CHECK(count_lines(prompt) == 4 + 3 * 10 + 2 + 3 * 4 + 4);
}

TEST_CASE("5+5 prompt without dictionary entries matches its golden") {
  PromptSpec spec;
  spec.examples = fixture_examples();
  spec.input = "The big dog drinks tea.";
  CHECK(build_prompt(spec) == slurp("golden_prompt_mixed5_5_nodict.txt"));
}

TEST_CASE("prompt scaffolding invariants") {
  PromptSpec spec;
  spec.examples = fixture_examples();
  spec.dict_entries = fixture_entries();
  spec.input = "He is silly";
  const std::string prompt = build_prompt(spec);

  const std::string suffix = "\nMambai:";
  REQUIRE(prompt.size() >= suffix.size());
  CHECK(prompt.substr(prompt.size() - suffix.size()) == suffix);
  CHECK(count_occurrences(prompt, "English: ") ==
        spec.examples.size() + spec.dict_entries.size() + 1);
  CHECK(prompt.find("# Example sentences") != std::string::npos);
  CHECK(prompt.find("# Dictionary entries") != std::string::npos);
  CHECK(prompt.rfind("You are a translator for the Mambai language, originally from Timor-Leste.",
                     0) == 0);
}

TEST_CASE("zero-shot prompt still carries both bare section headers") {
  PromptSpec spec;
  spec.input = "Hello";
  const std::string prompt = build_prompt(spec);
  CHECK(prompt.find("# Example sentences\n\n# Dictionary entries") != std::string::npos);
  CHECK(count_occurrences(prompt, "English: ") == 1);
}

TEST_CASE("different inputs give different prompts") {
  PromptSpec a, b;
  a.input = "Hello";
  b.input = "Goodbye";
  CHECK(build_prompt(a) != build_prompt(b));
}

TEST_CASE("empty input is rejected") {
  PromptSpec spec;
  CHECK_THROWS_AS(build_prompt(spec), std::invalid_argument);
}
