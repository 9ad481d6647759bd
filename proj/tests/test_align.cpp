#include <cmath>
#include <stdexcept>
#include <set>

#include "doctest.h"
#include "mambai/align.hpp"

using namespace mambai;
using namespace mambai::align;

TEST_CASE("gale_church_cost with equal lengths is the prior cost alone") {
  AlignConfig cfg;
  // delta = 0 so the length term vanishes: cost = -ln(0.89)
  CHECK(gale_church_cost(50, 50, MatchType::k11, cfg) ==
        doctest::Approx(0.11653381625595151).epsilon(1e-9));
}

TEST_CASE("gale_church_cost length mismatch, checked against a normal-CDF table") {
  AlignConfig cfg;
  // delta = 30/sqrt(68) = 3.63803...; 2*(1-Phi(delta)) = 2.747267638e-4
  // (scipy.stats.norm.cdf), total cost 8.31626735664064
  CHECK(gale_church_cost(10, 40, MatchType::k11, cfg) ==
        doctest::Approx(8.31626735664064).epsilon(1e-7));
}

TEST_CASE("gale_church_cost is zero for a certain bead with matching lengths") {
  AlignConfig cfg;
  cfg.match_priors = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(gale_church_cost(20, 20, MatchType::k11, cfg) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("insertion beads pay the fixed tail penalty") {
  AlignConfig cfg;
  // -ln(0.0099) - ln(0.02)
  CHECK(gale_church_cost(10, 0, MatchType::k10, cfg) ==
        doctest::Approx(8.52724352726974).epsilon(1e-9));
  CHECK(gale_church_cost(0, 10, MatchType::k01, cfg) ==
        doctest::Approx(8.52724352726974).epsilon(1e-9));
}

TEST_CASE("two-sided bead with an empty side violates the precondition") {
  AlignConfig cfg;
  CHECK_THROWS_AS(gale_church_cost(0, 10, MatchType::k11, cfg), std::invalid_argument);
  CHECK_THROWS_AS(gale_church_cost(10, 0, MatchType::k22, cfg), std::invalid_argument);
}

TEST_CASE("config validation") {
  AlignConfig ok;
  CHECK_NOTHROW(ok.validate());

  AlignConfig bad_lambda;
  bad_lambda.lex_weight = 1.5;
  CHECK_THROWS_AS(bad_lambda.validate(), std::invalid_argument);

  AlignConfig bad_priors;
  bad_priors.match_priors = {0.5, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(bad_priors.validate(), std::invalid_argument);

  AlignConfig bad_var;
  bad_var.variance = 0.0;
  CHECK_THROWS_AS(bad_var.validate(), std::invalid_argument);
}

TEST_CASE("cost is finite and non-negative even for extreme lengths") {
  AlignConfig cfg;
  for (auto [s, t] : {std::pair<std::size_t, std::size_t>{1, 500},
                      {500, 1},
                      {1, 1},
                      {1000, 1000}}) {
    double c = gale_church_cost(s, t, MatchType::k11, cfg);
    CHECK(std::isfinite(c));
    CHECK(c >= 0.0);
  }
}

TEST_CASE("lexical_score counts covered English tokens") {
  std::vector<extract::DictionaryEntry> dict = {{"silly", "beik", {"adj."}},
                                                {"dog", "asu", std::nullopt}};
  CHECK(lexical_score("silly", "beik", dict) == doctest::Approx(1.0));
  CHECK(lexical_score("silly", "beik", {}) == doctest::Approx(0.0));
  CHECK(lexical_score("the silly dog", "asu beik", dict) == doctest::Approx(2.0 / 3.0));
  CHECK(lexical_score("", "beik", dict) == doctest::Approx(0.0));
}

TEST_CASE("lexical_score stays within bounds under punctuation and case") {
  std::vector<extract::DictionaryEntry> dict = {{"Silly", "Beik", std::nullopt}};
  CHECK(lexical_score("He is SILLY!", "Au beik.", dict) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("align_section: single forced 1-1 bead scores by length alone") {
  AlignConfig cfg;
  auto pairs = align_section({"Hello."}, {"Loron di'ak."}, {}, cfg);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].english == "Hello.");
  CHECK(pairs[0].mambai == "Loron di'ak.");
  const double len_prob = length_probability(6, 12, cfg);
  CHECK(pairs[0].score == doctest::Approx((1.0 - cfg.lex_weight) * len_prob).epsilon(1e-12));
}

TEST_CASE("align_section: empty side yields empty result") {
  AlignConfig cfg;
  CHECK(align_section({}, {"x."}, {}, cfg).empty());
  CHECK(align_section({"x."}, {}, {}, cfg).empty());
  CHECK(align_section({}, {}, {}, cfg).empty());
}

TEST_CASE("align_section recovers pairs across an inserted English sentence") {
  std::vector<extract::DictionaryEntry> dict = {
      {"cat", "busa", std::nullopt},  {"sleeps", "toba", std::nullopt},
      {"dog", "asu", std::nullopt},   {"runs", "halai", std::nullopt},
      {"drink", "hemu", std::nullopt}, {"tea", "xa", std::nullopt},
      {"children", "labarik", std::nullopt}, {"play", "halimar", std::nullopt}};
  std::vector<std::string> english = {
      "the cat sleeps now.",
      "my dog runs fast.",
      "this completely unrelated editorial insertion rambles on about typography and "
      "paper stock for quite a long while indeed.",
      "we drink sweet tea.",
      "children play small games."};
  std::vector<std::string> mambai = {
      "busa toba oras nee.",
      "asu halai lalais.",
      "ami hemu xa midar.",
      "labarik halimar kiik."};
  AlignConfig cfg;
  auto pairs = align_section(english, mambai, dict, cfg, "TEST");
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[0].english == english[0]);
  CHECK(pairs[1].english == english[1]);
  CHECK(pairs[2].english == english[3]);  // the insertion got a 1-0 bead
  CHECK(pairs[3].english == english[4]);
  CHECK(pairs[2].mambai == mambai[2]);
  for (const auto& p : pairs) CHECK(p.section == "TEST");
}

TEST_CASE("align_section: identical sides with an identity dictionary") {
  std::vector<std::string> sentences = {"mota boot nee.", "asu kiik halai.", "labarik halimar."};
  std::vector<extract::DictionaryEntry> dict;
  for (const auto& w : {"mota", "boot", "nee", "asu", "kiik", "halai", "labarik", "halimar"})
    dict.push_back({w, w, std::nullopt});
  AlignConfig cfg;
  auto pairs = align_section(sentences, sentences, dict, cfg);
  REQUIRE(pairs.size() == sentences.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].english == sentences[i]);
    CHECK(pairs[i].mambai == sentences[i]);
    CHECK(pairs[i].score >= cfg.lex_weight);  // lexical part is 1
  }
}

TEST_CASE("merged beads concatenate with a single space") {
  // one English sentence split in two on the Mambai side forces a 1-2 bead
  std::vector<std::string> english = {"good morning my friend how are you today."};
  std::vector<std::string> mambai = {"dader di'ak kolega.", "ita di'ak ka ohin."};
  AlignConfig cfg;
  auto pairs = align_section(english, mambai, {}, cfg);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].mambai == "dader di'ak kolega. ita di'ak ka ohin.");
}

TEST_CASE("filter_pairs keeps scores at or above the threshold") {
  std::vector<SentencePair> pairs = {{"a", "b", 0.1, ""}, {"c", "d", 0.2, ""}, {"e", "f", 0.9, ""}};
  CHECK(filter_pairs(pairs, 0.0).size() == 3);
  auto kept = filter_pairs(pairs, 0.2);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].score == doctest::Approx(0.2));  // boundary inclusive, stable order
  CHECK(kept[1].score == doctest::Approx(0.9));
}

namespace {
std::vector<SentencePair> synthetic_corpus(std::size_t n) {
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    pairs.push_back({"eng " + std::to_string(i), "mgm " + std::to_string(i), 1.0, "S"});
  return pairs;
}
}  // namespace

TEST_CASE("split_corpus sizes match the paper's 1187 -> 119/1068") {
  auto split = split_corpus(synthetic_corpus(1187), 0.1, 7);
  CHECK(split.test.size() == 119);
  CHECK(split.train.size() == 1068);
}

TEST_CASE("split_corpus small corpus") {
  auto split = split_corpus(synthetic_corpus(10), 0.1, 3);
  CHECK(split.test.size() == 1);
  CHECK(split.train.size() == 9);
}

TEST_CASE("split_corpus is deterministic per seed and disjoint") {
  auto corpus = synthetic_corpus(100);
  auto a = split_corpus(corpus, 0.1, 1);
  auto b = split_corpus(corpus, 0.1, 1);
  CHECK(a.test == b.test);
  CHECK(a.train == b.train);

  auto c = split_corpus(corpus, 0.1, 2);
  CHECK(a.test != c.test);  // overwhelmingly likely for 100 pairs

  std::set<std::string> test_set, train_set;
  for (const auto& p : a.test) test_set.insert(p.english);
  for (const auto& p : a.train) train_set.insert(p.english);
  CHECK(test_set.size() + train_set.size() == 100);
  for (const auto& t : test_set) CHECK(train_set.count(t) == 0);
}

TEST_CASE("split_corpus rejects bad input") {
  CHECK_THROWS_AS(split_corpus(synthetic_corpus(1), 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_corpus(synthetic_corpus(10), 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_corpus(synthetic_corpus(10), 1.0, 0), std::invalid_argument);
}

TEST_CASE("pairs JSONL round trip") {
  std::vector<SentencePair> pairs = {{"Let's go.", "Mai ita ba.", 0.83, "GREETINGS"},
                                     {"Good day.", "Loron di'ak.", 0.5, ""}};
  auto back = pairs_from_jsonl(pairs_to_jsonl(pairs));
  REQUIRE(back.size() == 2);
  CHECK(back[0].english == pairs[0].english);
  CHECK(back[0].mambai == pairs[0].mambai);
  CHECK(back[0].score == doctest::Approx(pairs[0].score));
  CHECK(back[0].section == pairs[0].section);
}
