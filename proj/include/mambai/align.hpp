#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mambai/extract.hpp"

namespace mambai::align {

/// Alignment bead shapes: source sentences vs target sentences.
enum class MatchType : int { k11 = 0, k10 = 1, k01 = 2, k21 = 3, k12 = 4, k22 = 5 };

constexpr std::array<MatchType, 6> kAllMatchTypes = {MatchType::k11, MatchType::k10, MatchType::k01,
                                                     MatchType::k21, MatchType::k12, MatchType::k22};

int source_arity(MatchType t);
int target_arity(MatchType t);
const char* match_type_name(MatchType t);

struct AlignConfig {
  double mean_char_ratio = 1.0;  // expected target/source character ratio (c)
  double variance = 6.8;         // per-character length variance (s^2)
  // Gale & Church (1993) priors. The classic rounded values do not sum to
  // exactly 1; validate() allows 2% slack.
  std::array<double, 6> match_priors = {0.89, 0.0099, 0.0099, 0.0445, 0.0445, 0.011};
  double lex_weight = 0.7;        // lambda: lexical vs length weight in pair scores
  double score_threshold = 0.2;   // default filter threshold
  // Constant tail probability standing in for the undefined length term of
  // 1-0/0-1 beads.
  double insertion_tail_prob = 0.02;

  /// Throws std::invalid_argument when out of range.
  void validate() const;
};

struct SentencePair {
  std::string english;
  std::string mambai;
  double score = 0.0;
  std::string section;

  bool operator==(const SentencePair&) const = default;
};

struct CorpusSplit {
  std::vector<SentencePair> train;
  std::vector<SentencePair> test;
  std::int64_t seed = 0;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Two-sided tail probability of the length discrepancy,
/// 2*(1 - Phi(|delta|)) with delta = (tgt - src*c) / sqrt(src*s^2).
double length_probability(std::size_t src_chars, std::size_t tgt_chars, const AlignConfig& cfg);

/// Bead cost: -log P(match_type) - log(2*(1 - Phi(|delta|))). For 1-0/0-1
/// the length term is the fixed insertion tail. Probabilities are clamped
/// to >= 1e-12 before the log, so the cost is finite and >= 0.
/// Throws std::invalid_argument on a non-positive length for a two-sided bead.
double gale_church_cost(std::size_t src_chars, std::size_t tgt_chars, MatchType type,
                        const AlignConfig& cfg);

/// Fraction of English tokens with at least one dictionary translation
/// whose tokens intersect the Mambai token set. In [0, 1].
double lexical_score(const std::string& english, const std::string& mambai,
                     const std::vector<extract::DictionaryEntry>& dict);

/// One step of an alignment path: `type` consumes source sentences
/// [src_begin, src_begin+arity) and likewise on the target side.
struct Bead {
  MatchType type;
  std::size_t src_begin = 0;
  std::size_t tgt_begin = 0;
};

struct AlignmentPath {
  std::vector<Bead> beads;
  double cost = 0.0;
};

/// Minimum-cost bead path over {1-1,1-0,0-1,2-1,1-2,2-2} under summed
/// gale_church_cost. Lengths are code points of each sentence; merged
/// beads add one joining space per boundary.
AlignmentPath compute_alignment_path(const std::vector<std::string>& english,
                                     const std::vector<std::string>& mambai,
                                     const AlignConfig& cfg);

/// Runs the DP and emits one SentencePair per two-sided bead; merged beads
/// concatenate their sentences with a single space.
/// Pair score = lambda*lexical + (1-lambda)*length probability.
/// Empty input on either side yields an empty result.
std::vector<SentencePair> align_section(const std::vector<std::string>& english,
                                        const std::vector<std::string>& mambai,
                                        const std::vector<extract::DictionaryEntry>& dict,
                                        const AlignConfig& cfg,
                                        const std::string& section_title = "");

/// align_section over every section, stamping section titles.
std::vector<SentencePair> align_sections(const std::vector<extract::BilingualSection>& sections,
                                         const std::vector<extract::DictionaryEntry>& dict,
                                         const AlignConfig& cfg);

/// Keeps pairs with score >= threshold, stable order.
std::vector<SentencePair> filter_pairs(const std::vector<SentencePair>& pairs, double threshold);

/// Deterministic seeded Fisher-Yates shuffle, then slice off
/// round(test_fraction * N) test pairs. Each side keeps corpus order.
/// Throws std::invalid_argument on |pairs| < 2 or fraction outside (0,1).
CorpusSplit split_corpus(const std::vector<SentencePair>& pairs, double test_fraction,
                         std::int64_t seed);

// JSONL: one {"english","mambai","score","section"} object per line.
std::vector<SentencePair> pairs_from_jsonl(const std::string& jsonl_text);
std::string pairs_to_jsonl(const std::vector<SentencePair>& pairs);

}  // namespace mambai::align
