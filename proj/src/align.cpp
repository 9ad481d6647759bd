#include "mambai/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "mambai/text.hpp"

using nlohmann::json;

namespace mambai::align {

namespace {
constexpr double kMinProb = 1e-12;

double safe_neg_log(double p) { return -std::log(std::max(p, kMinProb)); }
}  // namespace

int source_arity(MatchType t) {
  switch (t) {
    case MatchType::k11: return 1;
    case MatchType::k10: return 1;
    case MatchType::k01: return 0;
    case MatchType::k21: return 2;
    case MatchType::k12: return 1;
    case MatchType::k22: return 2;
  }
  return 0;
}

int target_arity(MatchType t) {
  switch (t) {
    case MatchType::k11: return 1;
    case MatchType::k10: return 0;
    case MatchType::k01: return 1;
    case MatchType::k21: return 1;
    case MatchType::k12: return 2;
    case MatchType::k22: return 2;
  }
  return 0;
}

const char* match_type_name(MatchType t) {
  switch (t) {
    case MatchType::k11: return "1-1";
    case MatchType::k10: return "1-0";
    case MatchType::k01: return "0-1";
    case MatchType::k21: return "2-1";
    case MatchType::k12: return "1-2";
    case MatchType::k22: return "2-2";
  }
  return "?";
}

void AlignConfig::validate() const {
  if (variance <= 0.0) throw std::invalid_argument("align config: variance must be > 0");
  if (lex_weight < 0.0 || lex_weight > 1.0)
    throw std::invalid_argument("align config: lex_weight must be in [0,1]");
  double sum = 0.0;
  for (double p : match_priors) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("align config: prior out of [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 0.02)
    throw std::invalid_argument("align config: match priors must sum to ~1");
  if (insertion_tail_prob <= 0.0 || insertion_tail_prob > 1.0)
    throw std::invalid_argument("align config: insertion tail probability out of (0,1]");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double length_probability(std::size_t src_chars, std::size_t tgt_chars, const AlignConfig& cfg) {
  double delta = (static_cast<double>(tgt_chars) - static_cast<double>(src_chars) * cfg.mean_char_ratio) /
                 std::sqrt(static_cast<double>(src_chars) * cfg.variance);
  // 2*(1 - Phi(|delta|)) == erfc(|delta|/sqrt(2))
  return std::erfc(std::abs(delta) / std::sqrt(2.0));
}

double gale_church_cost(std::size_t src_chars, std::size_t tgt_chars, MatchType type,
                        const AlignConfig& cfg) {
  double prior = cfg.match_priors[static_cast<int>(type)];
  if (type == MatchType::k10 || type == MatchType::k01)
    return safe_neg_log(prior) + safe_neg_log(cfg.insertion_tail_prob);
  if (src_chars == 0 || tgt_chars == 0)
    throw std::invalid_argument("gale_church_cost: two-sided bead with an empty side");
  return safe_neg_log(prior) + safe_neg_log(length_probability(src_chars, tgt_chars, cfg));
}

double lexical_score(const std::string& english, const std::string& mambai,
                     const std::vector<extract::DictionaryEntry>& dict) {
  auto eng_tokens = text::tokenize(english);
  if (eng_tokens.empty()) return 0.0;
  auto mam_tokens = text::tokenize(mambai);
  std::unordered_set<std::string> mam_set(mam_tokens.begin(), mam_tokens.end());

  // single-token headword -> tokenized translations
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> by_headword;
  for (const auto& e : dict) {
    auto head = text::tokenize(e.entry);
    if (head.size() != 1) continue;
    by_headword[head[0]].push_back(text::tokenize(e.translation));
  }

  std::size_t matched = 0;
  for (const auto& tok : eng_tokens) {
    auto it = by_headword.find(tok);
    if (it == by_headword.end()) continue;
    bool hit = false;
    for (const auto& translation : it->second) {
      for (const auto& t : translation) {
        if (mam_set.count(t)) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(eng_tokens.size());
}

namespace {

std::string join_with_space(const std::vector<std::string>& v, std::size_t begin, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) out += " ";
    out += v[begin + i];
  }
  return out;
}

}  // namespace

namespace {

std::size_t span_chars(const std::vector<std::size_t>& lens, std::size_t begin, std::size_t count) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < count; ++i) total += lens[begin + i];
  if (count > 1) total += count - 1;  // one joining space per boundary
  return total;
}

std::vector<std::size_t> codepoint_lengths(const std::vector<std::string>& sentences) {
  std::vector<std::size_t> lens(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) lens[i] = text::codepoint_count(sentences[i]);
  return lens;
}

}  // namespace

AlignmentPath compute_alignment_path(const std::vector<std::string>& english,
                                     const std::vector<std::string>& mambai,
                                     const AlignConfig& cfg) {
  cfg.validate();
  AlignmentPath result;
  if (english.empty() && mambai.empty()) return result;

  const std::size_t n = english.size();
  const std::size_t m = mambai.size();
  const auto eng_len = codepoint_lengths(english);
  const auto mam_len = codepoint_lengths(mambai);

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((n + 1) * (m + 1), kInf);
  std::vector<int> back((n + 1) * (m + 1), -1);
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };

  cost[at(0, 0)] = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      double best = kInf;
      int best_type = -1;
      for (MatchType t : kAllMatchTypes) {
        const std::size_t a = static_cast<std::size_t>(source_arity(t));
        const std::size_t b = static_cast<std::size_t>(target_arity(t));
        if (i < a || j < b) continue;
        double prev = cost[at(i - a, j - b)];
        if (prev == kInf) continue;
        const std::size_t src_chars = span_chars(eng_len, i - a, a);
        const std::size_t tgt_chars = span_chars(mam_len, j - b, b);
        // an all-empty span cannot form a two-sided bead; 1-0/0-1 still applies
        if (a > 0 && b > 0 && (src_chars == 0 || tgt_chars == 0)) continue;
        double c = prev + gale_church_cost(src_chars, tgt_chars, t, cfg);
        if (c < best) {
          best = c;
          best_type = static_cast<int>(t);
        }
      }
      cost[at(i, j)] = best;
      back[at(i, j)] = best_type;
    }
  }

  result.cost = cost[at(n, m)];
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    MatchType t = static_cast<MatchType>(back[at(i, j)]);
    i -= static_cast<std::size_t>(source_arity(t));
    j -= static_cast<std::size_t>(target_arity(t));
    result.beads.push_back(Bead{t, i, j});
  }
  std::reverse(result.beads.begin(), result.beads.end());
  return result;
}

std::vector<SentencePair> align_section(const std::vector<std::string>& english,
                                        const std::vector<std::string>& mambai,
                                        const std::vector<extract::DictionaryEntry>& dict,
                                        const AlignConfig& cfg,
                                        const std::string& section_title) {
  if (english.empty() || mambai.empty()) {
    cfg.validate();
    return {};
  }
  const auto eng_len = codepoint_lengths(english);
  const auto mam_len = codepoint_lengths(mambai);
  const AlignmentPath path = compute_alignment_path(english, mambai, cfg);

  std::vector<SentencePair> pairs;
  for (const Bead& bead : path.beads) {
    const std::size_t a = static_cast<std::size_t>(source_arity(bead.type));
    const std::size_t b = static_cast<std::size_t>(target_arity(bead.type));
    if (a == 0 || b == 0) continue;
    SentencePair p;
    p.english = join_with_space(english, bead.src_begin, a);
    p.mambai = join_with_space(mambai, bead.tgt_begin, b);
    double len_prob = std::min(1.0, length_probability(span_chars(eng_len, bead.src_begin, a),
                                                       span_chars(mam_len, bead.tgt_begin, b), cfg));
    double lex = lexical_score(p.english, p.mambai, dict);
    p.score = cfg.lex_weight * lex + (1.0 - cfg.lex_weight) * len_prob;
    p.section = section_title;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<SentencePair> align_sections(const std::vector<extract::BilingualSection>& sections,
                                         const std::vector<extract::DictionaryEntry>& dict,
                                         const AlignConfig& cfg) {
  std::vector<SentencePair> all;
  for (const auto& sec : sections) {
    auto pairs = align_section(sec.english_sentences, sec.mambai_sentences, dict, cfg, sec.title);
    all.insert(all.end(), pairs.begin(), pairs.end());
  }
  return all;
}

std::vector<SentencePair> filter_pairs(const std::vector<SentencePair>& pairs, double threshold) {
  std::vector<SentencePair> kept;
  for (const auto& p : pairs)
    if (p.score >= threshold) kept.push_back(p);
  return kept;
}

CorpusSplit split_corpus(const std::vector<SentencePair>& pairs, double test_fraction,
                         std::int64_t seed) {
  if (pairs.size() < 2) throw std::invalid_argument("split_corpus: need at least 2 pairs");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("split_corpus: test_fraction must be in (0,1)");

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // explicit Fisher-Yates; std::shuffle output is not portable across
  // standard libraries
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::size_t k = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[k]);
  }

  const std::size_t test_size =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(pairs.size())));

  std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_size));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(test_size), order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  CorpusSplit split;
  split.seed = seed;
  for (std::size_t idx : train_idx) split.train.push_back(pairs[idx]);
  for (std::size_t idx : test_idx) split.test.push_back(pairs[idx]);
  return split;
}

std::vector<SentencePair> pairs_from_jsonl(const std::string& jsonl_text) {
  std::vector<SentencePair> pairs;
  std::size_t pos = 0;
  while (pos < jsonl_text.size()) {
    std::size_t end = jsonl_text.find('\n', pos);
    if (end == std::string::npos) end = jsonl_text.size();
    std::string line = jsonl_text.substr(pos, end - pos);
    pos = end + 1;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line);
    SentencePair p;
    p.english = j.at("english").get<std::string>();
    p.mambai = j.at("mambai").get<std::string>();
    p.score = j.value("score", 0.0);
    p.section = j.value("section", std::string{});
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::string pairs_to_jsonl(const std::vector<SentencePair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json j = {{"english", p.english}, {"mambai", p.mambai}, {"score", p.score}, {"section", p.section}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace mambai::align
