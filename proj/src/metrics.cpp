#include "mambai/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "mambai/text.hpp"

namespace mambai::metrics {

void MetricConfig::validate() const {
  if (bleu_max_order < 1) throw std::invalid_argument("metrics: bleu_max_order must be >= 1");
  if (chrf_char_order < 1) throw std::invalid_argument("metrics: chrf_char_order must be >= 1");
  if (chrf_word_order < 0) throw std::invalid_argument("metrics: chrf_word_order must be >= 0");
  if (chrf_beta <= 0.0) throw std::invalid_argument("metrics: chrf_beta must be > 0");
}

namespace {

void check_inputs(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  if (hyp.empty() || ref.empty()) throw std::invalid_argument("metrics: empty corpus");
  if (hyp.size() != ref.size())
    throw std::invalid_argument("metrics: hypothesis/reference count mismatch");
}

template <typename Seq>
std::map<Seq, std::int64_t> ngram_counts(const std::vector<Seq>& grams) {
  std::map<Seq, std::int64_t> counts;
  for (const auto& g : grams) ++counts[g];
  return counts;
}

// token n-grams as joined keys (tokens cannot contain the separator)
std::vector<std::string> token_ngrams(const std::vector<std::string>& tokens, int n) {
  std::vector<std::string> grams;
  if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return grams;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    grams.push_back(std::move(key));
  }
  return grams;
}

std::vector<std::u32string> char_ngrams(const std::u32string& chars, int n) {
  std::vector<std::u32string> grams;
  if (n <= 0 || chars.size() < static_cast<std::size_t>(n)) return grams;
  for (std::size_t i = 0; i + n <= chars.size(); ++i) grams.push_back(chars.substr(i, n));
  return grams;
}

struct OrderStats {
  std::int64_t hyp = 0;
  std::int64_t ref = 0;
  std::int64_t match = 0;
};

template <typename Seq>
void accumulate(OrderStats& stats, const std::vector<Seq>& hyp_grams,
                const std::vector<Seq>& ref_grams) {
  stats.hyp += static_cast<std::int64_t>(hyp_grams.size());
  stats.ref += static_cast<std::int64_t>(ref_grams.size());
  auto ref_counts = ngram_counts(ref_grams);
  auto hyp_counts = ngram_counts(hyp_grams);
  for (const auto& [gram, count] : hyp_counts) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) stats.match += std::min(count, it->second);
  }
}

std::u32string whitespace_stripped_codepoints(const std::string& s) {
  std::u32string chars = text::decode_utf8(s);
  std::u32string out;
  out.reserve(chars.size());
  for (char32_t c : chars) {
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') continue;
    out.push_back(c);
  }
  return out;
}

bool is_ascii_punct(char32_t c) {
  return c < 0x80 && std::ispunct(static_cast<int>(c));
}

}  // namespace

std::vector<std::string> chrf_words(const std::string& s) {
  std::vector<std::string> words;
  std::u32string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    if (cur.size() > 1 && is_ascii_punct(cur.back())) {
      words.push_back(text::encode_utf8(cur.substr(0, cur.size() - 1)));
      words.push_back(text::encode_utf8(cur.substr(cur.size() - 1)));
    } else if (cur.size() > 1 && is_ascii_punct(cur.front())) {
      words.push_back(text::encode_utf8(cur.substr(0, 1)));
      words.push_back(text::encode_utf8(cur.substr(1)));
    } else {
      words.push_back(text::encode_utf8(cur));
    }
    cur.clear();
  };
  for (char32_t c : text::decode_utf8(s)) {
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return words;
}

double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const MetricConfig& cfg) {
  cfg.validate();
  check_inputs(hypotheses, references);

  const int max_order = cfg.bleu_max_order;
  std::vector<std::int64_t> correct(max_order, 0), total(max_order, 0);
  std::int64_t hyp_len = 0, ref_len = 0;

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp_tokens = text::tokenize(hypotheses[s]);
    const auto ref_tokens = text::tokenize(references[s]);
    hyp_len += static_cast<std::int64_t>(hyp_tokens.size());
    ref_len += static_cast<std::int64_t>(ref_tokens.size());
    for (int n = 1; n <= max_order; ++n) {
      const auto hyp_grams = token_ngrams(hyp_tokens, n);
      const auto ref_grams = token_ngrams(ref_tokens, n);
      total[n - 1] += static_cast<std::int64_t>(hyp_grams.size());
      auto ref_counts = ngram_counts(ref_grams);
      auto hyp_counts = ngram_counts(hyp_grams);
      for (const auto& [gram, count] : hyp_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) correct[n - 1] += std::min(count, it->second);
      }
    }
  }

  if (hyp_len == 0) return 0.0;

  double log_sum = 0.0;
  int effective_order = 0;
  double smooth = 1.0;
  for (int n = 1; n <= max_order; ++n) {
    if (total[n - 1] == 0) break;  // shorter corpus than the order; drop it and the rest
    double precision;
    if (correct[n - 1] == 0) {
      if (cfg.bleu_smoothing == BleuSmoothing::none) return 0.0;
      smooth *= 2.0;
      precision = 1.0 / (smooth * static_cast<double>(total[n - 1]));
    } else {
      precision = static_cast<double>(correct[n - 1]) / static_cast<double>(total[n - 1]);
    }
    log_sum += std::log(precision);
    ++effective_order;
  }
  if (effective_order == 0) return 0.0;

  const double bp =
      std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)));
  return 100.0 * bp * std::exp(log_sum / effective_order);
}

double chrf(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const MetricConfig& cfg) {
  cfg.validate();
  check_inputs(hypotheses, references);

  const int n_char = cfg.chrf_char_order;
  const int n_word = cfg.chrf_word_order;
  std::vector<OrderStats> stats(static_cast<std::size_t>(n_char + n_word));

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp_chars = whitespace_stripped_codepoints(hypotheses[s]);
    const auto ref_chars = whitespace_stripped_codepoints(references[s]);
    for (int n = 1; n <= n_char; ++n)
      accumulate(stats[n - 1], char_ngrams(hyp_chars, n), char_ngrams(ref_chars, n));
    if (n_word > 0) {
      const auto hyp_words = chrf_words(hypotheses[s]);
      const auto ref_words = chrf_words(references[s]);
      for (int n = 1; n <= n_word; ++n)
        accumulate(stats[n_char + n - 1], token_ngrams(hyp_words, n), token_ngrams(ref_words, n));
    }
  }

  double prec_sum = 0.0, rec_sum = 0.0;
  int included = 0;
  for (const auto& st : stats) {
    if (st.ref == 0) continue;  // order has no reference n-grams
    prec_sum += st.hyp > 0 ? static_cast<double>(st.match) / static_cast<double>(st.hyp) : 0.0;
    rec_sum += static_cast<double>(st.match) / static_cast<double>(st.ref);
    ++included;
  }
  if (included == 0) return 0.0;

  const double precision = prec_sum / included;
  const double recall = rec_sum / included;
  const double b2 = cfg.chrf_beta * cfg.chrf_beta;
  const double denom = b2 * precision + recall;
  if (denom <= 0.0) return 0.0;
  return 100.0 * (1.0 + b2) * precision * recall / denom;
}

MetricReport evaluate(const std::vector<std::string>& hypotheses,
                      const std::vector<std::string>& references, const MetricConfig& cfg) {
  MetricReport report;
  report.n_sentences = static_cast<int>(hypotheses.size());
  report.bleu = bleu(hypotheses, references, cfg);

  MetricConfig chrf_cfg = cfg;
  chrf_cfg.chrf_word_order = 0;
  report.chrf = chrf(hypotheses, references, chrf_cfg);
  chrf_cfg.chrf_word_order = 2;
  report.chrf_pp = chrf(hypotheses, references, chrf_cfg);
  return report;
}

}  // namespace mambai::metrics
