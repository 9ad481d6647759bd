#pragma once

#include <string>
#include <vector>

namespace mambai::metrics {

enum class BleuSmoothing { exp_floor, none };

struct MetricConfig {
  int bleu_max_order = 4;
  BleuSmoothing bleu_smoothing = BleuSmoothing::exp_floor;
  int chrf_char_order = 6;
  int chrf_word_order = 0;  // 0 = ChrF, 2 = ChrF++
  double chrf_beta = 2.0;

  void validate() const;  // throws std::invalid_argument
};

struct MetricReport {
  double bleu = 0.0;
  double chrf = 0.0;
  double chrf_pp = 0.0;
  int n_sentences = 0;
};

/// Corpus BLEU on the 0-100 scale: clipped n-gram precisions pooled over
/// the corpus, geometric mean over orders 1..max, times the brevity
/// penalty exp(min(0, 1 - ref_len/hyp_len)). Hypotheses and references go
/// through the shared tokenizer. With exp_floor smoothing a zero-match
/// order k contributes 1/(2^j * total_k) where j counts zero-match orders
/// so far; orders with no hypothesis n-grams at all are dropped from the
/// geometric mean.
/// Throws std::invalid_argument on empty or mismatched inputs.
double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const MetricConfig& cfg = {});

/// Corpus ChrF on the 0-100 scale: character n-gram precision/recall counts
/// (whitespace removed from the character stream) pooled over the corpus
/// for n = 1..char_order, plus word n-grams for n = 1..word_order when
/// word_order > 0 (chrF++-style punctuation-separated words). Precisions
/// and recalls are averaged over orders that have any reference or
/// hypothesis n-grams, then combined as F_beta.
double chrf(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const MetricConfig& cfg = {});

/// BLEU + ChrF + ChrF++ with the config's char order/beta.
MetricReport evaluate(const std::vector<std::string>& hypotheses,
                      const std::vector<std::string>& references, const MetricConfig& cfg = {});

/// chrF++'s word tokenization: split on whitespace, then detach one
/// leading or trailing punctuation character from tokens longer than 1.
std::vector<std::string> chrf_words(const std::string& s);

}  // namespace mambai::metrics
