#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "mambai/align.hpp"
#include "mambai/extract.hpp"
#include "mambai/text.hpp"

namespace mambai::retrieval {

using text::tokenize;

/// Sparse vector sorted by dimension; kept in ascending order so dot
/// products accumulate in a canonical order.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

struct TfidfIndex {
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<double> idf;               // idf[dim] = ln((1+N)/(1+df)) + 1
  std::vector<SparseVector> doc_vectors; // L2-normalized rows
  std::vector<align::SentencePair> pairs;

  SparseVector vectorize(const std::string& query) const;  // OOV ignored, normalized
};

enum class RetrievalSource { tfidf, embedding };

struct RetrievedExample {
  align::SentencePair pair;
  double similarity = 0.0;
  RetrievalSource source = RetrievalSource::tfidf;
};

/// Raw term frequency x smoothed IDF over the English sides, L2-normalized.
/// Throws std::invalid_argument on an empty training set.
TfidfIndex build_tfidf_index(const std::vector<align::SentencePair>& train);

/// Top-k by cosine, ties broken by lower training index. k > N returns all.
std::vector<RetrievedExample> retrieve_tfidf(const TfidfIndex& index, const std::string& query,
                                             std::size_t k);

/// Sentence embedding provider: returns one unit vector per input text.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic hermetic provider: token character trigrams hashed with
/// 64-bit FNV-1a into 512 dims, signed by hash parity, L2-normalized.
class HashedTrigramProvider final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDim = 512;
  std::string id() const override { return "hashed-trigram-512"; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
};

/// Client for a remote embedding service speaking
/// POST /embed {"texts": [...]} -> {"vectors": [[...], ...]}.
/// At most max_in_flight requests run concurrently across threads.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string provider_id, int timeout_s = 60,
                        int max_in_flight = 4);
  std::string id() const override { return id_; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

 private:
  std::string base_url_;
  std::string id_;
  int timeout_s_;
  std::shared_ptr<class RequestSlots> slots_;
};

struct EmbeddingStore {
  std::string provider_id;
  std::vector<std::vector<double>> vectors;  // unit-normalized, one per pair
  std::vector<align::SentencePair> pairs;
};

EmbeddingStore build_embedding_store(const std::vector<align::SentencePair>& train,
                                     EmbeddingProvider& provider);

/// Embeds the query with the provider (which must match the store's
/// provider_id) and returns top-k by dot product, ties by lower index.
/// Throws std::runtime_error for provider failures, std::invalid_argument
/// for a provider_id mismatch.
std::vector<RetrievedExample> retrieve_semantic(const EmbeddingStore& store,
                                                EmbeddingProvider& provider,
                                                const std::string& query, std::size_t k);

/// TF-IDF block first, then embedding block; duplicates (same English +
/// Mambai text) are dropped and replaced from the same source's overfetched
/// tail. Callers overfetch by 2x to keep blocks full.
std::vector<RetrievedExample> merge_examples(const std::vector<RetrievedExample>& tfidf_results,
                                             const std::vector<RetrievedExample>& embedding_results,
                                             std::size_t k_tfidf, std::size_t k_embed);

/// Entries whose headword matches a token of the input (first-occurrence
/// token order, tokens deduplicated, all senses kept). Multi-word headwords
/// match contiguous token runs.
std::vector<extract::DictionaryEntry> lookup_dictionary(const std::string& input,
                                                        const std::vector<extract::DictionaryEntry>& dict);

// Index persistence (vocabulary, idf array, sparse rows, pairs).
std::string tfidf_index_to_json(const TfidfIndex& index);
TfidfIndex tfidf_index_from_json(const std::string& json_text);

}  // namespace mambai::retrieval
