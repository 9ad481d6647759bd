#include "mambai/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

using nlohmann::json;

namespace mambai::retrieval {

namespace {

SparseVector normalized(std::map<std::uint32_t, double> weights) {
  double sq = 0.0;
  for (const auto& [dim, w] : weights) sq += w * w;
  SparseVector v;
  v.reserve(weights.size());
  if (sq <= 0.0) {
    for (const auto& [dim, w] : weights) v.emplace_back(dim, w);
    return v;  // all-OOV / empty: zero vector
  }
  const double norm = std::sqrt(sq);
  for (const auto& [dim, w] : weights) v.emplace_back(dim, w / norm);
  return v;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return dot;
}

std::vector<RetrievedExample> take_top_k(std::vector<std::pair<double, std::size_t>> scored,
                                         const std::vector<align::SentencePair>& pairs,
                                         std::size_t k, RetrievalSource source) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (k > scored.size()) k = scored.size();
  std::vector<RetrievedExample> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.push_back(RetrievedExample{pairs[scored[i].second], scored[i].first, source});
  return out;
}

}  // namespace

SparseVector TfidfIndex::vectorize(const std::string& query) const {
  std::map<std::uint32_t, double> weights;
  for (const auto& tok : tokenize(query)) {
    auto it = vocabulary.find(tok);
    if (it == vocabulary.end()) continue;
    weights[it->second] += idf[it->second];
  }
  return normalized(std::move(weights));
}

TfidfIndex build_tfidf_index(const std::vector<align::SentencePair>& train) {
  if (train.empty()) throw std::invalid_argument("build_tfidf_index: empty training set");

  TfidfIndex index;
  index.pairs = train;

  std::vector<std::vector<std::string>> docs;
  docs.reserve(train.size());
  for (const auto& p : train) docs.push_back(tokenize(p.english));

  // vocabulary in first-seen order, document frequencies
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string> uniq(doc.begin(), doc.end());
    for (const auto& tok : uniq) {
      if (!index.vocabulary.count(tok))
        index.vocabulary.emplace(tok, static_cast<std::uint32_t>(index.vocabulary.size()));
      ++df[tok];
    }
  }

  const double n_docs = static_cast<double>(docs.size());
  index.idf.assign(index.vocabulary.size(), 0.0);
  for (const auto& [tok, dim] : index.vocabulary)
    index.idf[dim] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[tok]))) + 1.0;

  index.doc_vectors.reserve(docs.size());
  for (const auto& doc : docs) {
    std::map<std::uint32_t, double> weights;
    for (const auto& tok : doc) {
      const auto dim = index.vocabulary.at(tok);
      weights[dim] += index.idf[dim];  // raw tf accumulates one idf per occurrence
    }
    index.doc_vectors.push_back(normalized(std::move(weights)));
  }
  return index;
}

std::vector<RetrievedExample> retrieve_tfidf(const TfidfIndex& index, const std::string& query,
                                             std::size_t k) {
  if (k == 0) return {};
  const SparseVector q = index.vectorize(query);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(index.doc_vectors.size());
  for (std::size_t i = 0; i < index.doc_vectors.size(); ++i)
    scored.emplace_back(sparse_dot(q, index.doc_vectors[i]), i);
  return take_top_k(std::move(scored), index.pairs, k, RetrievalSource::tfidf);
}

std::vector<std::vector<double>> HashedTrigramProvider::embed(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& s : texts) {
    std::vector<double> v(kDim, 0.0);
    for (const auto& tok : tokenize(s)) {
      auto add_gram = [&v](const std::string& gram) {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
        for (unsigned char c : gram) {
          h ^= c;
          h *= 1099511628211ULL;
        }
        const double sign = (h & 1ULL) ? -1.0 : 1.0;
        v[(h >> 1) % kDim] += sign;
      };
      if (tok.size() < 3) {
        add_gram(tok);
      } else {
        for (std::size_t i = 0; i + 3 <= tok.size(); ++i) add_gram(tok.substr(i, 3));
      }
    }
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq > 0.0) {
      const double norm = std::sqrt(sq);
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

class RequestSlots {
 public:
  explicit RequestSlots(int limit) : limit_(limit) {}
  void acquire() {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < limit_; });
    ++in_flight_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --in_flight_;
    }
    cv_.notify_one();
  }

 private:
  int limit_;
  int in_flight_ = 0;
  std::mutex mutex_;
  std::condition_variable cv_;
};

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string provider_id,
                                             int timeout_s, int max_in_flight)
    : base_url_(std::move(base_url)),
      id_(std::move(provider_id)),
      timeout_s_(timeout_s),
      slots_(std::make_shared<RequestSlots>(std::max(1, max_in_flight))) {}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed(const std::vector<std::string>& texts) {
  slots_->acquire();
  struct Release {
    RequestSlots* slots;
    ~Release() { slots->release(); }
  } release{slots_.get()};

  httplib::Client client(base_url_);
  client.set_read_timeout(timeout_s_, 0);
  client.set_connection_timeout(timeout_s_, 0);
  json body = {{"texts", texts}};
  auto res = client.Post("/embed", body.dump(), "application/json");
  if (!res)
    throw std::runtime_error("embedding provider: no response from " + base_url_);
  if (res->status != 200)
    throw std::runtime_error("embedding provider: HTTP " + std::to_string(res->status));
  json parsed = json::parse(res->body);
  std::vector<std::vector<double>> out;
  for (const auto& row : parsed.at("vectors")) {
    std::vector<double> v = row.get<std::vector<double>>();
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq > 0.0) {
      const double norm = std::sqrt(sq);
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  if (out.size() != texts.size())
    throw std::runtime_error("embedding provider: vector count mismatch");
  return out;
}

EmbeddingStore build_embedding_store(const std::vector<align::SentencePair>& train,
                                     EmbeddingProvider& provider) {
  EmbeddingStore store;
  store.provider_id = provider.id();
  store.pairs = train;
  std::vector<std::string> texts;
  texts.reserve(train.size());
  for (const auto& p : train) texts.push_back(p.english);
  store.vectors = provider.embed(texts);
  return store;
}

std::vector<RetrievedExample> retrieve_semantic(const EmbeddingStore& store,
                                                EmbeddingProvider& provider,
                                                const std::string& query, std::size_t k) {
  if (provider.id() != store.provider_id)
    throw std::invalid_argument("retrieve_semantic: provider '" + provider.id() +
                                "' does not match store '" + store.provider_id + "'");
  if (k == 0) return {};
  auto q = provider.embed({query});
  if (q.size() != 1) throw std::runtime_error("retrieve_semantic: provider returned no vector");
  const auto& qv = q[0];

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(store.vectors.size());
  for (std::size_t i = 0; i < store.vectors.size(); ++i) {
    const auto& dv = store.vectors[i];
    const std::size_t dims = std::min(qv.size(), dv.size());
    double dot = 0.0;
    for (std::size_t d = 0; d < dims; ++d) dot += qv[d] * dv[d];
    scored.emplace_back(dot, i);
  }
  return take_top_k(std::move(scored), store.pairs, k, RetrievalSource::embedding);
}

std::vector<RetrievedExample> merge_examples(const std::vector<RetrievedExample>& tfidf_results,
                                             const std::vector<RetrievedExample>& embedding_results,
                                             std::size_t k_tfidf, std::size_t k_embed) {
  std::vector<RetrievedExample> out;
  std::set<std::pair<std::string, std::string>> seen;

  auto take = [&](const std::vector<RetrievedExample>& candidates, std::size_t want) {
    std::size_t taken = 0;
    for (const auto& ex : candidates) {
      if (taken >= want) break;
      auto key = std::make_pair(ex.pair.english, ex.pair.mambai);
      if (!seen.insert(key).second) continue;  // duplicate: promote the next candidate
      out.push_back(ex);
      ++taken;
    }
  };

  take(tfidf_results, k_tfidf);
  take(embedding_results, k_embed);
  return out;
}

std::vector<extract::DictionaryEntry> lookup_dictionary(const std::string& input,
                                                        const std::vector<extract::DictionaryEntry>& dict) {
  const auto tokens = tokenize(input);
  std::vector<extract::DictionaryEntry> out;
  if (tokens.empty()) return out;

  struct Headword {
    std::vector<std::string> tokens;
    const extract::DictionaryEntry* entry;
  };
  std::unordered_map<std::string, std::vector<Headword>> by_first;
  for (const auto& e : dict) {
    auto head = tokenize(e.entry);
    if (head.empty()) continue;
    by_first[head[0]].push_back(Headword{std::move(head), &e});
  }

  auto occurs_contiguously = [&tokens](const std::vector<std::string>& seq) {
    if (seq.size() > tokens.size()) return false;
    for (std::size_t start = 0; start + seq.size() <= tokens.size(); ++start) {
      bool all = true;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (tokens[start + i] != seq[i]) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  };

  std::set<std::string> seen_tokens;
  std::set<const extract::DictionaryEntry*> emitted;
  for (const auto& tok : tokens) {
    if (!seen_tokens.insert(tok).second) continue;
    auto it = by_first.find(tok);
    if (it == by_first.end()) continue;
    for (const auto& head : it->second) {
      if (emitted.count(head.entry)) continue;
      if (head.tokens.size() == 1 || occurs_contiguously(head.tokens)) {
        out.push_back(*head.entry);
        emitted.insert(head.entry);
      }
    }
  }
  return out;
}

std::string tfidf_index_to_json(const TfidfIndex& index) {
  json vocab = json::object();
  for (const auto& [tok, dim] : index.vocabulary) vocab[tok] = dim;
  json rows = json::array();
  for (const auto& v : index.doc_vectors) {
    json row = json::array();
    for (const auto& [dim, w] : v) row.push_back(json::array({dim, w}));
    rows.push_back(std::move(row));
  }
  json pairs = json::array();
  for (const auto& p : index.pairs)
    pairs.push_back({{"english", p.english}, {"mambai", p.mambai}, {"score", p.score}, {"section", p.section}});
  return json{{"vocabulary", vocab}, {"idf", index.idf}, {"rows", rows}, {"pairs", pairs}}.dump();
}

TfidfIndex tfidf_index_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  TfidfIndex index;
  for (const auto& [tok, dim] : j.at("vocabulary").items())
    index.vocabulary.emplace(tok, dim.get<std::uint32_t>());
  index.idf = j.at("idf").get<std::vector<double>>();
  for (const auto& row : j.at("rows")) {
    SparseVector v;
    for (const auto& cell : row)
      v.emplace_back(cell.at(0).get<std::uint32_t>(), cell.at(1).get<double>());
    index.doc_vectors.push_back(std::move(v));
  }
  for (const auto& p : j.at("pairs")) {
    align::SentencePair pair;
    pair.english = p.at("english").get<std::string>();
    pair.mambai = p.at("mambai").get<std::string>();
    pair.score = p.value("score", 0.0);
    pair.section = p.value("section", std::string{});
    index.pairs.push_back(std::move(pair));
  }
  return index;
}

}  // namespace mambai::retrieval
