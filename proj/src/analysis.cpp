#include "mambai/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

using nlohmann::json;

namespace mambai::analysis {

namespace {

// joint-corpus tf-idf vectors, unit-normalized, dense over the joint vocab
std::vector<std::vector<double>> joint_tfidf_vectors(const std::vector<std::string>& sentences) {
  std::map<std::string, std::size_t> vocab;
  std::vector<std::vector<std::string>> docs;
  docs.reserve(sentences.size());
  for (const auto& s : sentences) {
    docs.push_back(retrieval::tokenize(s));
    for (const auto& tok : docs.back())
      if (!vocab.count(tok)) vocab.emplace(tok, vocab.size());
  }
  std::vector<double> df(vocab.size(), 0.0);
  for (const auto& doc : docs) {
    std::set<std::string> uniq(doc.begin(), doc.end());
    for (const auto& tok : uniq) df[vocab[tok]] += 1.0;
  }
  const double n = static_cast<double>(docs.size());
  std::vector<double> idf(vocab.size());
  for (std::size_t d = 0; d < idf.size(); ++d) idf[d] = std::log((1.0 + n) / (1.0 + df[d])) + 1.0;

  std::vector<std::vector<double>> vectors;
  vectors.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<double> v(vocab.size(), 0.0);
    for (const auto& tok : doc) {
      const auto d = vocab[tok];
      v[d] += idf[d];
    }
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq > 0.0) {
      const double norm = std::sqrt(sq);
      for (double& x : v) x /= norm;
    }
    vectors.push_back(std::move(v));
  }
  return vectors;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double mean_pairwise_similarity(const std::vector<std::string>& set_a,
                                const std::vector<std::string>& set_b, SimilarityMethod method,
                                retrieval::EmbeddingProvider* provider, Aggregation aggregation) {
  if (set_a.empty() || set_b.empty())
    throw std::invalid_argument("mean_pairwise_similarity: empty sentence set");

  std::vector<std::vector<double>> va, vb;
  if (method == SimilarityMethod::tfidf) {
    std::vector<std::string> joint = set_a;
    joint.insert(joint.end(), set_b.begin(), set_b.end());
    auto vectors = joint_tfidf_vectors(joint);
    va.assign(vectors.begin(), vectors.begin() + static_cast<std::ptrdiff_t>(set_a.size()));
    vb.assign(vectors.begin() + static_cast<std::ptrdiff_t>(set_a.size()), vectors.end());
  } else {
    if (!provider)
      throw std::invalid_argument("mean_pairwise_similarity: semantic method needs a provider");
    va = provider->embed(set_a);
    vb = provider->embed(set_b);
  }

  if (aggregation == Aggregation::mean_max) {
    double sum = 0.0;
    for (const auto& a : va) {
      double best = -1.0;
      for (const auto& b : vb) best = std::max(best, dot(a, b));
      sum += best;
    }
    return sum / static_cast<double>(va.size());
  }

  double sum = 0.0;
  for (const auto& a : va)
    for (const auto& b : vb) sum += dot(a, b);
  return sum / (static_cast<double>(va.size()) * static_cast<double>(vb.size()));
}

std::string report_to_json(const SimilarityReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"similarity", r.set_a + " x " + r.set_b},
                    {"lang", r.language},
                    {"method", r.method},
                    {"score", r.score}});
  }
  return json{{"rows", rows}}.dump(2);
}

}  // namespace mambai::analysis
