#pragma once

#include <string>
#include <vector>

#include "mambai/retrieval.hpp"

namespace mambai::analysis {

enum class SimilarityMethod { tfidf, semantic };

/// Mean over all |A|x|B| cross-set pairs (mean_all) or mean over A of the
/// best match in B (mean_max; not symmetric).
enum class Aggregation { mean_all, mean_max };

struct SimilarityRow {
  std::string set_a;
  std::string set_b;
  std::string language;  // "eng" | "mgm"
  std::string method;    // "tfidf" | "semantic"
  double score = 0.0;
};

struct SimilarityReport {
  std::vector<SimilarityRow> rows;
};

/// Cross-set cosine similarity. For tfidf a joint vocabulary/IDF is fit
/// over set_a + set_b; for semantic the provider embeds both sets.
/// Throws std::invalid_argument when a set is empty.
double mean_pairwise_similarity(const std::vector<std::string>& set_a,
                                const std::vector<std::string>& set_b, SimilarityMethod method,
                                retrieval::EmbeddingProvider* provider = nullptr,
                                Aggregation aggregation = Aggregation::mean_all);

std::string report_to_json(const SimilarityReport& report);

}  // namespace mambai::analysis
