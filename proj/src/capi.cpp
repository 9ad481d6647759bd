#include "mambai/capi.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mambai/align.hpp"
#include "mambai/analysis.hpp"
#include "mambai/extract.hpp"
#include "mambai/llm.hpp"
#include "mambai/metrics.hpp"
#include "mambai/prompting.hpp"
#include "mambai/retrieval.hpp"
#include "mambai/runner.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << content;
  if (!out) throw std::ios_base::failure("short write to " + path);
}

mambai_status status_for(const std::exception& e) {
  if (dynamic_cast<const std::ios_base::failure*>(&e)) return MAMBAI_ERR_IO;
  if (dynamic_cast<const json::exception*>(&e)) return MAMBAI_ERR_PARSE;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return MAMBAI_ERR_INVALID_ARGUMENT;
  if (const auto* g = dynamic_cast<const mambai::llm::GatewayError*>(&e)) {
    switch (g->kind()) {
      case mambai::llm::GatewayErrorKind::transport: return MAMBAI_ERR_TRANSPORT;
      case mambai::llm::GatewayErrorKind::protocol: return MAMBAI_ERR_PROTOCOL;
      case mambai::llm::GatewayErrorKind::request: return MAMBAI_ERR_REQUEST;
      case mambai::llm::GatewayErrorKind::config: return MAMBAI_ERR_CONFIG;
      case mambai::llm::GatewayErrorKind::empty_translation: return MAMBAI_ERR_EMPTY_TRANSLATION;
    }
  }
  return MAMBAI_ERR_INTERNAL;
}

template <typename Fn>
mambai_status guarded(Fn&& fn) {
  try {
    fn();
    return MAMBAI_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return status_for(e);
  } catch (...) {
    set_error("unknown error");
    return MAMBAI_ERR_INTERNAL;
  }
}

mambai_status require(bool ok, const char* message) {
  if (ok) return MAMBAI_OK;
  set_error(message);
  return MAMBAI_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct mambai_dict {
  std::vector<mambai::extract::DictionaryEntry> entries;
};

struct mambai_corpus {
  std::vector<mambai::align::SentencePair> pairs;
};

struct mambai_index {
  mambai::retrieval::TfidfIndex index;
};

extern "C" {

const char* mambai_last_error(void) { return g_last_error.c_str(); }

void mambai_string_free(char* s) { std::free(s); }

const char* mambai_version(void) { return "0.1.0"; }

mambai_status mambai_dict_load(const char* path, mambai_dict** out) {
  if (auto s = require(path && out, "dict_load: null argument")) return s;
  return guarded([&] {
    auto handle = std::make_unique<mambai_dict>();
    handle->entries = mambai::extract::dictionary_from_json(read_file(path));
    *out = handle.release();
  });
}

size_t mambai_dict_size(const mambai_dict* dict) { return dict ? dict->entries.size() : 0; }

mambai_status mambai_dict_get(const mambai_dict* dict, size_t i, const char** entry,
                              const char** translation, const char** part_of_speech) {
  if (auto s = require(dict, "dict_get: null handle")) return s;
  if (auto s = require(i < dict->entries.size(), "dict_get: index out of range")) return s;
  const auto& e = dict->entries[i];
  if (entry) *entry = e.entry.c_str();
  if (translation) *translation = e.translation.c_str();
  if (part_of_speech) *part_of_speech = e.part_of_speech ? e.part_of_speech->c_str() : nullptr;
  return MAMBAI_OK;
}

void mambai_dict_free(mambai_dict* dict) { delete dict; }

mambai_status mambai_corpus_load(const char* path, mambai_corpus** out) {
  if (auto s = require(path && out, "corpus_load: null argument")) return s;
  return guarded([&] {
    auto handle = std::make_unique<mambai_corpus>();
    handle->pairs = mambai::align::pairs_from_jsonl(read_file(path));
    *out = handle.release();
  });
}

size_t mambai_corpus_size(const mambai_corpus* corpus) { return corpus ? corpus->pairs.size() : 0; }

mambai_status mambai_corpus_get(const mambai_corpus* corpus, size_t i, const char** english,
                                const char** mambai_side, double* score, const char** section) {
  if (auto s = require(corpus, "corpus_get: null handle")) return s;
  if (auto s = require(i < corpus->pairs.size(), "corpus_get: index out of range")) return s;
  const auto& p = corpus->pairs[i];
  if (english) *english = p.english.c_str();
  if (mambai_side) *mambai_side = p.mambai.c_str();
  if (score) *score = p.score;
  if (section) *section = p.section.c_str();
  return MAMBAI_OK;
}

void mambai_corpus_free(mambai_corpus* corpus) { delete corpus; }

mambai_status mambai_index_build(const mambai_corpus* train, mambai_index** out) {
  if (auto s = require(train && out, "index_build: null argument")) return s;
  return guarded([&] {
    auto handle = std::make_unique<mambai_index>();
    handle->index = mambai::retrieval::build_tfidf_index(train->pairs);
    *out = handle.release();
  });
}

mambai_status mambai_index_load(const char* path, mambai_index** out) {
  if (auto s = require(path && out, "index_load: null argument")) return s;
  return guarded([&] {
    auto handle = std::make_unique<mambai_index>();
    handle->index = mambai::retrieval::tfidf_index_from_json(read_file(path));
    *out = handle.release();
  });
}

mambai_status mambai_index_save(const mambai_index* index, const char* path) {
  if (auto s = require(index && path, "index_save: null argument")) return s;
  return guarded([&] { write_file(path, mambai::retrieval::tfidf_index_to_json(index->index)); });
}

size_t mambai_index_vocab_size(const mambai_index* index) {
  return index ? index->index.vocabulary.size() : 0;
}

size_t mambai_index_doc_count(const mambai_index* index) {
  return index ? index->index.doc_vectors.size() : 0;
}

mambai_status mambai_index_query(const mambai_index* index, const char* query, size_t k,
                                 char** json_out) {
  if (auto s = require(index && query && json_out, "index_query: null argument")) return s;
  return guarded([&] {
    json arr = json::array();
    for (const auto& r : mambai::retrieval::retrieve_tfidf(index->index, query, k)) {
      arr.push_back({{"english", r.pair.english},
                     {"mambai", r.pair.mambai},
                     {"similarity", r.similarity}});
    }
    *json_out = dup_string(arr.dump(2));
  });
}

void mambai_index_free(mambai_index* index) { delete index; }

mambai_status mambai_extract_dictionary(const char* doc_path, const char* pos_pattern,
                                        const char* out_path) {
  if (auto s = require(doc_path && out_path, "extract_dictionary: null argument")) return s;
  return guarded([&] {
    using namespace mambai::extract;
    auto doc = run_document_from_json(read_file(doc_path));
    std::vector<std::string> warnings;
    auto entries = parse_dictionary(doc, pos_pattern ? pos_pattern : kDefaultPosPattern, &warnings);
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    write_file(out_path, dictionary_to_json(denormalize_translations(entries)));
  });
}

mambai_status mambai_extract_sections(const char* doc_path, const char* out_path) {
  if (auto s = require(doc_path && out_path, "extract_sections: null argument")) return s;
  return guarded([&] {
    using namespace mambai::extract;
    auto doc = run_document_from_json(read_file(doc_path));
    write_file(out_path, sections_to_json(segment_bilingual_sections(doc)));
  });
}

mambai_status mambai_align_corpus(const char* sections_path, const char* dict_path,
                                  double score_threshold, const char* out_path) {
  if (auto s = require(sections_path && dict_path && out_path, "align: null argument")) return s;
  return guarded([&] {
    auto sections = mambai::extract::sections_from_json(read_file(sections_path));
    auto dict = mambai::extract::dictionary_from_json(read_file(dict_path));
    mambai::align::AlignConfig cfg;
    cfg.score_threshold = score_threshold;
    auto pairs = mambai::align::align_sections(sections, dict, cfg);
    write_file(out_path, mambai::align::pairs_to_jsonl(
                             mambai::align::filter_pairs(pairs, cfg.score_threshold)));
  });
}

mambai_status mambai_split_corpus(const char* corpus_path, double test_fraction, int64_t seed,
                                  const char* train_out_path, const char* test_out_path) {
  if (auto s = require(corpus_path && train_out_path && test_out_path, "split: null argument"))
    return s;
  return guarded([&] {
    auto pairs = mambai::align::pairs_from_jsonl(read_file(corpus_path));
    auto split = mambai::align::split_corpus(pairs, test_fraction, seed);
    write_file(train_out_path, mambai::align::pairs_to_jsonl(split.train));
    write_file(test_out_path, mambai::align::pairs_to_jsonl(split.test));
  });
}

mambai_status mambai_build_prompt(const char* train_path, const char* dict_path, int n_tfidf,
                                  int n_embed, int use_dict, const char* input, char** prompt_out) {
  if (auto s = require(train_path && input && prompt_out, "build_prompt: null argument")) return s;
  if (auto s = require(n_tfidf >= 0 && n_embed >= 0, "build_prompt: negative retrieval count"))
    return s;
  if (auto s = require(!use_dict || dict_path, "build_prompt: use_dict without a dictionary"))
    return s;
  return guarded([&] {
    using namespace mambai;
    auto train = align::pairs_from_jsonl(read_file(train_path));

    std::vector<retrieval::RetrievedExample> from_tfidf, from_embed;
    if (n_tfidf > 0) {
      auto index = retrieval::build_tfidf_index(train);
      from_tfidf = retrieval::retrieve_tfidf(index, input, static_cast<std::size_t>(2 * n_tfidf));
    }
    if (n_embed > 0) {
      retrieval::HashedTrigramProvider provider;
      auto store = retrieval::build_embedding_store(train, provider);
      from_embed =
          retrieval::retrieve_semantic(store, provider, input, static_cast<std::size_t>(2 * n_embed));
    }
    auto merged = retrieval::merge_examples(from_tfidf, from_embed, static_cast<std::size_t>(n_tfidf),
                                            static_cast<std::size_t>(n_embed));

    prompting::PromptSpec spec;
    for (const auto& ex : merged) spec.examples.emplace_back(ex.pair.english, ex.pair.mambai);
    if (use_dict) {
      auto dict = extract::dictionary_from_json(read_file(dict_path));
      for (const auto& entry : retrieval::lookup_dictionary(input, dict))
        spec.dict_entries.emplace_back(entry.entry, entry.translation);
    }
    spec.input = input;
    *prompt_out = dup_string(prompting::build_prompt(spec));
  });
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

mambai_status mambai_evaluate_files(const char* hyp_path, const char* ref_path,
                                    const char* report_out_path, double* bleu_out,
                                    double* chrf_out, double* chrf_pp_out) {
  if (auto s = require(hyp_path && ref_path, "evaluate: null argument")) return s;
  return guarded([&] {
    auto hyps = read_lines(hyp_path);
    auto refs = read_lines(ref_path);
    auto report = mambai::metrics::evaluate(hyps, refs);
    if (report_out_path) {
      json j = {{"bleu", report.bleu},
                {"chrf", report.chrf},
                {"chrf_pp", report.chrf_pp},
                {"n_sentences", report.n_sentences}};
      write_file(report_out_path, j.dump(2));
    }
    if (bleu_out) *bleu_out = report.bleu;
    if (chrf_out) *chrf_out = report.chrf;
    if (chrf_pp_out) *chrf_pp_out = report.chrf_pp;
  });
}

mambai_status mambai_analyze_similarity(const char* train_path, const char* test_path,
                                        const char* side, const char* method,
                                        const char* aggregation, const char* report_out_path,
                                        double* score_out) {
  if (auto s = require(train_path && test_path && side && method, "analyze: null argument"))
    return s;
  const std::string side_s = side, method_s = method;
  const std::string agg_s = aggregation ? aggregation : "mean_all";
  if (auto s = require(side_s == "eng" || side_s == "mgm", "analyze: side must be eng or mgm"))
    return s;
  if (auto s = require(method_s == "tfidf" || method_s == "semantic",
                       "analyze: method must be tfidf or semantic"))
    return s;
  if (auto s = require(agg_s == "mean_all" || agg_s == "mean_max",
                       "analyze: aggregation must be mean_all or mean_max"))
    return s;
  return guarded([&] {
    using namespace mambai;
    auto train = align::pairs_from_jsonl(read_file(train_path));
    auto test = align::pairs_from_jsonl(read_file(test_path));
    auto pick = [&](const std::vector<align::SentencePair>& pairs) {
      std::vector<std::string> out;
      out.reserve(pairs.size());
      for (const auto& p : pairs) out.push_back(side_s == "eng" ? p.english : p.mambai);
      return out;
    };
    retrieval::HashedTrigramProvider provider;
    const auto method_e = method_s == "tfidf" ? analysis::SimilarityMethod::tfidf
                                              : analysis::SimilarityMethod::semantic;
    const auto agg_e =
        agg_s == "mean_all" ? analysis::Aggregation::mean_all : analysis::Aggregation::mean_max;
    double score =
        analysis::mean_pairwise_similarity(pick(test), pick(train), method_e, &provider, agg_e);
    if (report_out_path) {
      analysis::SimilarityReport report;
      report.rows.push_back({"Test", "Train", side_s, method_s == "tfidf" ? "tfidf" : "semantic",
                             score});
      write_file(report_out_path, analysis::report_to_json(report));
    }
    if (score_out) *score_out = score;
  });
}

mambai_status mambai_run_grid(const char* config_path, const char* mock_path, const char* out_dir,
                              int* gateway_calls_out) {
  if (auto s = require(config_path && out_dir, "run_grid: null argument")) return s;
  return guarded([&] {
    auto outcome =
        mambai::runner::run_grid_files(config_path, mock_path ? mock_path : "", out_dir);
    if (gateway_calls_out) *gateway_calls_out = outcome.gateway_calls;
  });
}

mambai_status mambai_parse_translation(const char* raw_text, char** out) {
  if (auto s = require(raw_text && out, "parse_translation: null argument")) return s;
  return guarded([&] { *out = dup_string(mambai::llm::parse_translation(raw_text)); });
}

mambai_status mambai_tokenize(const char* input, char** json_out) {
  if (auto s = require(input && json_out, "tokenize: null argument")) return s;
  return guarded([&] {
    json arr = mambai::text::tokenize(input);
    *json_out = dup_string(arr.dump());
  });
}

}  // extern "C"
