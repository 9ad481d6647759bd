/* C interface to the mambai core library.
 *
 * All functions return MAMBAI_OK (0) on success; on failure they return a
 * nonzero status and leave a message retrievable with mambai_last_error()
 * (thread-local). Strings returned through out-parameters are owned by the
 * caller and must be released with mambai_string_free(). Opaque handles are
 * released with their matching *_free() function.
 */
#ifndef MAMBAI_CAPI_H
#define MAMBAI_CAPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mambai_status {
  MAMBAI_OK = 0,
  MAMBAI_ERR_INVALID_ARGUMENT = 1,
  MAMBAI_ERR_IO = 2,
  MAMBAI_ERR_PARSE = 3,
  MAMBAI_ERR_CONFIG = 4,
  MAMBAI_ERR_TRANSPORT = 5,
  MAMBAI_ERR_PROTOCOL = 6,
  MAMBAI_ERR_REQUEST = 7,
  MAMBAI_ERR_EMPTY_TRANSLATION = 8,
  MAMBAI_ERR_INTERNAL = 99
} mambai_status;

/* Message for the most recent failure on the calling thread. */
const char* mambai_last_error(void);

void mambai_string_free(char* s);

const char* mambai_version(void);

/* ---- opaque handles ---------------------------------------------------- */

typedef struct mambai_dict mambai_dict;      /* list of dictionary entries */
typedef struct mambai_corpus mambai_corpus;  /* list of aligned sentence pairs */
typedef struct mambai_index mambai_index;    /* TF-IDF retrieval index */

mambai_status mambai_dict_load(const char* path, mambai_dict** out);
size_t mambai_dict_size(const mambai_dict* dict);
/* entry/translation/pos valid until the dict is freed; pos may be NULL. */
mambai_status mambai_dict_get(const mambai_dict* dict, size_t i, const char** entry,
                              const char** translation, const char** part_of_speech);
void mambai_dict_free(mambai_dict* dict);

mambai_status mambai_corpus_load(const char* path, mambai_corpus** out);
size_t mambai_corpus_size(const mambai_corpus* corpus);
mambai_status mambai_corpus_get(const mambai_corpus* corpus, size_t i, const char** english,
                                const char** mambai_side, double* score, const char** section);
void mambai_corpus_free(mambai_corpus* corpus);

mambai_status mambai_index_build(const mambai_corpus* train, mambai_index** out);
mambai_status mambai_index_load(const char* path, mambai_index** out);
mambai_status mambai_index_save(const mambai_index* index, const char* path);
size_t mambai_index_vocab_size(const mambai_index* index);
size_t mambai_index_doc_count(const mambai_index* index);
/* JSON array of {english, mambai, similarity}, best match first. */
mambai_status mambai_index_query(const mambai_index* index, const char* query, size_t k,
                                 char** json_out);
void mambai_index_free(mambai_index* index);

/* ---- pipeline operations (file in, file out) --------------------------- */

/* doc.json -> denormalized dictionary JSON. pos_pattern NULL = default. */
mambai_status mambai_extract_dictionary(const char* doc_path, const char* pos_pattern,
                                        const char* out_path);

/* doc.json -> per-section sentence lists JSON. */
mambai_status mambai_extract_sections(const char* doc_path, const char* out_path);

/* sections.json + dict.json -> scored, threshold-filtered corpus JSONL. */
mambai_status mambai_align_corpus(const char* sections_path, const char* dict_path,
                                  double score_threshold, const char* out_path);

mambai_status mambai_split_corpus(const char* corpus_path, double test_fraction, int64_t seed,
                                  const char* train_out_path, const char* test_out_path);

/* Assemble the few-shot prompt for one input sentence. dict_path may be
 * NULL when use_dict is 0. */
mambai_status mambai_build_prompt(const char* train_path, const char* dict_path, int n_tfidf,
                                  int n_embed, int use_dict, const char* input, char** prompt_out);

/* One hypothesis/reference per line; writes a metric report JSON and
 * returns the scores. Any double pointer may be NULL. */
mambai_status mambai_evaluate_files(const char* hyp_path, const char* ref_path,
                                    const char* report_out_path, double* bleu_out,
                                    double* chrf_out, double* chrf_pp_out);

/* Cross-set similarity between train/test JSONL corpora.
 * side: "eng" | "mgm"; method: "tfidf" | "semantic";
 * aggregation: "mean_all" | "mean_max". report_out_path may be NULL. */
mambai_status mambai_analyze_similarity(const char* train_path, const char* test_path,
                                        const char* side, const char* method,
                                        const char* aggregation, const char* report_out_path,
                                        double* score_out);

/* Full experiment grid from a config file; writes results.csv,
 * records_<cell>.jsonl and report.json under out_dir. mock_path may be
 * NULL for a live run (endpoint from LLM_BASE_URL / LLM_API_KEY).
 * gateway_calls_out may be NULL; it reports mock-gateway call counts
 * (-1 for live runs). */
mambai_status mambai_run_grid(const char* config_path, const char* mock_path, const char* out_dir,
                              int* gateway_calls_out);

/* Normalize a raw model completion into a bare translation. */
mambai_status mambai_parse_translation(const char* raw_text, char** out);

/* Tokenize with the shared tokenizer; returns a JSON string array. */
mambai_status mambai_tokenize(const char* input, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* MAMBAI_CAPI_H */
