#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mambai/align.hpp"
#include "mambai/extract.hpp"
#include "mambai/llm.hpp"
#include "mambai/metrics.hpp"
#include "mambai/retrieval.hpp"

namespace mambai::runner {

struct DecodingConfig {
  double temperature = 0.0;
  int max_tokens = 256;
  int timeout_s = 60;
};

/// One grid cell: model + retrieval counts + UseDict + decoding settings.
struct ExperimentConfig {
  std::string model = "gpt-4-turbo";
  int n_tfidf = 0;
  int n_embed = 0;
  bool use_dict = false;
  std::int64_t seed = 0;
  DecodingConfig decoding;
  std::string train_path;
  std::string test_path;
  std::string dict_path;

  std::string cell_name() const;
  /// Throws std::invalid_argument on fatal problems; returns warnings
  /// (e.g. retrieval counts outside the usual {0,5,10}).
  std::vector<std::string> validate() const;
};

struct TranslationRecord {
  std::string input_english;
  std::string reference_mambai;
  std::string hypothesis_mambai;
  std::string prompt_sha;
  std::vector<std::pair<std::string, std::string>> examples_used;  // (english, "tfidf"|"embedding")
  int dict_entries_used = 0;
  std::string model;
  std::optional<std::string> error;  // hypothesis empty iff set
};

struct CellResult {
  ExperimentConfig config;
  std::vector<TranslationRecord> records;
  metrics::MetricReport report;
  int error_count = 0;                     // per-sentence completion errors
  std::optional<std::string> cell_error;   // fatal: no metrics for this cell
};

struct ResultTable {
  std::vector<CellResult> cells;
};

/// Everything a cell run needs; all pointers borrowed, none owned.
struct RunContext {
  const std::vector<align::SentencePair>* test = nullptr;
  const std::vector<extract::DictionaryEntry>* dict = nullptr;
  const retrieval::TfidfIndex* index = nullptr;          // required when n_tfidf > 0
  const retrieval::EmbeddingStore* store = nullptr;      // required when n_embed > 0
  retrieval::EmbeddingProvider* provider = nullptr;
  llm::Gateway* gateway = nullptr;
  llm::ResponseCache* cache = nullptr;                   // optional
  int max_in_flight = 4;
};

/// Translate every test sentence (retrieve, prompt, complete, parse) and
/// score the corpus. Per-sentence LLM failures are recorded on the record
/// and scored as empty hypotheses; only configuration problems throw.
CellResult run_cell(const ExperimentConfig& cfg, const RunContext& ctx);

/// Counting mock: replies with the reference translation for whatever
/// input sentence the prompt asks about.
class EchoReferenceGateway final : public llm::Gateway {
 public:
  explicit EchoReferenceGateway(const std::vector<align::SentencePair>& test_pairs);
  llm::LlmResponse complete(const llm::LlmRequest& request) override;
  int calls() const { return calls_.load(); }

 private:
  std::unordered_map<std::string, std::string> reference_by_input_;
  std::atomic<int> calls_{0};
};

/// Counting mock returning one fixed completion for every request.
class FixedResponseGateway final : public llm::Gateway {
 public:
  explicit FixedResponseGateway(std::string text) : text_(std::move(text)) {}
  llm::LlmResponse complete(const llm::LlmRequest& request) override;
  int calls() const { return calls_.load(); }

 private:
  std::string text_;
  std::atomic<int> calls_{0};
};

/// Steps through a scripted (status, body, delay) list; non-200 entries
/// surface as request errors on the affected sentence.
class ScriptedGateway final : public llm::Gateway {
 public:
  struct Step {
    int status = 200;
    std::string text;
    int delay_ms = 0;
  };
  ScriptedGateway(std::vector<Step> steps, bool repeat_last);
  llm::LlmResponse complete(const llm::LlmRequest& request) override;
  int calls() const { return calls_.load(); }

 private:
  std::vector<Step> steps_;
  bool repeat_last_;
  std::atomic<int> calls_{0};
  std::mutex mutex_;
  std::size_t next_ = 0;
};

/// The input sentence a prompt asks to translate (its last
/// "English: ..." line). Empty when the prompt has none.
std::string prompt_input_sentence(const std::string& prompt);

/// Parses the experiment config document: top-level ExperimentConfig
/// fields as defaults plus an optional "grid" array of per-cell overrides.
std::vector<ExperimentConfig> parse_experiment_file(const std::string& json_text,
                                                    std::vector<std::string>* warnings = nullptr);

std::string results_csv(const ResultTable& table);
std::string report_json(const ResultTable& table);
std::string records_jsonl(const std::vector<TranslationRecord>& records);

/// Matched UseDict pairs (same model and retrieval counts, both UseDict
/// values present) with their BLEU scores; reproduction checks assert
/// bleu_with > bleu_without.
struct DictEffect {
  std::string model;
  int n_tfidf = 0;
  int n_embed = 0;
  double bleu_with = 0.0;
  double bleu_without = 0.0;
};
std::vector<DictEffect> dict_effect_pairs(const ResultTable& table);

struct GridOutcome {
  ResultTable table;
  int gateway_calls = -1;  // known only for counting mock gateways
};

/// Full pipeline behind the `run` CLI subcommand: read the config file,
/// build gateway (mock scenario when given, HTTP from env otherwise),
/// run all cells cache-assisted, and write results.csv /
/// records_<cell>.jsonl / report.json under out_dir.
GridOutcome run_grid_files(const std::string& config_path, const std::string& mock_path,
                           const std::string& out_dir);

}  // namespace mambai::runner
