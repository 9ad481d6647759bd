#include "mambai/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "mambai/prompting.hpp"
#include "mambai/text.hpp"

using nlohmann::json;

namespace mambai::runner {

std::string ExperimentConfig::cell_name() const {
  std::string name = model;
  for (char& c : name)
    if (!text::is_ascii_alnum(c)) c = '-';
  return name + "_t" + std::to_string(n_tfidf) + "_e" + std::to_string(n_embed) +
         (use_dict ? "_dict" : "_nodict");
}

std::vector<std::string> ExperimentConfig::validate() const {
  if (model.empty()) throw std::invalid_argument("experiment: model must be set");
  if (n_tfidf < 0 || n_embed < 0)
    throw std::invalid_argument("experiment: retrieval counts must be >= 0");
  std::vector<std::string> warnings;
  auto usual = [](int n) { return n == 0 || n == 5 || n == 10; };
  if (!usual(n_tfidf))
    warnings.push_back("n_tfidf=" + std::to_string(n_tfidf) + " is outside the usual {0,5,10}");
  if (!usual(n_embed))
    warnings.push_back("n_embed=" + std::to_string(n_embed) + " is outside the usual {0,5,10}");
  return warnings;
}

EchoReferenceGateway::EchoReferenceGateway(const std::vector<align::SentencePair>& test_pairs) {
  for (const auto& p : test_pairs) reference_by_input_.emplace(p.english, p.mambai);
}

std::string prompt_input_sentence(const std::string& prompt) {
  const std::string marker = "English: ";
  const auto pos = prompt.rfind(marker);
  if (pos == std::string::npos) return "";
  const auto start = pos + marker.size();
  const auto end = prompt.find('\n', start);
  return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

llm::LlmResponse EchoReferenceGateway::complete(const llm::LlmRequest& request) {
  ++calls_;
  llm::LlmResponse response;
  response.model = request.model;
  const auto it = reference_by_input_.find(prompt_input_sentence(request.prompt));
  response.raw_text = it == reference_by_input_.end() ? "" : it->second;
  return response;
}

llm::LlmResponse FixedResponseGateway::complete(const llm::LlmRequest& request) {
  ++calls_;
  llm::LlmResponse response;
  response.model = request.model;
  response.raw_text = text_;
  return response;
}

ScriptedGateway::ScriptedGateway(std::vector<Step> steps, bool repeat_last)
    : steps_(std::move(steps)), repeat_last_(repeat_last) {
  if (steps_.empty()) throw std::invalid_argument("scripted gateway: empty scenario");
}

llm::LlmResponse ScriptedGateway::complete(const llm::LlmRequest& request) {
  ++calls_;
  Step step;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (next_ >= steps_.size()) {
      if (!repeat_last_)
        throw llm::GatewayError(llm::GatewayErrorKind::transport, "scenario exhausted");
      step = steps_.back();
    } else {
      step = steps_[next_++];
    }
  }
  if (step.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(step.delay_ms));
  if (step.status != 200)
    throw llm::GatewayError(step.status == 429 || step.status >= 500
                                ? llm::GatewayErrorKind::transport
                                : llm::GatewayErrorKind::request,
                            "scripted HTTP " + std::to_string(step.status));
  llm::LlmResponse response;
  response.model = request.model;
  response.raw_text = step.text;
  return response;
}

CellResult run_cell(const ExperimentConfig& cfg, const RunContext& ctx) {
  cfg.validate();
  if (!ctx.test) throw std::invalid_argument("run_cell: no test set");
  if (!ctx.gateway) throw std::invalid_argument("run_cell: no gateway");
  if (cfg.n_tfidf > 0 && !ctx.index) throw std::invalid_argument("run_cell: no TF-IDF index");
  if (cfg.n_embed > 0 && (!ctx.store || !ctx.provider))
    throw std::invalid_argument("run_cell: no embedding store/provider");
  if (cfg.use_dict && !ctx.dict) throw std::invalid_argument("run_cell: no dictionary");

  const auto& test = *ctx.test;
  CellResult result;
  result.config = cfg;
  result.records.resize(test.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= test.size()) return;
      TranslationRecord rec;
      rec.input_english = test[i].english;
      rec.reference_mambai = test[i].mambai;
      rec.model = cfg.model;
      try {
        // overfetch 2x so merge_examples can backfill dropped duplicates
        std::vector<retrieval::RetrievedExample> from_tfidf, from_embed;
        if (cfg.n_tfidf > 0)
          from_tfidf = retrieval::retrieve_tfidf(*ctx.index, rec.input_english,
                                                 static_cast<std::size_t>(2 * cfg.n_tfidf));
        if (cfg.n_embed > 0)
          from_embed = retrieval::retrieve_semantic(*ctx.store, *ctx.provider, rec.input_english,
                                                    static_cast<std::size_t>(2 * cfg.n_embed));
        const auto merged = retrieval::merge_examples(from_tfidf, from_embed,
                                                      static_cast<std::size_t>(cfg.n_tfidf),
                                                      static_cast<std::size_t>(cfg.n_embed));

        prompting::PromptSpec spec;
        for (const auto& ex : merged) {
          spec.examples.emplace_back(ex.pair.english, ex.pair.mambai);
          rec.examples_used.emplace_back(
              ex.pair.english, ex.source == retrieval::RetrievalSource::tfidf ? "tfidf" : "embedding");
        }
        if (cfg.use_dict) {
          for (const auto& entry : retrieval::lookup_dictionary(rec.input_english, *ctx.dict)) {
            spec.dict_entries.emplace_back(entry.entry, entry.translation);
            ++rec.dict_entries_used;
          }
        }
        spec.input = rec.input_english;
        const std::string prompt = prompting::build_prompt(spec);
        rec.prompt_sha = llm::sha256_hex(prompt);

        const std::string key =
            llm::completion_cache_key(cfg.model, prompt, cfg.decoding.temperature);
        std::string raw;
        std::optional<std::string> cached = ctx.cache ? ctx.cache->get(key) : std::nullopt;
        if (cached) {
          raw = *cached;
        } else {
          llm::LlmRequest request;
          request.model = cfg.model;
          request.prompt = prompt;
          request.temperature = cfg.decoding.temperature;
          request.max_tokens = cfg.decoding.max_tokens;
          request.timeout = std::chrono::seconds(cfg.decoding.timeout_s);
          raw = ctx.gateway->complete(request).raw_text;
          if (ctx.cache) ctx.cache->put(key, cfg.model, prompt, raw);
        }
        rec.hypothesis_mambai = llm::parse_translation(raw);
      } catch (const std::exception& e) {
        rec.hypothesis_mambai.clear();
        rec.error = e.what();
      }
      result.records[i] = std::move(rec);
    }
  };

  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(ctx.max_in_flight),
                                                     test.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  std::vector<std::string> hypotheses, references;
  hypotheses.reserve(test.size());
  references.reserve(test.size());
  for (const auto& rec : result.records) {
    hypotheses.push_back(rec.hypothesis_mambai);
    references.push_back(rec.reference_mambai);
    if (rec.error) ++result.error_count;
  }
  result.report = metrics::evaluate(hypotheses, references);
  return result;
}

namespace {

ExperimentConfig config_from_json(const json& j, ExperimentConfig base) {
  if (j.contains("model")) base.model = j["model"].get<std::string>();
  if (j.contains("n_tfidf")) base.n_tfidf = j["n_tfidf"].get<int>();
  if (j.contains("n_embed")) base.n_embed = j["n_embed"].get<int>();
  if (j.contains("use_dict")) base.use_dict = j["use_dict"].get<bool>();
  if (j.contains("seed")) base.seed = j["seed"].get<std::int64_t>();
  if (j.contains("decoding")) {
    const auto& d = j["decoding"];
    if (d.contains("temperature")) base.decoding.temperature = d["temperature"].get<double>();
    if (d.contains("max_tokens")) base.decoding.max_tokens = d["max_tokens"].get<int>();
    if (d.contains("timeout_s")) base.decoding.timeout_s = d["timeout_s"].get<int>();
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    if (p.contains("train")) base.train_path = p["train"].get<std::string>();
    if (p.contains("test")) base.test_path = p["test"].get<std::string>();
    if (p.contains("dict")) base.dict_path = p["dict"].get<std::string>();
  }
  return base;
}

}  // namespace

std::vector<ExperimentConfig> parse_experiment_file(const std::string& json_text,
                                                    std::vector<std::string>* warnings) {
  json j = json::parse(json_text);
  ExperimentConfig defaults = config_from_json(j, ExperimentConfig{});
  std::vector<ExperimentConfig> cells;
  if (j.contains("grid")) {
    for (const auto& cell : j["grid"]) cells.push_back(config_from_json(cell, defaults));
  } else {
    cells.push_back(defaults);
  }
  for (const auto& cfg : cells) {
    auto w = cfg.validate();
    if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
  }
  return cells;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += "\"";
  return quoted;
}

std::string one_decimal(double x) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << x;
  return out.str();
}

}  // namespace

std::string results_csv(const ResultTable& table) {
  std::string csv = "Model,N_TFIDF,N_embed,UseDict,BLEU,ChrF,ChrF++,Error\n";
  for (const auto& cell : table.cells) {
    const auto& cfg = cell.config;
    csv += csv_field(cfg.model) + "," + std::to_string(cfg.n_tfidf) + "," +
           std::to_string(cfg.n_embed) + "," + (cfg.use_dict ? "TRUE" : "FALSE") + ",";
    if (cell.cell_error) {
      csv += ",,," + csv_field(*cell.cell_error);
    } else {
      csv += one_decimal(cell.report.bleu) + "," + one_decimal(cell.report.chrf) + "," +
             one_decimal(cell.report.chrf_pp) + ",";
    }
    csv += "\n";
  }
  return csv;
}

std::string report_json(const ResultTable& table) {
  json cells = json::array();
  for (const auto& cell : table.cells) {
    const auto& cfg = cell.config;
    json c = {{"model", cfg.model},
              {"n_tfidf", cfg.n_tfidf},
              {"n_embed", cfg.n_embed},
              {"use_dict", cfg.use_dict},
              {"seed", cfg.seed},
              {"cell", cfg.cell_name()}};
    if (cell.cell_error) {
      c["error"] = *cell.cell_error;
    } else {
      c["bleu"] = cell.report.bleu;
      c["chrf"] = cell.report.chrf;
      c["chrf_pp"] = cell.report.chrf_pp;
      c["n_sentences"] = cell.report.n_sentences;
      c["sentence_errors"] = cell.error_count;
    }
    cells.push_back(std::move(c));
  }
  return json{{"cells", cells}}.dump(2);
}

std::string records_jsonl(const std::vector<TranslationRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    json examples = json::array();
    for (const auto& [english, source] : rec.examples_used)
      examples.push_back({{"english", english}, {"source", source}});
    json j = {{"input_english", rec.input_english},
              {"reference_mambai", rec.reference_mambai},
              {"hypothesis_mambai", rec.hypothesis_mambai},
              {"prompt_sha", rec.prompt_sha},
              {"examples_used", examples},
              {"dict_entries_used", rec.dict_entries_used},
              {"model", rec.model},
              {"error", rec.error ? json(*rec.error) : json(nullptr)}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

std::vector<DictEffect> dict_effect_pairs(const ResultTable& table) {
  std::map<std::tuple<std::string, int, int>, std::pair<std::optional<double>, std::optional<double>>>
      by_setup;
  for (const auto& cell : table.cells) {
    if (cell.cell_error) continue;
    auto key = std::make_tuple(cell.config.model, cell.config.n_tfidf, cell.config.n_embed);
    auto& slot = by_setup[key];
    if (cell.config.use_dict)
      slot.first = cell.report.bleu;
    else
      slot.second = cell.report.bleu;
  }
  std::vector<DictEffect> effects;
  for (const auto& [key, scores] : by_setup) {
    if (!scores.first || !scores.second) continue;
    DictEffect e;
    e.model = std::get<0>(key);
    e.n_tfidf = std::get<1>(key);
    e.n_embed = std::get<2>(key);
    e.bleu_with = *scores.first;
    e.bleu_without = *scores.second;
    effects.push_back(std::move(e));
  }
  return effects;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct MockScenario {
  std::string mode = "script";  // echo | empty | fixed | script
  std::string text;
  std::vector<ScriptedGateway::Step> steps;
  bool repeat_last = true;
};

MockScenario parse_scenario(const std::string& json_text) {
  json j = json::parse(json_text);
  MockScenario scenario;
  scenario.mode = j.value("mode", std::string("script"));
  scenario.text = j.value("text", std::string{});
  scenario.repeat_last = j.value("repeat_last", true);
  if (j.contains("responses")) {
    for (const auto& r : j["responses"]) {
      ScriptedGateway::Step step;
      step.status = r.value("status", 200);
      step.text = r.contains("text") ? r["text"].get<std::string>() : r.value("body", std::string{});
      step.delay_ms = r.value("delay_ms", 0);
      scenario.steps.push_back(std::move(step));
    }
  }
  return scenario;
}

}  // namespace

GridOutcome run_grid_files(const std::string& config_path, const std::string& mock_path,
                           const std::string& out_dir) {
  std::vector<std::string> warnings;
  const auto cells = parse_experiment_file(read_file(config_path), &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  std::filesystem::create_directories(out_dir);

  std::optional<MockScenario> scenario;
  if (!mock_path.empty()) scenario = parse_scenario(read_file(mock_path));

  // shared across cells: corpora, dictionary, indexes, cache
  std::map<std::string, std::vector<align::SentencePair>> corpora;
  auto corpus = [&](const std::string& path) -> const std::vector<align::SentencePair>& {
    auto it = corpora.find(path);
    if (it == corpora.end())
      it = corpora.emplace(path, align::pairs_from_jsonl(read_file(path))).first;
    return it->second;
  };
  std::map<std::string, std::vector<extract::DictionaryEntry>> dicts;
  auto dictionary = [&](const std::string& path) -> const std::vector<extract::DictionaryEntry>& {
    auto it = dicts.find(path);
    if (it == dicts.end()) it = dicts.emplace(path, extract::dictionary_from_json(read_file(path))).first;
    return it->second;
  };
  std::map<std::string, retrieval::TfidfIndex> indexes;
  std::map<std::string, retrieval::EmbeddingStore> stores;
  retrieval::HashedTrigramProvider trigram_provider;

  llm::ResponseCache cache((std::filesystem::path(out_dir) / "cache.jsonl").string());

  std::unique_ptr<llm::Gateway> http_gateway;
  std::unique_ptr<FixedResponseGateway> fixed_gateway;
  std::unique_ptr<ScriptedGateway> scripted_gateway;
  std::map<std::string, std::unique_ptr<EchoReferenceGateway>> echo_gateways;  // per test path

  if (scenario) {
    if (scenario->mode == "empty") {
      fixed_gateway = std::make_unique<FixedResponseGateway>("");
    } else if (scenario->mode == "fixed") {
      fixed_gateway = std::make_unique<FixedResponseGateway>(scenario->text);
    } else if (scenario->mode == "script") {
      scripted_gateway = std::make_unique<ScriptedGateway>(scenario->steps, scenario->repeat_last);
    }
    // "echo" builds a per-test-set gateway below
  } else {
    http_gateway = std::make_unique<llm::HttpGateway>(llm::GatewayConfig::from_env());
  }

  GridOutcome outcome;
  int mock_calls = 0;
  bool counting = false;
  for (const auto& cfg : cells) {
    CellResult result;
    result.config = cfg;
    try {
      const auto& test = corpus(cfg.test_path);

      RunContext ctx;
      ctx.test = &test;
      if (cfg.use_dict) ctx.dict = &dictionary(cfg.dict_path);
      if (cfg.n_tfidf > 0) {
        auto it = indexes.find(cfg.train_path);
        if (it == indexes.end())
          it = indexes.emplace(cfg.train_path, retrieval::build_tfidf_index(corpus(cfg.train_path))).first;
        ctx.index = &it->second;
      }
      if (cfg.n_embed > 0) {
        auto it = stores.find(cfg.train_path);
        if (it == stores.end())
          it = stores.emplace(cfg.train_path,
                              retrieval::build_embedding_store(corpus(cfg.train_path), trigram_provider))
                   .first;
        ctx.store = &it->second;
        ctx.provider = &trigram_provider;
      }
      ctx.cache = &cache;

      if (scenario && scenario->mode == "echo") {
        auto it = echo_gateways.find(cfg.test_path);
        if (it == echo_gateways.end())
          it = echo_gateways.emplace(cfg.test_path, std::make_unique<EchoReferenceGateway>(test)).first;
        ctx.gateway = it->second.get();
      } else if (fixed_gateway) {
        ctx.gateway = fixed_gateway.get();
      } else if (scripted_gateway) {
        ctx.gateway = scripted_gateway.get();
      } else {
        ctx.gateway = http_gateway.get();
      }

      result = run_cell(cfg, ctx);
    } catch (const std::exception& e) {
      result.cell_error = e.what();
    }
    if (!result.cell_error) {
      write_file((std::filesystem::path(out_dir) / ("records_" + cfg.cell_name() + ".jsonl")).string(),
                 records_jsonl(result.records));
    }
    outcome.table.cells.push_back(std::move(result));
  }

  if (fixed_gateway) {
    mock_calls = fixed_gateway->calls();
    counting = true;
  } else if (scripted_gateway) {
    mock_calls = scripted_gateway->calls();
    counting = true;
  } else if (!echo_gateways.empty()) {
    for (const auto& [path, gw] : echo_gateways) mock_calls += gw->calls();
    counting = true;
  }
  outcome.gateway_calls = counting ? mock_calls : -1;

  write_file((std::filesystem::path(out_dir) / "results.csv").string(), results_csv(outcome.table));
  write_file((std::filesystem::path(out_dir) / "report.json").string(), report_json(outcome.table));
  return outcome;
}

}  // namespace mambai::runner
