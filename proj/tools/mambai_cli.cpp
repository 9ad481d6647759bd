// Command-line front end for the mambai toolkit. Everything goes through
// the C API; this translation unit never touches the C++ core headers.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mambai/capi.h"

namespace {

int fail(mambai_status status) {
  std::cerr << "error: " << mambai_last_error() << " (status " << static_cast<int>(status) << ")\n";
  return 1;
}

void print_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) std::cout << line << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mambai: language-manual extraction, alignment and few-shot MT experiments"};
  app.require_subcommand(1);

  // extract-dict
  std::string in_path, out_path, pos_pattern;
  auto* extract_dict = app.add_subcommand("extract-dict", "Mine a dictionary from a run document");
  extract_dict->add_option("--in", in_path, "run document JSON")->required();
  extract_dict->add_option("--pos-pattern", pos_pattern, "part-of-speech regex (anchored)");
  extract_dict->add_option("--out", out_path, "dictionary JSON output")->required();

  // extract-sentences
  auto* extract_sentences =
      app.add_subcommand("extract-sentences", "Segment a run document into bilingual sections");
  extract_sentences->add_option("--in", in_path, "run document JSON")->required();
  extract_sentences->add_option("--out", out_path, "sections JSON output")->required();

  // align
  std::string sections_path, dict_path;
  double threshold = 0.2;
  auto* align_cmd = app.add_subcommand("align", "Align section sentence lists into a corpus");
  align_cmd->add_option("--sections", sections_path, "sections JSON")->required();
  align_cmd->add_option("--dict", dict_path, "dictionary JSON")->required();
  align_cmd->add_option("--threshold", threshold, "score threshold (default 0.2)");
  align_cmd->add_option("--out", out_path, "corpus JSONL output")->required();

  // split
  double test_fraction = 0.1;
  std::int64_t seed = 0;
  std::string train_out, test_out;
  auto* split_cmd = app.add_subcommand("split", "Split a corpus into train/test");
  split_cmd->add_option("--in", in_path, "corpus JSONL")->required();
  split_cmd->add_option("--test-fraction", test_fraction, "test share (default 0.1)");
  split_cmd->add_option("--seed", seed, "shuffle seed")->required();
  split_cmd->add_option("--out-train", train_out, "train JSONL output")->required();
  split_cmd->add_option("--out-test", test_out, "test JSONL output")->required();

  // index build / load
  auto* index_cmd = app.add_subcommand("index", "TF-IDF index maintenance");
  index_cmd->require_subcommand(1);
  std::string train_path, index_path, query;
  std::size_t top_k = 5;
  auto* index_build = index_cmd->add_subcommand("build", "Build an index from a train corpus");
  index_build->add_option("--train", train_path, "train JSONL")->required();
  index_build->add_option("--out", out_path, "index JSON output")->required();
  auto* index_load = index_cmd->add_subcommand("load", "Load an index and optionally query it");
  index_load->add_option("--index", index_path, "index JSON")->required();
  index_load->add_option("--query", query, "optional query sentence");
  index_load->add_option("--k", top_k, "results to print (default 5)");

  // prompt
  std::string input_sentence;
  int n_tfidf = 0, n_embed = 0;
  bool use_dict = false;
  auto* prompt_cmd = app.add_subcommand("prompt", "Print the assembled few-shot prompt");
  prompt_cmd->add_option("--train", train_path, "train JSONL")->required();
  prompt_cmd->add_option("--dict", dict_path, "dictionary JSON");
  prompt_cmd->add_option("--ntfidf", n_tfidf, "TF-IDF examples");
  prompt_cmd->add_option("--nembed", n_embed, "embedding examples");
  prompt_cmd->add_flag("--use-dict", use_dict, "include dictionary entries");
  prompt_cmd->add_option("--input", input_sentence, "English sentence")->required();

  // evaluate
  std::string hyp_path, ref_path;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score hypotheses against references");
  evaluate_cmd->add_option("--hyp", hyp_path, "hypotheses, one per line")->required();
  evaluate_cmd->add_option("--ref", ref_path, "references, one per line")->required();
  evaluate_cmd->add_option("--out", out_path, "report JSON output")->required();

  // analyze
  std::string side = "eng", method = "tfidf", aggregation = "mean_all", test_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "Train/test similarity analysis");
  analyze_cmd->add_option("--train", train_path, "train JSONL")->required();
  analyze_cmd->add_option("--test", test_path, "test JSONL")->required();
  analyze_cmd->add_option("--side", side, "eng | mgm (default eng)");
  analyze_cmd->add_option("--method", method, "tfidf | semantic (default tfidf)");
  analyze_cmd->add_option("--aggregation", aggregation, "mean_all | mean_max");
  analyze_cmd->add_option("--out", out_path, "report JSON output");

  // run
  std::string config_path, mock_path, out_dir;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment grid from a config file");
  run_cmd->add_option("--config", config_path, "experiment config JSON")->required();
  run_cmd->add_option("--mock", mock_path, "mock gateway scenario JSON");
  run_cmd->add_option("--out-dir", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (extract_dict->parsed()) {
    auto s = mambai_extract_dictionary(in_path.c_str(),
                                       pos_pattern.empty() ? nullptr : pos_pattern.c_str(),
                                       out_path.c_str());
    if (s != MAMBAI_OK) return fail(s);
    std::cout << "wrote " << out_path << "\n";
  } else if (extract_sentences->parsed()) {
    auto s = mambai_extract_sections(in_path.c_str(), out_path.c_str());
    if (s != MAMBAI_OK) return fail(s);
    std::cout << "wrote " << out_path << "\n";
  } else if (align_cmd->parsed()) {
    auto s = mambai_align_corpus(sections_path.c_str(), dict_path.c_str(), threshold,
                                 out_path.c_str());
    if (s != MAMBAI_OK) return fail(s);
    mambai_corpus* corpus = nullptr;
    if (mambai_corpus_load(out_path.c_str(), &corpus) == MAMBAI_OK) {
      std::cout << "wrote " << out_path << " (" << mambai_corpus_size(corpus) << " pairs)\n";
      mambai_corpus_free(corpus);
    }
  } else if (split_cmd->parsed()) {
    auto s = mambai_split_corpus(in_path.c_str(), test_fraction, seed, train_out.c_str(),
                                 test_out.c_str());
    if (s != MAMBAI_OK) return fail(s);
    std::cout << "wrote " << train_out << " and " << test_out << "\n";
  } else if (index_build->parsed()) {
    mambai_corpus* corpus = nullptr;
    auto s = mambai_corpus_load(train_path.c_str(), &corpus);
    if (s != MAMBAI_OK) return fail(s);
    mambai_index* index = nullptr;
    s = mambai_index_build(corpus, &index);
    mambai_corpus_free(corpus);
    if (s != MAMBAI_OK) return fail(s);
    s = mambai_index_save(index, out_path.c_str());
    if (s == MAMBAI_OK)
      std::cout << "wrote " << out_path << " (" << mambai_index_doc_count(index) << " docs, "
                << mambai_index_vocab_size(index) << " terms)\n";
    mambai_index_free(index);
    if (s != MAMBAI_OK) return fail(s);
  } else if (index_load->parsed()) {
    mambai_index* index = nullptr;
    auto s = mambai_index_load(index_path.c_str(), &index);
    if (s != MAMBAI_OK) return fail(s);
    std::cout << "loaded " << index_path << " (" << mambai_index_doc_count(index) << " docs, "
              << mambai_index_vocab_size(index) << " terms)\n";
    if (!query.empty()) {
      char* results = nullptr;
      s = mambai_index_query(index, query.c_str(), top_k, &results);
      if (s == MAMBAI_OK) {
        std::cout << results << "\n";
        mambai_string_free(results);
      }
    }
    mambai_index_free(index);
    if (s != MAMBAI_OK) return fail(s);
  } else if (prompt_cmd->parsed()) {
    char* prompt = nullptr;
    auto s = mambai_build_prompt(train_path.c_str(),
                                 dict_path.empty() ? nullptr : dict_path.c_str(), n_tfidf, n_embed,
                                 use_dict ? 1 : 0, input_sentence.c_str(), &prompt);
    if (s != MAMBAI_OK) return fail(s);
    std::cout << prompt << "\n";
    mambai_string_free(prompt);
  } else if (evaluate_cmd->parsed()) {
    double bleu = 0, chrf = 0, chrf_pp = 0;
    auto s = mambai_evaluate_files(hyp_path.c_str(), ref_path.c_str(), out_path.c_str(), &bleu,
                                   &chrf, &chrf_pp);
    if (s != MAMBAI_OK) return fail(s);
    std::cout.setf(std::ios::fixed);
    std::cout.precision(1);
    std::cout << "BLEU " << bleu << "  ChrF " << chrf << "  ChrF++ " << chrf_pp << "\n";
  } else if (analyze_cmd->parsed()) {
    double score = 0;
    auto s = mambai_analyze_similarity(train_path.c_str(), test_path.c_str(), side.c_str(),
                                       method.c_str(), aggregation.c_str(),
                                       out_path.empty() ? nullptr : out_path.c_str(), &score);
    if (s != MAMBAI_OK) return fail(s);
    std::cout << "similarity (" << side << ", " << method << "): " << score << "\n";
  } else if (run_cmd->parsed()) {
    int calls = -1;
    auto s = mambai_run_grid(config_path.c_str(), mock_path.empty() ? nullptr : mock_path.c_str(),
                             out_dir.c_str(), &calls);
    if (s != MAMBAI_OK) return fail(s);
    print_results_csv(out_dir + "/results.csv");
    if (calls >= 0) std::cout << "gateway calls: " << calls << "\n";
  }
  return 0;
}
