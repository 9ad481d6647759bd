#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mambai::extract {

/// One styled run of text from the OCR'd document dump.
struct Run {
  std::string text;
  bool bold = false;
};

/// Ordered runs with font-weight flags; the post-OCR interchange format.
struct RunDocument {
  std::vector<Run> runs;
};

struct DictionaryEntry {
  std::string entry;        // headword, source language
  std::string translation;  // target language
  std::optional<std::string> part_of_speech;

  bool operator==(const DictionaryEntry&) const = default;
};

/// Per-section monolingual sentence lists keyed by the uppercase delimiter.
struct BilingualSection {
  std::string title;
  std::vector<std::string> mambai_sentences;
  std::vector<std::string> english_sentences;
};

/// Default part-of-speech pattern: standard manual abbreviations at the
/// start of an entry body ("adj.", "n.", "v.", ...). Case-insensitive.
extern const char* kDefaultPosPattern;

/// Mine (headword, part of speech, translation) triplets from a document
/// that alternates bold headword runs with non-bold body runs. A bold run
/// with no following body is skipped with a warning rather than failing;
/// consecutive body runs are joined. Output order follows the document.
/// Translations are raw (call denormalize_translations to split senses).
std::vector<DictionaryEntry> parse_dictionary(const RunDocument& doc,
                                              const std::string& pos_pattern = kDefaultPosPattern,
                                              std::vector<std::string>* warnings = nullptr);

/// Split multi-sense translations on ";" and on commas that sit outside
/// parentheses, duplicating headword and part of speech. Idempotent.
std::vector<DictionaryEntry> denormalize_translations(const std::vector<DictionaryEntry>& entries);

/// True when the trimmed run text is an uppercase section delimiter:
/// length >= 2, at least one A-Z, and nothing but A-Z, digits, spaces and
/// ASCII punctuation.
bool is_section_delimiter(const std::string& run_text);

/// Split text into sentences on terminal ". ! ?" (punctuation kept).
/// No split inside parentheses or after a single-letter abbreviation.
std::vector<std::string> split_sentences(const std::string& text);

/// Segment a document into sections at uppercase delimiter runs. Bold
/// runs feed mambai_sentences, non-bold runs english_sentences. Content
/// before the first delimiter lands in an implicit section with an empty
/// title. An empty document yields no sections.
std::vector<BilingualSection> segment_bilingual_sections(const RunDocument& doc);

// JSON interchange ({"runs":[{"text":...,"bold":...}]}, dictionary array,
// section array). Parsers throw std::runtime_error on malformed input.
RunDocument run_document_from_json(const std::string& json_text);
std::string run_document_to_json(const RunDocument& doc);
std::vector<DictionaryEntry> dictionary_from_json(const std::string& json_text);
std::string dictionary_to_json(const std::vector<DictionaryEntry>& entries);
std::vector<BilingualSection> sections_from_json(const std::string& json_text);
std::string sections_to_json(const std::vector<BilingualSection>& sections);

}  // namespace mambai::extract
