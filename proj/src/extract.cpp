#include "mambai/extract.hpp"

#include <cctype>
#include <regex>
#include <stdexcept>

#include "json.hpp"
#include "mambai/text.hpp"

using nlohmann::json;
using mambai::text::trim;

namespace mambai::extract {

const char* kDefaultPosPattern = R"(^(adj|adv|n|v|pron|prep|conj|interj|num)\.)";

std::vector<DictionaryEntry> parse_dictionary(const RunDocument& doc,
                                              const std::string& pos_pattern,
                                              std::vector<std::string>* warnings) {
  std::regex pos_re(pos_pattern, std::regex::icase);
  std::vector<DictionaryEntry> entries;

  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  std::size_t i = 0;
  const auto& runs = doc.runs;
  while (i < runs.size()) {
    if (!runs[i].bold) {
      // stray body text with no headword; ignore
      ++i;
      continue;
    }
    std::string headword = trim(runs[i].text);
    ++i;
    std::string body;
    while (i < runs.size() && !runs[i].bold) {
      if (!body.empty()) body += " ";
      body += trim(runs[i].text);
      ++i;
    }
    body = trim(body);
    if (headword.empty()) continue;
    if (body.empty()) {
      warn("skipped entry with no body: \"" + headword + "\"");
      continue;
    }
    DictionaryEntry e;
    e.entry = headword;
    std::smatch m;
    if (std::regex_search(body, m, pos_re)) {
      e.part_of_speech = m.str(0);
      e.translation = trim(body.substr(m.length(0)));
    } else {
      e.translation = body;
    }
    if (e.translation.empty()) {
      warn("skipped entry with empty translation: \"" + headword + "\"");
      continue;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

namespace {

// Fragments split on ";" anywhere and "," at parenthesis depth zero.
std::vector<std::string> split_senses(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')' && depth > 0) --depth;
    if (c == ';' || (c == ',' && depth == 0)) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

std::vector<DictionaryEntry> denormalize_translations(const std::vector<DictionaryEntry>& entries) {
  std::vector<DictionaryEntry> out;
  for (const auto& e : entries) {
    for (const auto& frag : split_senses(e.translation)) {
      std::string t = trim(frag);
      if (t.empty()) continue;
      out.push_back(DictionaryEntry{e.entry, t, e.part_of_speech});
    }
  }
  return out;
}

bool is_section_delimiter(const std::string& run_text) {
  std::string t = trim(run_text);
  if (t.size() < 2) return false;
  bool has_upper = false;
  for (char ch : t) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') {
      has_upper = true;
    } else if (c >= 'a' && c <= 'z') {
      return false;
    } else if (std::isdigit(c) || std::isspace(c) || std::ispunct(c)) {
      // allowed
    } else {
      return false;  // non-ASCII or control byte
    }
  }
  return has_upper;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string cur;
  int depth = 0;
  const std::size_t n = text.size();

  auto flush = [&]() {
    std::string t = trim(cur);
    if (!t.empty()) sentences.push_back(t);
    cur.clear();
  };

  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (c == '(') ++depth;
    if (c == ')' && depth > 0) --depth;
    cur.push_back(c);
    if ((c == '.' || c == '!' || c == '?') && depth == 0) {
      if (c == '.') {
        // "J. Smith": period after a lone letter is an abbreviation
        std::size_t w = cur.size() - 1;  // position of '.'
        std::size_t letters = 0;
        while (w > 0 && !std::isspace(static_cast<unsigned char>(cur[w - 1]))) {
          ++letters;
          --w;
        }
        if (letters == 1 && std::isalpha(static_cast<unsigned char>(cur[cur.size() - 2]))) continue;
      }
      // absorb any immediately following terminal punctuation ("?!", "...")
      while (i + 1 < n && (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?')) {
        ++i;
        cur.push_back(text[i]);
      }
      flush();
    }
  }
  flush();
  return sentences;
}

std::vector<BilingualSection> segment_bilingual_sections(const RunDocument& doc) {
  std::vector<BilingualSection> sections;
  bool open = false;

  auto section = [&]() -> BilingualSection& {
    if (!open) {
      sections.push_back(BilingualSection{"", {}, {}});
      open = true;
    }
    return sections.back();
  };

  for (const auto& run : doc.runs) {
    if (trim(run.text).empty()) continue;
    if (is_section_delimiter(run.text)) {
      sections.push_back(BilingualSection{trim(run.text), {}, {}});
      open = true;
      continue;
    }
    auto& sec = section();
    auto& side = run.bold ? sec.mambai_sentences : sec.english_sentences;
    for (auto& s : split_sentences(run.text)) side.push_back(std::move(s));
  }
  return sections;
}

RunDocument run_document_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  if (!j.is_object() || !j.contains("runs") || !j["runs"].is_array())
    throw std::runtime_error("run document: expected {\"runs\": [...]}");
  RunDocument doc;
  for (const auto& r : j["runs"]) {
    Run run;
    run.text = r.at("text").get<std::string>();
    run.bold = r.at("bold").get<bool>();
    if (trim(run.text).empty()) continue;  // empty runs are dropped
    doc.runs.push_back(std::move(run));
  }
  return doc;
}

std::string run_document_to_json(const RunDocument& doc) {
  json runs = json::array();
  for (const auto& r : doc.runs) runs.push_back({{"text", r.text}, {"bold", r.bold}});
  return json{{"runs", runs}}.dump(2);
}

std::vector<DictionaryEntry> dictionary_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  if (!j.is_array()) throw std::runtime_error("dictionary: expected a JSON array");
  std::vector<DictionaryEntry> entries;
  for (const auto& item : j) {
    DictionaryEntry e;
    e.entry = item.at("entry").get<std::string>();
    e.translation = item.at("translation").get<std::string>();
    if (item.contains("part_of_speech") && !item["part_of_speech"].is_null())
      e.part_of_speech = item["part_of_speech"].get<std::string>();
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string dictionary_to_json(const std::vector<DictionaryEntry>& entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    json item = {{"entry", e.entry}, {"translation", e.translation}};
    if (e.part_of_speech)
      item["part_of_speech"] = *e.part_of_speech;
    else
      item["part_of_speech"] = nullptr;
    arr.push_back(std::move(item));
  }
  return arr.dump(2);
}

std::vector<BilingualSection> sections_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  if (!j.is_array()) throw std::runtime_error("sections: expected a JSON array");
  std::vector<BilingualSection> sections;
  for (const auto& item : j) {
    BilingualSection s;
    s.title = item.at("title").get<std::string>();
    for (const auto& m : item.at("mambai_sentences")) s.mambai_sentences.push_back(m.get<std::string>());
    for (const auto& e : item.at("english_sentences")) s.english_sentences.push_back(e.get<std::string>());
    sections.push_back(std::move(s));
  }
  return sections;
}

std::string sections_to_json(const std::vector<BilingualSection>& sections) {
  json arr = json::array();
  for (const auto& s : sections) {
    arr.push_back({{"title", s.title},
                   {"mambai_sentences", s.mambai_sentences},
                   {"english_sentences", s.english_sentences}});
  }
  return arr.dump(2);
}

}  // namespace mambai::extract
