#pragma once

#include <string>
#include <vector>

namespace mambai::text {

/// Strip leading/trailing ASCII whitespace.
std::string trim(const std::string& s);

/// ASCII-only lowercasing; bytes >= 0x80 pass through untouched.
std::string ascii_lower(const std::string& s);

/// Number of UTF-8 code points (malformed bytes count as one each).
std::size_t codepoint_count(const std::string& s);

/// Decode UTF-8 into code points; malformed bytes decode as themselves.
std::u32string decode_utf8(const std::string& s);

std::string encode_utf8(const std::u32string& s);

bool is_ascii_alnum(char c);

/// Shared tokenizer for retrieval, dictionary lookup and BLEU:
/// lowercase, split on whitespace, strip leading/trailing ASCII
/// non-alphanumerics from each token (internal apostrophes/hyphens and
/// all non-ASCII bytes are kept), drop empties.
std::vector<std::string> tokenize(const std::string& s);

}  // namespace mambai::text
