#ifndef SEMCEPT_TEXT_HPP
#define SEMCEPT_TEXT_HPP

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace semcept {

namespace detail {

// Latin-1 supplement letters (U+00C0..U+00DE, minus U+00D7) encode as 0xC3 0x80..0x9E;
// their lowercase forms are 0x20 higher in the second byte.
inline bool is_latin1_upper(unsigned char lead, unsigned char trail) {
  return lead == 0xC3 && trail >= 0x80 && trail <= 0x9E && trail != 0x97;
}

inline bool is_latin1_lower(unsigned char lead, unsigned char trail) {
  return lead == 0xC3 && trail >= 0xA0 && trail <= 0xBE && trail != 0xB7;
}

}  // namespace detail

/// Lowercases ASCII and the Latin-1 letters of a UTF-8 string (enough for German umlauts).
inline std::string fold_case(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c < 0x80) {
      out[i] = static_cast<char>(std::tolower(c));
    } else if (i + 1 < out.size() &&
               detail::is_latin1_upper(c, static_cast<unsigned char>(out[i + 1]))) {
      out[i + 1] = static_cast<char>(static_cast<unsigned char>(out[i + 1]) + 0x20);
      ++i;
    }
  }
  return out;
}

/// Uppercases the first letter only ("haus" -> "Haus", "ärger" -> "Ärger").
inline std::string capitalize_first(std::string_view s) {
  std::string out(s);
  if (out.empty()) return out;
  auto c = static_cast<unsigned char>(out[0]);
  if (c < 0x80) {
    out[0] = static_cast<char>(std::toupper(c));
  } else if (out.size() > 1 &&
             detail::is_latin1_lower(c, static_cast<unsigned char>(out[1]))) {
    out[1] = static_cast<char>(static_cast<unsigned char>(out[1]) - 0x20);
  }
  return out;
}

inline std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Whitespace tokenization with leading/trailing ASCII punctuation stripped from each token.
/// Tokens that are pure punctuation are dropped.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& raw : split_whitespace(text)) {
    std::string_view t(raw);
    while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace semcept

#endif  // SEMCEPT_TEXT_HPP
