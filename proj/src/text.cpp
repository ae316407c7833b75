#include <lexreg/text.hpp>

#include <cctype>
#include <clocale>
#include <cstring>
#include <cwctype>

#include <locale.h>

namespace lexreg {

namespace {

bool is_space(char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c != prefix[i]) return false;
  }
  return true;
}

bool is_link(std::string_view token) {
  if (starts_with_ci(token, "www.")) return true;
  auto sep = token.find("://");
  if (sep == std::string_view::npos || sep == 0) return false;
  // Strip leading punctuation such as "(" before the scheme.
  std::size_t begin = 0;
  while (begin < sep && !std::isalpha(static_cast<unsigned char>(token[begin]))) ++begin;
  if (begin == sep) return false;
  for (std::size_t i = begin; i < sep; ++i) {
    auto c = static_cast<unsigned char>(token[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  return true;
}

locale_t utf8_locale() {
  static locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0)) l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    return l;
  }();
  return loc;
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace

namespace detail {

char32_t decode_utf8(std::string_view text, std::size_t& pos) {
  auto lead = static_cast<unsigned char>(text[pos]);
  int extra;
  char32_t cp;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return U'�';
  }
  if (pos + extra >= text.size()) {
    ++pos;
    return U'�';
  }
  for (int i = 1; i <= extra; ++i) {
    auto b = static_cast<unsigned char>(text[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return U'�';
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  if (cp == U'�') return false;
  // Combining diacritical marks attach to the preceding letter.
  if (cp >= 0x0300 && cp <= 0x036F) return true;
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return cp >= 0xC0;
  return iswalnum_l(static_cast<wint_t>(cp), loc) != 0;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

}  // namespace detail

void kept_segments(std::string_view text, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    std::size_t begin = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    if (begin == pos) break;
    std::string_view token = text.substr(begin, pos - begin);
    if (token.front() == '#' || token.front() == '@' || is_link(token)) continue;
    out.push_back(token);
  }
}

bool may_need_cleaning(std::string_view text) {
  for (char mark : {'#', '@', ':', '.'})
    if (std::memchr(text.data(), mark, text.size())) return true;
  return false;
}

std::size_t count_tokens(std::string_view text, std::size_t limit) {
  std::size_t n = 0;
  bool inside = false;
  for (std::size_t pos = 0; pos < text.size() && n < limit; ++pos) {
    bool space = is_space(text[pos]);
    n += !space && !inside;
    inside = !space;
  }
  return n;
}

std::optional<std::string> clean_text(std::string_view text, int min_words) {
  std::vector<std::string_view> kept;
  kept_segments(text, kept);
  if (static_cast<long>(kept.size()) < min_words) return std::nullopt;
  std::string out;
  out.reserve(text.size());
  for (auto token : kept) {
    if (!out.empty()) out.push_back(' ');
    out.append(token);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string scratch;
  for_each_token(text, scratch, [&](std::string_view word) { tokens.emplace_back(word); });
  return tokens;
}

std::string stem_plurals(std::string_view word) {
  auto ends_with = [&](std::string_view suffix) { return word.ends_with(suffix); };
  std::string w(word);
  if (ends_with("ies") && code_point_count(word) > 4) {
    w.resize(w.size() - 3);
    w.push_back('y');
    return w;
  }
  if (ends_with("sses") || ends_with("xes") || ends_with("zes") || ends_with("ches") || ends_with("shes")) {
    w.resize(w.size() - 2);
    return w;
  }
  if (ends_with("ses")) {
    w.pop_back();
    return w;
  }
  if (ends_with("s") && !ends_with("ss") && code_point_count(word) > 3) {
    w.pop_back();
  }
  return w;
}

}  // namespace lexreg
