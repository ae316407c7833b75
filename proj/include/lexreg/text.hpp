#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexreg {

// Removes links (scheme://... and www....), hashtags and user mentions, one
// whitespace-delimited token at a time. Returns the remaining tokens joined by
// single spaces, or nothing when fewer than `min_words` tokens survive.
std::optional<std::string> clean_text(std::string_view text, int min_words = 5);

// The whitespace-delimited tokens clean_text keeps, as views into `text`.
void kept_segments(std::string_view text, std::vector<std::string_view>& out);

// False when clean_text would keep every token of `text`: it has no '#',
// '@', ':' or '.', so no hashtag, mention or link can occur.
bool may_need_cleaning(std::string_view text);

// Whitespace-delimited tokens in `text`, counting stops at `limit`.
std::size_t count_tokens(std::string_view text, std::size_t limit);

// Lowercased word forms. Letters and digits (any script) form words; an
// apostrophe (' or U+2019) between two word characters stays inside the word
// and is normalized to '. Everything else separates words.
std::vector<std::string> tokenize(std::string_view text);

// Calls `sink(word)` for every token; the view is valid only during the call.
template <class Sink>
void for_each_token(std::string_view text, std::string& scratch, Sink&& sink);

// Plural stripping on a lowercased form:
//   "-ies" -> "-y" when the word has more than 4 characters,
//   "-sses", "-xes", "-zes", "-ches", "-shes" -> drop "es",
//   other "-ses" -> drop "s",
//   otherwise a trailing "s" is dropped when the word has more than 3
//   characters and does not end in "ss".
// The rules are idempotent.
std::string stem_plurals(std::string_view word);

namespace detail {

// Decodes the code point at `pos`, advancing it. Invalid bytes decode as
// U+FFFD and consume one byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);
bool is_word_char(char32_t cp);
char32_t to_lower(char32_t cp);

// Lowercase form of each ASCII letter or digit, 0 for every other byte.
inline constexpr auto ascii_fold = [] {
  std::array<char, 256> t{};
  for (int c = '0'; c <= '9'; ++c) t[static_cast<std::size_t>(c)] = static_cast<char>(c);
  for (int c = 'a'; c <= 'z'; ++c) t[static_cast<std::size_t>(c)] = t[static_cast<std::size_t>(c - 32)] = static_cast<char>(c);
  return t;
}();

}  // namespace detail

template <class Sink>
void for_each_token(std::string_view text, std::string& scratch, Sink&& sink) {
  scratch.clear();
  bool pending_apostrophe = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto byte = static_cast<unsigned char>(text[pos]);
    char32_t cp;
    bool word_char;
    if (byte < 0x80) {
      if (detail::ascii_fold[byte]) {
        if (pending_apostrophe) scratch.push_back('\'');
        pending_apostrophe = false;
        std::size_t begin = pos, from = scratch.size();
        bool mixed_case = false;
        for (; pos < text.size(); ++pos) {
          char c = text[pos], folded = detail::ascii_fold[static_cast<unsigned char>(c)];
          if (!folded) break;
          mixed_case |= c != folded;
        }
        bool ends_here = pos == text.size() || (static_cast<unsigned char>(text[pos]) < 0x80 && text[pos] != '\'');
        if (from == 0 && !mixed_case && ends_here) {
          sink(text.substr(begin, pos - begin));
          continue;
        }
        scratch.append(text.substr(begin, pos - begin));
        if (mixed_case)
          for (std::size_t i = from; i < scratch.size(); ++i)
            scratch[i] = detail::ascii_fold[static_cast<unsigned char>(scratch[i])];
        continue;
      }
      cp = byte;
      ++pos;
      word_char = false;
    } else {
      cp = detail::decode_utf8(text, pos);
      word_char = detail::is_word_char(cp);
    }
    if (word_char) {
      if (pending_apostrophe) scratch.push_back('\'');
      pending_apostrophe = false;
      detail::append_utf8(scratch, detail::to_lower(cp));
      continue;
    }
    if ((cp == U'\'' || cp == U'’') && !scratch.empty() && !pending_apostrophe) {
      pending_apostrophe = true;
      continue;
    }
    if (!scratch.empty()) {
      sink(std::string_view(scratch));
      scratch.clear();
    }
    pending_apostrophe = false;
  }
  if (!scratch.empty()) {
    sink(std::string_view(scratch));
    scratch.clear();
  }
}

}  // namespace lexreg
