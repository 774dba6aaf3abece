#include "parmine/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstdint>

#include "parmine/error.hpp"

namespace parmine::text {
namespace {

// One decoded code point and the byte range it occupies. Invalid sequences
// decode to cp < 0 and keep their original bytes.
struct CodePoint {
  UChar32 cp;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    out.push_back({c, static_cast<std::size_t>(begin), static_cast<std::size_t>(i)});
  }
  return out;
}

bool is_space(UChar32 c) {
  if (c < 0) return false;
  return c < 0x20 || c == 0x7f || u_isUWhiteSpace(c) || u_isWhitespace(c);
}

bool is_punct(UChar32 c) { return c >= 0 && u_ispunct(c); }

bool is_terminator(UChar32 c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(UChar32 c) {
  switch (c) {
    case '"': case '\'': case ')': case ']': case '}':
    case 0x2019: case 0x201D: case 0x00BB: case 0x203A:
      return true;
    default:
      return false;
  }
}

bool opens_sentence(UChar32 c) {
  return c >= 0 && (u_isupper(c) || u_istitle(c) || u_isdigit(c));
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), n, U8_MAX_LENGTH, c, error);
  (void)error;
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

TokenList Sentence::tokens() const { return tokenize(text); }

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  const auto cps = decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].cp)) {
      ++i;
      continue;
    }
    std::size_t word_end = i;
    while (word_end < cps.size() && !is_space(cps[word_end].cp)) ++word_end;

    std::size_t lead = i;
    while (lead < word_end && is_punct(cps[lead].cp)) ++lead;
    if (lead == word_end) {
      for (std::size_t k = i; k < word_end; ++k) {
        tokens.emplace_back(text.substr(cps[k].begin, cps[k].end - cps[k].begin));
      }
    } else {
      std::size_t trail = word_end;
      while (trail > lead && is_punct(cps[trail - 1].cp)) --trail;
      for (std::size_t k = i; k < lead; ++k) {
        tokens.emplace_back(text.substr(cps[k].begin, cps[k].end - cps[k].begin));
      }
      tokens.emplace_back(
          text.substr(cps[lead].begin, cps[trail - 1].end - cps[lead].begin));
      for (std::size_t k = trail; k < word_end; ++k) {
        tokens.emplace_back(text.substr(cps[k].begin, cps[k].end - cps[k].begin));
      }
    }
    i = word_end;
  }
  return tokens;
}

std::string join(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Sentence> split_sentences(std::string_view text,
                                      const SegmenterOptions& options) {
  std::vector<Sentence> sentences;
  const auto cps = decode(text);
  const std::size_t n = cps.size();

  auto emit = [&](std::size_t from_byte, std::size_t to_byte) {
    auto collapsed = collapse_whitespace(text.substr(from_byte, to_byte - from_byte));
    if (!collapsed.empty()) sentences.push_back({std::move(collapsed)});
  };

  auto is_abbreviation = [&](std::size_t period) {
    std::size_t word_begin = period;
    while (word_begin > 0 && !is_space(cps[word_begin - 1].cp)) --word_begin;
    while (word_begin < period && is_punct(cps[word_begin].cp)) ++word_begin;
    if (word_begin == period) return false;
    const std::size_t length = period - word_begin;
    if (options.max_abbreviation_length > 0 && length <= options.max_abbreviation_length) {
      return true;
    }
    if (options.abbreviations.empty()) return false;
    const auto word = lowercase(
        text.substr(cps[word_begin].begin, cps[period].begin - cps[word_begin].begin));
    return options.abbreviations.contains(word);
  };

  std::size_t start_byte = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!is_terminator(cps[i].cp)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminator(cps[j].cp)) ++j;
    const bool single_period = (j - i == 1) && cps[i].cp == '.';
    while (j < n && is_closer(cps[j].cp)) ++j;

    std::size_t next = j;
    while (next < n && is_space(cps[next].cp)) ++next;
    const bool at_end = next == n;
    const bool boundary =
        at_end || (next > j && opens_sentence(cps[next].cp) &&
                   !(single_period && is_abbreviation(i)));
    if (boundary) {
      const std::size_t end_byte = j < n ? cps[j].begin : text.size();
      emit(start_byte, end_byte);
      start_byte = at_end ? text.size() : cps[next].begin;
      i = next;
    } else {
      i = j;
    }
  }
  if (start_byte < text.size()) emit(start_byte, text.size());
  return sentences;
}

std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& c : decode(text)) {
    if (c.cp < 0) {
      out.append(text.substr(c.begin, c.end - c.begin));
    } else if (c.cp < 0x80) {
      out.push_back(static_cast<char>(c.cp >= 'A' && c.cp <= 'Z' ? c.cp + 32 : c.cp));
    } else {
      append_utf8(out, u_foldCase(c.cp, U_FOLD_CASE_DEFAULT));
    }
  }
  return out;
}

TokenList normalize(std::span<const Token> tokens) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lowercase(t));
  return out;
}

std::vector<NGram> ngrams(std::span<const Token> tokens, std::size_t n) {
  if (n == 0) throw InvalidArgument("n-gram order must be at least 1");
  std::vector<NGram> out;
  if (tokens.size() < n) return out;
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    out.push_back({{tokens.begin() + static_cast<std::ptrdiff_t>(i),
                    tokens.begin() + static_cast<std::ptrdiff_t>(i + n)}});
  }
  return out;
}

NGramCounts count_ngrams(std::span<const Token> tokens, std::size_t n) {
  if (n == 0) throw InvalidArgument("n-gram order must be at least 1");
  NGramCounts counts;
  if (tokens.size() < n) return counts;
  std::string key;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    key.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

TokenList truncate(std::span<const Token> tokens, std::size_t max_len) {
  if (max_len == 0) throw InvalidArgument("maximum length must be at least 1");
  const auto keep = std::min(tokens.size(), max_len);
  return {tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(keep)};
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  const auto cps = decode(token);
  return std::all_of(cps.begin(), cps.end(), [](const CodePoint& c) { return is_punct(c.cp); });
}

TokenList words_only(std::span<const Token> tokens) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!is_punctuation(t)) out.push_back(t);
  }
  return out;
}

std::size_t codepoint_count(std::string_view text) { return decode(text).size(); }

std::vector<std::string> split_codepoints(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& c : decode(text)) out.emplace_back(text.substr(c.begin, c.end - c.begin));
  return out;
}

std::string strip_punctuation(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& c : decode(text)) {
    if (!is_punct(c.cp)) out.append(text.substr(c.begin, c.end - c.begin));
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const auto& c : decode(text)) {
    if (is_space(c.cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(text.substr(c.begin, c.end - c.begin));
  }
  return out;
}

}  // namespace parmine::text
