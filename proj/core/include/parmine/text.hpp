#pragma once

// Tokenization, sentence segmentation, case folding and n-gram extraction.
// All functions are pure and UTF-8 in / UTF-8 out.

#include <cstddef>
#include <compare>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace parmine::text {

using Token = std::string;
using TokenList = std::vector<Token>;

struct Sentence {
  std::string text;

  /// Tokens of `text`, computed on demand.
  TokenList tokens() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct NGram {
  std::vector<std::string> items;

  std::size_t order() const noexcept { return items.size(); }
  friend auto operator<=>(const NGram&, const NGram&) = default;
};

/// Splits on whitespace, then detaches leading and trailing punctuation
/// characters as one-character tokens. Punctuation inside a word (apostrophes,
/// hyphens, decimal points) stays attached.
TokenList tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string join(std::span<const Token> tokens);

struct SegmenterOptions {
  /// Lowercased words that never end a sentence when followed by '.'.
  std::set<std::string, std::less<>> abbreviations;
  /// Words of at most this many characters before '.' are treated as
  /// abbreviations. 0 disables the rule.
  std::size_t max_abbreviation_length = 0;
};

/// Boundary after a run of '.', '!' or '?' (plus closing quotes/brackets) when
/// it is followed by whitespace and an uppercase letter or digit, or by the
/// end of the text. Whitespace runs inside a sentence collapse to one space.
std::vector<Sentence> split_sentences(std::string_view text,
                                      const SegmenterOptions& options = {});

/// Unicode simple case folding of every code point.
std::string lowercase(std::string_view text);
TokenList normalize(std::span<const Token> tokens);

/// Contiguous windows of `n` tokens. Throws InvalidArgument when n == 0.
std::vector<NGram> ngrams(std::span<const Token> tokens, std::size_t n);

/// Multiset of n-grams keyed by the items joined with '\x1f'. Same
/// precondition as ngrams(); this is the form the metrics hash on.
using NGramCounts = std::unordered_map<std::string, std::size_t>;
NGramCounts count_ngrams(std::span<const Token> tokens, std::size_t n);

/// First min(size, max_len) tokens. Throws InvalidArgument when max_len == 0.
TokenList truncate(std::span<const Token> tokens, std::size_t max_len);

/// True when every code point of a non-empty token is Unicode punctuation.
bool is_punctuation(std::string_view token);

/// Drops punctuation-only tokens.
TokenList words_only(std::span<const Token> tokens);

/// Number of Unicode code points (invalid bytes count as one each).
std::size_t codepoint_count(std::string_view text);

/// Each code point as its own UTF-8 string.
std::vector<std::string> split_codepoints(std::string_view text);

/// Removes every punctuation code point.
std::string strip_punctuation(std::string_view text);

/// Trims and collapses internal whitespace runs to a single space.
std::string collapse_whitespace(std::string_view text);

}  // namespace parmine::text
