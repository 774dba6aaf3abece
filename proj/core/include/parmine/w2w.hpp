#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "parmine/dictionary.hpp"
#include "parmine/text.hpp"

namespace parmine::w2w {

struct TranslationResult {
  text::TokenList tokens;
  /// Word tokens with no dictionary entry; they pass through unchanged.
  std::size_t oov_count = 0;
  /// Word tokens seen. Punctuation-only tokens are copied but not counted.
  std::size_t word_count = 0;

  std::size_t token_count() const noexcept { return tokens.size(); }
};

/// Replaces every word token that has a dictionary entry with its preferred
/// (first) target. Token count is preserved.
TranslationResult translate_tokens(const dictionary::BilingualDictionary& dict,
                                   std::span<const text::Token> tokens);
TranslationResult translate_sentence(const dictionary::BilingualDictionary& dict,
                                     const text::Sentence& sentence);

struct CorpusTranslation {
  std::vector<TranslationResult> results;
  std::size_t oov_count = 0;
  std::size_t word_count = 0;

  /// True when no word tokens were seen; oov_rate() then reports 0.
  bool zero_denominator() const noexcept { return word_count == 0; }
  double oov_rate() const noexcept {
    return word_count == 0 ? 0.0 : static_cast<double>(oov_count) / static_cast<double>(word_count);
  }
};

/// Translates every sentence, fanning out over `jobs` workers. Results are in
/// input order regardless of `jobs`.
CorpusTranslation translate_corpus(const dictionary::BilingualDictionary& dict,
                                   std::span<const text::Sentence> sentences,
                                   std::size_t jobs = 1);
CorpusTranslation translate_corpus(const dictionary::BilingualDictionary& dict,
                                   std::span<const text::TokenList> sentences,
                                   std::size_t jobs = 1);

}  // namespace parmine::w2w
