#include "parmine/w2w.hpp"

#include "parmine/parallel.hpp"

namespace parmine::w2w {

TranslationResult translate_tokens(const dictionary::BilingualDictionary& dict,
                                   std::span<const text::Token> tokens) {
  TranslationResult result;
  result.tokens.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (text::is_punctuation(token)) {
      result.tokens.push_back(token);
      continue;
    }
    ++result.word_count;
    if (const auto* entry = dict.find(text::lowercase(token))) {
      result.tokens.push_back(entry->targets.front());
    } else {
      ++result.oov_count;
      result.tokens.push_back(token);
    }
  }
  return result;
}

TranslationResult translate_sentence(const dictionary::BilingualDictionary& dict,
                                     const text::Sentence& sentence) {
  const auto tokens = sentence.tokens();
  return translate_tokens(dict, tokens);
}

namespace {

template <typename Item, typename Translate>
CorpusTranslation translate_all(std::span<const Item> items, std::size_t jobs, Translate&& translate) {
  CorpusTranslation out;
  out.results.resize(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t i) { out.results[i] = translate(items[i]); });
  for (const auto& r : out.results) {
    out.oov_count += r.oov_count;
    out.word_count += r.word_count;
  }
  return out;
}

}  // namespace

CorpusTranslation translate_corpus(const dictionary::BilingualDictionary& dict,
                                   std::span<const text::Sentence> sentences, std::size_t jobs) {
  return translate_all(sentences, jobs,
                       [&](const text::Sentence& s) { return translate_sentence(dict, s); });
}

CorpusTranslation translate_corpus(const dictionary::BilingualDictionary& dict,
                                   std::span<const text::TokenList> sentences, std::size_t jobs) {
  return translate_all(sentences, jobs,
                       [&](const text::TokenList& s) { return translate_tokens(dict, s); });
}

}  // namespace parmine::w2w
