#pragma once

// Parallel-sentence mining from comparable document collections:
// title matching -> sentence segmentation -> dictionary translation of the
// source side -> ROUGE-1 alignment -> trigram diversity filter.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parmine/dictionary.hpp"
#include "parmine/text.hpp"

namespace parmine::mining {

struct Document {
  std::string id;
  std::string title;
  std::string text;
  std::string language;
};

struct AlignedPair {
  text::Sentence source_sentence;
  text::Sentence target_sentence;
  double score = 0.0;
  std::string doc_id;

  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

struct MiningConfig {
  double align_threshold = 0.5;
  std::size_t trigram_top_k = 1000;
  std::size_t trigram_cap = 100;
  bool one_to_one = true;
  text::SegmenterOptions segmenter;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Lowercased, punctuation stripped, whitespace collapsed.
std::string normalize_title(std::string_view title);

struct DocumentMatch {
  std::size_t source_index;
  std::size_t target_index;
  friend bool operator==(const DocumentMatch&, const DocumentMatch&) = default;
};

/// Pairs documents whose normalized titles are equal, in source order. Only the
/// first document carrying a given title on either side takes part; documents
/// whose title normalizes to nothing are skipped.
std::vector<DocumentMatch> align_documents(std::span<const Document> source_docs,
                                           std::span<const Document> target_docs);

/// Tokens used to score a sentence: lowercased, punctuation removed.
text::TokenList alignment_tokens(std::span<const text::Token> tokens);

/// Full source x target ROUGE-1 F1 matrix, source sentences first translated
/// word-to-word. Row-major, rows = source sentences.
std::vector<std::vector<double>> score_matrix(std::span<const text::Sentence> source,
                                              std::span<const text::Sentence> target,
                                              const dictionary::BilingualDictionary& dict);

/// Pairs each source sentence with its best-scoring target (lowest index on
/// ties), drops pairs below the threshold, and with one_to_one resolves target
/// collisions greedily by descending score (ties: lower source index wins).
/// Output follows source sentence order.
std::vector<AlignedPair> align_sentences(std::span<const text::Sentence> source,
                                         std::span<const text::Sentence> target,
                                         const dictionary::BilingualDictionary& dict,
                                         const MiningConfig& config, const std::string& doc_id = {});

struct FilterStats {
  std::size_t input_pairs = 0;
  std::size_t output_pairs = 0;
  std::size_t tracked_trigrams = 0;
  /// Tracked trigrams above the cap before filtering.
  std::size_t overloaded_trigrams = 0;
};

/// Caps the sentence frequency of the top-K source trigrams. While some
/// tracked trigram occurs in more than `trigram_cap` sentences, take the most
/// frequent one (ties: smaller trigram) and drop its sentences in ascending
/// score order (ties: input order) until it fits. Returns surviving input
/// indices in increasing order.
std::vector<std::size_t> diversity_filter_indices(std::span<const AlignedPair> pairs,
                                                  const MiningConfig& config,
                                                  FilterStats* stats = nullptr);
std::vector<AlignedPair> diversity_filter(std::span<const AlignedPair> pairs, const MiningConfig& config,
                                          FilterStats* stats = nullptr);

/// Source-side trigram keys ('\x1f'-joined, lowercased) of one sentence,
/// deduplicated.
std::vector<std::string> sentence_trigrams(const text::Sentence& sentence);

struct MiningStats {
  std::size_t source_documents = 0;
  std::size_t target_documents = 0;
  std::size_t document_pairs = 0;
  std::size_t source_sentences = 0;
  std::size_t target_sentences = 0;
  std::size_t thresholded_pairs = 0;
  std::size_t final_pairs = 0;
  FilterStats filter;
  double seconds_documents = 0.0;
  double seconds_alignment = 0.0;
  double seconds_filter = 0.0;
};

struct MiningResult {
  std::vector<AlignedPair> thresholded;
  std::vector<AlignedPair> corpus;
  MiningStats stats;
};

/// Aligns the sentences of one matched document pair.
std::vector<AlignedPair> align_document_pair(const Document& source, const Document& target,
                                             const dictionary::BilingualDictionary& dict,
                                             const MiningConfig& config,
                                             std::size_t* source_sentences = nullptr,
                                             std::size_t* target_sentences = nullptr);

/// Whole pipeline over in-memory collections. Document pairs are aligned on up
/// to `jobs` threads; the output does not depend on `jobs`.
MiningResult mine(std::span<const Document> source_docs, std::span<const Document> target_docs,
                  const dictionary::BilingualDictionary& dict, const MiningConfig& config,
                  std::size_t jobs = 1);

}  // namespace parmine::mining
