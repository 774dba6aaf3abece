#pragma once

// ROUGE-1, corpus BLEU, Pearson correlation, human-judgment summaries and
// corpus statistics.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parmine/text.hpp"

namespace parmine::metrics {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t overlap_count = 0;
  std::size_t candidate_count = 0;
  std::size_t reference_count = 0;
};

/// Unigram overlap with clipped (multiset-min) counts.
RougeScore rouge1_f1(std::span<const text::Token> candidate, std::span<const text::Token> reference);

inline constexpr std::size_t kBleuMaxOrder = 4;

/// Sufficient statistics for corpus BLEU. Adding the statistics of every
/// sentence pair, in any order, gives the corpus statistics.
struct BleuStats {
  std::array<std::size_t, kBleuMaxOrder> matches{};
  std::array<std::size_t, kBleuMaxOrder> totals{};
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats sentence_bleu_stats(std::span<const text::Token> hypothesis,
                              std::span<const text::Token> reference);

struct BleuReport {
  /// 0..100.
  double bleu = 0.0;
  /// Smoothed n-gram precisions as fractions, n = 1..4.
  std::array<double, kBleuMaxOrder> precisions{};
  double brevity_penalty = 0.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
  std::array<std::size_t, kBleuMaxOrder> matches{};
  std::array<std::size_t, kBleuMaxOrder> totals{};
  /// Set when the hypotheses contain no tokens at all; bleu and bp are 0.
  bool zero_length = false;
};

/// Score from pooled statistics. A zero match count at order n is replaced by
/// 1 / (2^k * totals[n]) for the k-th such order; an order with no hypothesis
/// n-grams at all contributes precision 0 and forces the score to 0.
BleuReport bleu_from_stats(const BleuStats& stats);

/// Corpus-level 4-gram BLEU against a single reference per hypothesis.
/// Throws InputError on a length mismatch or an empty hypothesis list.
BleuReport bleu(std::span<const text::TokenList> hypotheses,
                std::span<const text::TokenList> references, std::size_t jobs = 1);

/// BLEU of copying the source unchanged as the hypothesis.
inline BleuReport raw_copy_baseline(std::span<const text::TokenList> source,
                                    std::span<const text::TokenList> target, std::size_t jobs = 1) {
  return bleu(source, target, jobs);
}

/// Product-moment correlation. Throws InputError for fewer than two points or
/// a length mismatch, UndefinedValue when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct JudgmentSummary {
  std::size_t items = 0;
  /// Mean over items of the two annotators' averaged score.
  double mean = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  /// Empty when either annotator's scores have zero variance.
  std::optional<double> pearson;
};

/// Scores must be integers in 1..5; throws InputError otherwise.
JudgmentSummary judgment_summary(std::span<const int> scores_a, std::span<const int> scores_b);

struct SideStats {
  std::size_t sentences = 0;
  double mean_words = 0.0;
  double std_words = 0.0;
  double mean_chars = 0.0;
  double std_chars = 0.0;
  std::size_t vocab_size = 0;
};

struct CorpusStats {
  SideStats a;
  SideStats b;
  std::size_t overlapping_vocab = 0;
  bool empty = true;
};

/// Per-side mean and population standard deviation of token and character
/// counts; vocabularies are lowercased non-punctuation tokens.
CorpusStats corpus_stats(std::span<const text::Sentence> side_a, std::span<const text::Sentence> side_b);

}  // namespace parmine::metrics
