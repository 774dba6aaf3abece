#include "parmine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "parmine/error.hpp"
#include "parmine/parallel.hpp"

namespace parmine::metrics {

RougeScore rouge1_f1(std::span<const text::Token> candidate, std::span<const text::Token> reference) {
  RougeScore s;
  s.candidate_count = candidate.size();
  s.reference_count = reference.size();
  if (candidate.empty() || reference.empty()) return s;

  std::unordered_map<std::string_view, std::size_t> ref_counts;
  ref_counts.reserve(reference.size());
  for (const auto& t : reference) ++ref_counts[t];
  for (const auto& t : candidate) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++s.overlap_count;
    }
  }
  s.precision = static_cast<double>(s.overlap_count) / static_cast<double>(s.candidate_count);
  s.recall = static_cast<double>(s.overlap_count) / static_cast<double>(s.reference_count);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

BleuStats sentence_bleu_stats(std::span<const text::Token> hypothesis,
                              std::span<const text::Token> reference) {
  BleuStats s;
  s.hyp_length = hypothesis.size();
  s.ref_length = reference.size();
  for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
    if (hypothesis.size() < n) break;
    const auto hyp = text::count_ngrams(hypothesis, n);
    const auto ref = text::count_ngrams(reference, n);
    std::size_t matched = 0;
    for (const auto& [gram, count] : hyp) {
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    s.matches[n - 1] = matched;
    s.totals[n - 1] = hypothesis.size() - n + 1;
  }
  return s;
}

BleuReport bleu_from_stats(const BleuStats& stats) {
  BleuReport r;
  r.hyp_length = stats.hyp_length;
  r.ref_length = stats.ref_length;
  r.matches = stats.matches;
  r.totals = stats.totals;
  if (stats.hyp_length == 0) {
    r.zero_length = true;
    return r;
  }

  double smooth = 1.0;
  for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
    if (stats.totals[n] == 0) break;
    if (stats.matches[n] == 0) {
      smooth *= 2.0;
      r.precisions[n] = 1.0 / (smooth * static_cast<double>(stats.totals[n]));
    } else {
      r.precisions[n] =
          static_cast<double>(stats.matches[n]) / static_cast<double>(stats.totals[n]);
    }
  }

  r.brevity_penalty =
      stats.hyp_length >= stats.ref_length
          ? 1.0
          : std::exp(1.0 - static_cast<double>(stats.ref_length) / static_cast<double>(stats.hyp_length));

  double log_sum = 0.0;
  for (const double p : r.precisions) {
    if (p <= 0.0) return r;  // bleu stays 0
    log_sum += std::log(p);
  }
  r.bleu = 100.0 * r.brevity_penalty * std::exp(log_sum / static_cast<double>(kBleuMaxOrder));
  return r;
}

BleuReport bleu(std::span<const text::TokenList> hypotheses,
                std::span<const text::TokenList> references, std::size_t jobs) {
  if (hypotheses.size() != references.size()) {
    throw InputError("hypothesis and reference counts differ (" + std::to_string(hypotheses.size()) +
                     " vs " + std::to_string(references.size()) + ")");
  }
  if (hypotheses.empty()) throw InputError("BLEU needs at least one hypothesis");

  std::vector<BleuStats> per_sentence(hypotheses.size());
  parallel_for(hypotheses.size(), jobs, [&](std::size_t i) {
    per_sentence[i] = sentence_bleu_stats(hypotheses[i], references[i]);
  });
  BleuStats total;
  for (const auto& s : per_sentence) total += s;
  return bleu_from_stats(total);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson: inputs differ in length");
  if (x.size() < 2) throw InputError("pearson: need at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedValue("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

JudgmentSummary judgment_summary(std::span<const int> scores_a, std::span<const int> scores_b) {
  if (scores_a.size() != scores_b.size()) throw InputError("annotator score lists differ in length");
  if (scores_a.size() < 2) throw InputError("need at least two judged items");
  auto check = [](int v) {
    if (v < 1 || v > 5) throw InputError("judgment score " + std::to_string(v) + " outside 1..5");
  };
  JudgmentSummary s;
  s.items = scores_a.size();
  std::vector<double> a, b;
  a.reserve(s.items);
  b.reserve(s.items);
  double avg_sum = 0.0;
  for (std::size_t i = 0; i < s.items; ++i) {
    check(scores_a[i]);
    check(scores_b[i]);
    a.push_back(scores_a[i]);
    b.push_back(scores_b[i]);
    avg_sum += (scores_a[i] + scores_b[i]) / 2.0;
    s.mean_a += scores_a[i];
    s.mean_b += scores_b[i];
  }
  const auto n = static_cast<double>(s.items);
  s.mean = avg_sum / n;
  s.mean_a /= n;
  s.mean_b /= n;
  try {
    s.pearson = pearson(a, b);
  } catch (const UndefinedValue&) {
    s.pearson.reset();
  }
  return s;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd population_mean_std(const std::vector<double>& v) {
  MeanStd m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(v.size()));
  return m;
}

SideStats side_stats(std::span<const text::Sentence> side, std::set<std::string>& vocab) {
  SideStats s;
  s.sentences = side.size();
  std::vector<double> words, chars;
  words.reserve(side.size());
  chars.reserve(side.size());
  for (const auto& sentence : side) {
    const auto tokens = sentence.tokens();
    words.push_back(static_cast<double>(tokens.size()));
    chars.push_back(static_cast<double>(text::codepoint_count(sentence.text)));
    for (const auto& t : tokens) {
      if (!text::is_punctuation(t)) vocab.insert(text::lowercase(t));
    }
  }
  const auto w = population_mean_std(words);
  const auto c = population_mean_std(chars);
  s.mean_words = w.mean;
  s.std_words = w.std;
  s.mean_chars = c.mean;
  s.std_chars = c.std;
  s.vocab_size = vocab.size();
  return s;
}

}  // namespace

CorpusStats corpus_stats(std::span<const text::Sentence> side_a, std::span<const text::Sentence> side_b) {
  CorpusStats out;
  std::set<std::string> vocab_a, vocab_b;
  out.a = side_stats(side_a, vocab_a);
  out.b = side_stats(side_b, vocab_b);
  out.empty = side_a.empty() && side_b.empty();
  std::vector<std::string> common;
  std::set_intersection(vocab_a.begin(), vocab_a.end(), vocab_b.begin(), vocab_b.end(),
                        std::back_inserter(common));
  out.overlapping_vocab = common.size();
  return out;
}

}  // namespace parmine::metrics
