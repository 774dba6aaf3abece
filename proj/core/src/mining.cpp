#include "parmine/mining.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "parmine/error.hpp"
#include "parmine/metrics.hpp"
#include "parmine/parallel.hpp"
#include "parmine/w2w.hpp"

namespace parmine::mining {

void MiningConfig::validate() const {
  if (!(align_threshold >= 0.0 && align_threshold <= 1.0)) {
    throw ConfigError("alignment threshold must lie in [0, 1]");
  }
  if (trigram_top_k < 1) throw ConfigError("trigram top-k must be at least 1");
  if (trigram_cap < 1) throw ConfigError("trigram cap must be at least 1");
}

std::string normalize_title(std::string_view title) {
  return text::collapse_whitespace(text::strip_punctuation(text::lowercase(title)));
}

std::vector<DocumentMatch> align_documents(std::span<const Document> source_docs,
                                           std::span<const Document> target_docs) {
  std::unordered_map<std::string, std::size_t> target_by_title;
  target_by_title.reserve(target_docs.size());
  for (std::size_t i = 0; i < target_docs.size(); ++i) {
    auto key = normalize_title(target_docs[i].title);
    if (!key.empty()) target_by_title.try_emplace(std::move(key), i);
  }

  std::vector<DocumentMatch> matches;
  std::unordered_set<std::string> used;
  for (std::size_t i = 0; i < source_docs.size(); ++i) {
    auto key = normalize_title(source_docs[i].title);
    if (key.empty()) continue;
    auto it = target_by_title.find(key);
    if (it == target_by_title.end()) continue;
    if (!used.insert(std::move(key)).second) continue;
    matches.push_back({i, it->second});
  }
  return matches;
}

text::TokenList alignment_tokens(std::span<const text::Token> tokens) {
  text::TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!text::is_punctuation(t)) out.push_back(text::lowercase(t));
  }
  return out;
}

namespace {

std::vector<text::TokenList> translated_side(std::span<const text::Sentence> source,
                                             const dictionary::BilingualDictionary& dict) {
  std::vector<text::TokenList> out;
  out.reserve(source.size());
  for (const auto& s : source) {
    const auto tokens = s.tokens();
    out.push_back(alignment_tokens(w2w::translate_tokens(dict, tokens).tokens));
  }
  return out;
}

std::vector<text::TokenList> plain_side(std::span<const text::Sentence> target) {
  std::vector<text::TokenList> out;
  out.reserve(target.size());
  for (const auto& s : target) {
    const auto tokens = s.tokens();
    out.push_back(alignment_tokens(tokens));
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> score_matrix(std::span<const text::Sentence> source,
                                              std::span<const text::Sentence> target,
                                              const dictionary::BilingualDictionary& dict) {
  const auto src = translated_side(source, dict);
  const auto tgt = plain_side(target);
  std::vector<std::vector<double>> m(src.size(), std::vector<double>(tgt.size(), 0.0));
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) m[i][j] = metrics::rouge1_f1(src[i], tgt[j]).f1;
  }
  return m;
}

std::vector<AlignedPair> align_sentences(std::span<const text::Sentence> source,
                                         std::span<const text::Sentence> target,
                                         const dictionary::BilingualDictionary& dict,
                                         const MiningConfig& config, const std::string& doc_id) {
  std::vector<AlignedPair> out;
  if (source.empty() || target.empty()) return out;
  const auto scores = score_matrix(source, target, dict);

  struct Candidate {
    std::size_t source;
    std::size_t target;
    double score;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < source.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < target.size(); ++j) {
      if (scores[i][j] > scores[i][best]) best = j;
    }
    if (scores[i][best] >= config.align_threshold) candidates.push_back({i, best, scores[i][best]});
  }

  if (config.one_to_one) {
    std::vector<Candidate> by_score = candidates;
    std::stable_sort(by_score.begin(), by_score.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    std::vector<bool> taken(target.size(), false);
    std::vector<bool> keep(source.size(), false);
    for (const auto& c : by_score) {
      if (taken[c.target]) continue;
      taken[c.target] = true;
      keep[c.source] = true;
    }
    std::erase_if(candidates, [&](const Candidate& c) { return !keep[c.source]; });
  }

  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back({source[c.source], target[c.target], c.score, doc_id});
  }
  return out;
}

std::vector<std::string> sentence_trigrams(const text::Sentence& sentence) {
  const auto tokens = text::normalize(sentence.tokens());
  std::vector<std::string> keys;
  keys.reserve(tokens.size());
  for (auto& [key, count] : text::count_ngrams(tokens, 3)) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<std::size_t> diversity_filter_indices(std::span<const AlignedPair> pairs,
                                                  const MiningConfig& config, FilterStats* stats) {
  config.validate();
  const std::size_t n = pairs.size();

  // Sentence-level occurrence lists per trigram.
  std::vector<std::vector<std::string>> sentence_keys(n);
  std::unordered_map<std::string, std::vector<std::size_t>> postings;
  for (std::size_t i = 0; i < n; ++i) {
    sentence_keys[i] = sentence_trigrams(pairs[i].source_sentence);
    for (const auto& k : sentence_keys[i]) postings[k].push_back(i);
  }

  // Tracked set: top-K by sentence frequency, ties by trigram order.
  std::vector<const std::string*> ranked;
  ranked.reserve(postings.size());
  for (const auto& [key, list] : postings) ranked.push_back(&key);
  std::sort(ranked.begin(), ranked.end(), [&](const std::string* a, const std::string* b) {
    const auto ca = postings.at(*a).size();
    const auto cb = postings.at(*b).size();
    return ca != cb ? ca > cb : *a < *b;
  });
  if (ranked.size() > config.trigram_top_k) ranked.resize(config.trigram_top_k);
  std::sort(ranked.begin(), ranked.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });

  struct Tracked {
    const std::string* key;
    std::vector<std::size_t> order;  // containing sentences by (score, index)
    std::size_t cursor = 0;
    std::size_t count = 0;
  };
  std::vector<Tracked> tracked;
  tracked.reserve(ranked.size());
  std::unordered_map<std::string_view, std::size_t> tracked_slot;
  for (const auto* key : ranked) {
    Tracked t{key, postings.at(*key)};
    t.count = t.order.size();
    std::stable_sort(t.order.begin(), t.order.end(), [&](std::size_t a, std::size_t b) {
      return pairs[a].score < pairs[b].score;
    });
    tracked_slot.emplace(*key, tracked.size());
    tracked.push_back(std::move(t));
  }

  std::size_t overloaded = 0;
  for (const auto& t : tracked) overloaded += t.count > config.trigram_cap;

  std::vector<bool> removed(n, false);
  for (;;) {
    // Most overloaded tracked trigram; `tracked` is in trigram order, so the
    // first maximum is also the lexicographically smallest.
    Tracked* worst = nullptr;
    for (auto& t : tracked) {
      if (t.count > config.trigram_cap && (worst == nullptr || t.count > worst->count)) worst = &t;
    }
    if (worst == nullptr) break;
    while (worst->count > config.trigram_cap) {
      const std::size_t victim = worst->order[worst->cursor++];
      if (removed[victim]) continue;
      removed[victim] = true;
      for (const auto& k : sentence_keys[victim]) {
        auto it = tracked_slot.find(k);
        if (it != tracked_slot.end()) --tracked[it->second].count;
      }
    }
  }

  std::vector<std::size_t> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) kept.push_back(i);
  }
  if (stats != nullptr) {
    stats->input_pairs = n;
    stats->output_pairs = kept.size();
    stats->tracked_trigrams = tracked.size();
    stats->overloaded_trigrams = overloaded;
  }
  return kept;
}

std::vector<AlignedPair> diversity_filter(std::span<const AlignedPair> pairs, const MiningConfig& config,
                                          FilterStats* stats) {
  const auto kept = diversity_filter_indices(pairs, config, stats);
  std::vector<AlignedPair> out;
  out.reserve(kept.size());
  for (auto i : kept) out.push_back(pairs[i]);
  return out;
}

std::vector<AlignedPair> align_document_pair(const Document& source, const Document& target,
                                             const dictionary::BilingualDictionary& dict,
                                             const MiningConfig& config, std::size_t* source_sentences,
                                             std::size_t* target_sentences) {
  const auto src = text::split_sentences(source.text, config.segmenter);
  const auto tgt = text::split_sentences(target.text, config.segmenter);
  if (source_sentences != nullptr) *source_sentences = src.size();
  if (target_sentences != nullptr) *target_sentences = tgt.size();
  return align_sentences(src, tgt, dict, config, source.id);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

MiningResult mine(std::span<const Document> source_docs, std::span<const Document> target_docs,
                  const dictionary::BilingualDictionary& dict, const MiningConfig& config,
                  std::size_t jobs) {
  config.validate();
  MiningResult result;
  auto& stats = result.stats;
  stats.source_documents = source_docs.size();
  stats.target_documents = target_docs.size();

  auto t0 = std::chrono::steady_clock::now();
  const auto matches = align_documents(source_docs, target_docs);
  stats.document_pairs = matches.size();
  stats.seconds_documents = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  struct Slot {
    std::vector<AlignedPair> pairs;
    std::size_t source_sentences = 0;
    std::size_t target_sentences = 0;
  };
  std::vector<Slot> slots(matches.size());
  parallel_for(matches.size(), jobs, [&](std::size_t i) {
    auto& slot = slots[i];
    slot.pairs = align_document_pair(source_docs[matches[i].source_index],
                                     target_docs[matches[i].target_index], dict, config,
                                     &slot.source_sentences, &slot.target_sentences);
  });
  for (auto& slot : slots) {
    stats.source_sentences += slot.source_sentences;
    stats.target_sentences += slot.target_sentences;
    for (auto& p : slot.pairs) result.thresholded.push_back(std::move(p));
  }
  stats.thresholded_pairs = result.thresholded.size();
  stats.seconds_alignment = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  result.corpus = diversity_filter(result.thresholded, config, &stats.filter);
  stats.final_pairs = result.corpus.size();
  stats.seconds_filter = seconds_since(t0);
  return result;
}

}  // namespace parmine::mining
