#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "parmine/error.hpp"
#include "parmine/mining.hpp"
#include "synthetic.hpp"

using namespace parmine;
using namespace parmine::mining;
using text::Sentence;

namespace {

dictionary::BilingualDictionary identity_dict(std::initializer_list<const char*> words) {
  dictionary::BilingualDictionary d({"x", "x"});
  for (const char* w : words) d.add(w, w);
  return d;
}

AlignedPair pair_of(const std::string& src, double score) {
  return AlignedPair{Sentence{src}, Sentence{"t"}, score, "d"};
}

// Independent recount: sentence frequency of lowercased source trigrams.
std::map<std::vector<std::string>, std::size_t> recount(const std::vector<AlignedPair>& pairs) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& p : pairs) {
    auto toks = p.source_sentence.tokens();
    for (auto& t : toks) t = text::lowercase(t);
    auto grams = oracle::windows(toks, 3);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (const auto& g : grams) ++counts[g];
  }
  return counts;
}

}  // namespace

TEST_CASE("normalize_title and align_documents") {
  CHECK(normalize_title("  Kucing! ") == "kucing");
  CHECK(normalize_title("Rumah   Gadang") == "rumah gadang");

  std::vector<Document> src{{"1", "Kucing", "", ""}};
  std::vector<Document> tgt{{"a", "kucing ", "", ""}};
  CHECK(align_documents(src, tgt) == std::vector<DocumentMatch>{{0, 0}});

  std::vector<Document> other{{"b", "Anjing", "", ""}};
  CHECK(align_documents(src, other).empty());

  // First document with a title wins on both sides; empty titles never match.
  std::vector<Document> s2{{"1", "A", "", ""}, {"2", "a", "", ""}, {"3", "!!", "", ""}, {"4", "B", "", ""}};
  std::vector<Document> t2{{"x", "b", "", ""}, {"y", "A", "", ""}, {"z", "a.", "", ""}, {"w", "?", "", ""}};
  CHECK(align_documents(s2, t2) == std::vector<DocumentMatch>{{0, 1}, {3, 0}});
}

TEST_CASE("config validation") {
  MiningConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.align_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.trigram_cap = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("align_sentences basic cases") {
  const auto d = identity_dict({"kato", "urang", "datang"});
  MiningConfig cfg;
  std::vector<Sentence> src{{"Urang datang."}};
  std::vector<Sentence> tgt{{"Indak ado."}, {"urang datang"}};
  auto pairs = align_sentences(src, tgt, d, cfg, "doc");
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].score == 1.0);
  CHECK(pairs[0].target_sentence.text == "urang datang");
  CHECK(pairs[0].doc_id == "doc");

  std::vector<Sentence> far{{"Lain bana iko."}};
  CHECK(align_sentences(src, far, d, cfg).empty());
}

TEST_CASE("align_sentences threshold is inclusive") {
  const dictionary::BilingualDictionary d({"x", "y"});
  MiningConfig cfg;
  // One shared word of two on each side: F1 exactly 0.5.
  std::vector<Sentence> src{{"a b"}};
  std::vector<Sentence> tgt{{"a c"}};
  CHECK(align_sentences(src, tgt, d, cfg).size() == 1);
  cfg.align_threshold = 0.5000001;
  CHECK(align_sentences(src, tgt, d, cfg).empty());
}

TEST_CASE("one_to_one resolves target collisions by score") {
  const dictionary::BilingualDictionary d({"x", "y"});
  MiningConfig cfg;
  std::vector<Sentence> src{{"a b c"}, {"a b c d"}};
  std::vector<Sentence> tgt{{"a b c d"}, {"z"}};
  auto pairs = align_sentences(src, tgt, d, cfg);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].source_sentence.text == "a b c d");
  cfg.one_to_one = false;
  CHECK(align_sentences(src, tgt, d, cfg).size() == 2);
}

TEST_CASE("planted 3x3 document matches the exhaustive oracle") {
  std::map<std::string, std::string> m{{"kucing", "cat"}, {"makan", "eats"}, {"ikan", "fish"},
                                       {"anjing", "dog"}, {"tidur", "sleeps"}, {"burung", "bird"},
                                       {"terbang", "flies"}};
  dictionary::BilingualDictionary d({"x", "y"});
  for (const auto& [s, t] : m) d.add(s, t);
  std::vector<std::string> src{"Burung terbang jauh.", "Kucing makan ikan.", "Hujan turun deras."};
  std::vector<std::string> tgt{"Cat eats fish.", "Rain falls hard outside.", "Bird flies jauh."};
  const auto oracle_m = oracle::score_matrix(m, src, tgt);
  // Argmax by hand: row 0 -> col 2 (1.0), row 1 -> col 0 (1.0), row 2 -> nothing above 0.5.
  CHECK(oracle_m[0][2] == 1.0);
  CHECK(oracle_m[1][0] == 1.0);
  CHECK(*std::max_element(oracle_m[2].begin(), oracle_m[2].end()) < 0.5);

  std::vector<Sentence> s, t;
  for (auto& x : src) s.push_back({x});
  for (auto& x : tgt) t.push_back({x});
  const auto lib_m = score_matrix(s, t, d);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(lib_m[i][j] == oracle_m[i][j]);
  }
  auto pairs = align_sentences(s, t, d, MiningConfig{});
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].source_sentence.text == src[0]);
  CHECK(pairs[0].target_sentence.text == tgt[2]);
  CHECK(pairs[1].source_sentence.text == src[1]);
  CHECK(pairs[1].target_sentence.text == tgt[0]);
}

TEST_CASE("diversity_filter without overload is the identity") {
  std::vector<AlignedPair> pairs;
  for (int i = 0; i < 50; ++i) pairs.push_back(pair_of("p q r s" + std::to_string(i), 0.6));
  MiningConfig cfg;
  CHECK(diversity_filter(pairs, cfg) == pairs);
}

TEST_CASE("diversity_filter caps a repeated trigram") {
  std::vector<AlignedPair> pairs;
  for (int i = 0; i < 150; ++i) pairs.push_back(pair_of("a b c d", 0.5 + (i % 7) * 0.01));
  MiningConfig cfg;
  FilterStats stats;
  auto out = diversity_filter(pairs, cfg, &stats);
  CHECK(out.size() == 100);
  CHECK(stats.input_pairs == 150);
  CHECK(stats.output_pairs == 100);
  CHECK(stats.overloaded_trigrams == 2);
  // The lowest scores go first, so every survivor scores at least as high as every dropped pair.
  const auto kept = diversity_filter_indices(pairs, cfg);
  std::vector<bool> is_kept(pairs.size());
  for (auto i : kept) is_kept[i] = true;
  double min_kept = 1.0, max_dropped = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (is_kept[i]) min_kept = std::min(min_kept, pairs[i].score);
    else max_dropped = std::max(max_dropped, pairs[i].score);
  }
  CHECK(min_kept >= max_dropped);
  CHECK(std::is_sorted(kept.begin(), kept.end()));
}

TEST_CASE("diversity_filter with overlapping overloaded trigrams") {
  std::mt19937_64 rng(12);
  std::vector<AlignedPair> pairs;
  for (int i = 0; i < 120; ++i) pairs.push_back(pair_of("X y z w", 0.5 + double(rng() % 100) / 200.0));
  for (int i = 0; i < 90; ++i) pairs.push_back(pair_of("x y z q", 0.5 + double(rng() % 100) / 200.0));
  for (int i = 0; i < 130; ++i) pairs.push_back(pair_of("k y z w m", 0.5 + double(rng() % 100) / 200.0));
  std::shuffle(pairs.begin(), pairs.end(), rng);
  MiningConfig cfg;
  auto out = diversity_filter(pairs, cfg);
  for (const auto& [gram, count] : recount(out)) CHECK(count <= cfg.trigram_cap);
  // Filtering an already-filtered corpus changes nothing.
  CHECK(diversity_filter(out, cfg) == out);
}

TEST_CASE("diversity_filter only constrains the top-K trigrams") {
  std::vector<AlignedPair> pairs;
  for (int i = 0; i < 30; ++i) pairs.push_back(pair_of("a b c", 0.9));
  for (int i = 0; i < 20; ++i) pairs.push_back(pair_of("d e f", 0.9));
  MiningConfig cfg;
  cfg.trigram_cap = 10;
  cfg.trigram_top_k = 1;
  auto counts = recount(diversity_filter(pairs, cfg));
  CHECK(counts[{"a", "b", "c"}] == 10);
  CHECK(counts[{"d", "e", "f"}] == 20);
}

TEST_CASE("diversity_filter is monotone in the cap") {
  std::mt19937_64 rng(2);
  std::vector<AlignedPair> pairs;
  const std::vector<std::string> w{"a", "b", "c", "d"};
  for (int i = 0; i < 400; ++i) {
    std::string s;
    for (int j = 0; j < 5; ++j) s += w[rng() % w.size()] + " ";
    pairs.push_back(pair_of(s, double(rng() % 1000) / 1000.0));
  }
  MiningConfig cfg;
  std::size_t prev = 0;
  for (std::size_t cap : {5, 20, 60, 200}) {
    cfg.trigram_cap = cap;
    auto out = diversity_filter(pairs, cfg);
    CHECK(out.size() >= prev);
    prev = out.size();
    for (const auto& [gram, count] : recount(out)) CHECK(count <= cap);
  }
}

TEST_CASE("mine on identical collections pairs every sentence with itself") {
  std::vector<Document> docs{{"1", "Satu", "Kucing makan ikan. Anjing tidur lelap.", ""},
                             {"2", "Duo", "Burung terbang tinggi sekali.", ""}};
  const auto d = identity_dict({"kucing", "makan", "ikan", "anjing", "tidur", "lelap", "burung", "terbang",
                                "tinggi", "sekali"});
  auto r = mine(docs, docs, d, MiningConfig{});
  CHECK(r.stats.document_pairs == 2);
  CHECK(r.stats.source_sentences == 3);
  REQUIRE(r.thresholded.size() == 3);
  for (const auto& p : r.thresholded) {
    CHECK(p.score == 1.0);
    CHECK(p.source_sentence == p.target_sentence);
  }
  CHECK(r.thresholded[2].doc_id == "2");
}

TEST_CASE("mine on an empty source collection") {
  std::vector<Document> tgt{{"1", "Satu", "Kucing.", ""}};
  auto r = mine(std::span<const Document>{}, tgt, dictionary::BilingualDictionary{}, MiningConfig{});
  CHECK(r.corpus.empty());
  CHECK(r.stats.source_documents == 0);
  CHECK(r.stats.document_pairs == 0);
  CHECK(r.stats.thresholded_pairs == 0);
  CHECK(r.stats.final_pairs == 0);
}

TEST_CASE("mine recovers planted pairs and is independent of jobs") {
  const auto c = synth::make_comparable_corpus(5, 8);
  auto r1 = mine(c.source_docs, c.target_docs, c.dict, MiningConfig{}, 1);
  auto r4 = mine(c.source_docs, c.target_docs, c.dict, MiningConfig{}, 4);
  CHECK(r1.corpus == r4.corpus);
  CHECK(r1.stats.document_pairs == 8);
  std::size_t found = 0;
  for (const auto& p : r1.corpus) {
    CHECK_FALSE(c.source_distractors.contains(p.source_sentence.text));
    CHECK_FALSE(c.target_distractors.contains(p.target_sentence.text));
    for (const auto& planted : c.planted) {
      if (planted.source == p.source_sentence.text && planted.target == p.target_sentence.text) ++found;
    }
  }
  CHECK(found == c.planted.size());
}
