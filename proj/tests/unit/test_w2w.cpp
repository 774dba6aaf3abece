#include <random>

#include "doctest.h"
#include "parmine/w2w.hpp"

using namespace parmine;
using namespace parmine::w2w;
using text::Sentence;
using text::TokenList;

namespace {

dictionary::BilingualDictionary coconut() {
  dictionary::BilingualDictionary d({"min", "id"});
  d.add("karambia", "kelapa");
  return d;
}

}  // namespace

TEST_CASE("translate_sentence") {
  auto r = translate_sentence(coconut(), Sentence{"karambia !"});
  CHECK(r.tokens == TokenList{"kelapa", "!"});
  CHECK(r.oov_count == 0);
  CHECK(r.word_count == 1);
  CHECK(r.token_count() == 2);

  r = translate_sentence(coconut(), Sentence{"tamasuak"});
  CHECK(r.tokens == TokenList{"tamasuak"});
  CHECK(r.oov_count == 1);
  CHECK(r.word_count == 1);

  r = translate_sentence(coconut(), Sentence{""});
  CHECK(r.tokens.empty());
  CHECK(r.oov_count == 0);
  CHECK(r.word_count == 0);
}

TEST_CASE("translation is case-insensitive and OOV tokens keep their case") {
  auto r = translate_tokens(coconut(), TokenList{"Karambia", "Tamasuak"});
  CHECK(r.tokens == TokenList{"kelapa", "Tamasuak"});
  CHECK(r.oov_count == 1);
}

TEST_CASE("preferred target is the first one") {
  dictionary::BilingualDictionary d({"min", "id"});
  d.add("balando", "belanda");
  d.add("balando", "bulando");
  CHECK(translate_tokens(d, TokenList{"balando"}).tokens == TokenList{"belanda"});
}

TEST_CASE("translate_corpus aggregates") {
  std::vector<Sentence> s{{"karambia karambia"}, {"indak ado"}};
  auto c = translate_corpus(coconut(), std::span<const Sentence>(s));
  REQUIRE(c.results.size() == 2);
  CHECK(c.oov_rate() == doctest::Approx(0.5));
  CHECK_FALSE(c.zero_denominator());

  auto empty = translate_corpus(coconut(), std::span<const Sentence>{});
  CHECK(empty.results.empty());
  CHECK(empty.zero_denominator());
  CHECK(empty.oov_rate() == 0.0);
}

TEST_CASE("translate_corpus output does not depend on jobs") {
  std::mt19937_64 rng(9);
  dictionary::BilingualDictionary d({"a", "b"});
  for (int i = 0; i < 20; ++i) d.add("w" + std::to_string(i), "v" + std::to_string(i));
  std::vector<TokenList> corpus;
  for (int i = 0; i < 300; ++i) {
    TokenList t;
    for (int j = 0; j < 6; ++j) t.push_back("w" + std::to_string(rng() % 40));
    corpus.push_back(t);
  }
  auto a = translate_corpus(d, std::span<const TokenList>(corpus), 1);
  auto b = translate_corpus(d, std::span<const TokenList>(corpus), 6);
  REQUIRE(a.results.size() == b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) CHECK(a.results[i].tokens == b.results[i].tokens);
  CHECK(a.oov_count == b.oov_count);
}
