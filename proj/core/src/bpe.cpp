#include "parmine/bpe.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "parmine/error.hpp"

namespace parmine::sentiment {
namespace {

std::vector<std::string> initial_symbols(std::string_view word) {
  auto symbols = text::split_codepoints(word);
  if (!symbols.empty()) symbols.back() += kEndOfWord;
  return symbols;
}

std::string merge_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(' ');
  key.append(right);
  return key;
}

std::map<std::string, std::size_t> word_frequencies(std::span<const std::string> texts) {
  std::map<std::string, std::size_t> freq;
  for (const auto& t : texts) {
    for (const auto& token : text::tokenize(t)) ++freq[text::lowercase(token)];
  }
  return freq;
}

}  // namespace

BpeModel::BpeModel(std::vector<Merge> merges, std::size_t vocab_size, std::size_t alphabet_size)
    : merges_(std::move(merges)), vocab_size_(vocab_size), alphabet_size_(alphabet_size) {
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    if (!rank_.try_emplace(merge_key(merges_[i].first, merges_[i].second), i).second) {
      throw InvalidArgument("duplicate BPE merge '" + merges_[i].first + " " + merges_[i].second + "'");
    }
  }
}

std::vector<std::string> BpeModel::encode_word(std::string_view word) const {
  auto symbols = initial_symbols(word);
  while (symbols.size() > 1) {
    std::size_t best_rank = merges_.size();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = rank_.find(merge_key(symbols[i], symbols[i + 1]));
      if (it != rank_.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == merges_.size()) break;
    const auto& [left, right] = merges_[best_rank];
    std::vector<std::string> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
        merged.push_back(left + right);
        ++i;
      } else {
        merged.push_back(std::move(symbols[i]));
      }
    }
    symbols = std::move(merged);
  }
  return symbols;
}

text::TokenList BpeModel::encode(std::string_view input) const {
  text::TokenList out;
  for (const auto& token : text::tokenize(input)) {
    for (auto& s : encode_word(text::lowercase(token))) out.push_back(std::move(s));
  }
  return out;
}

BpeModel bpe_train(std::span<const std::string> texts, std::size_t vocab_size) {
  const auto freq = word_frequencies(texts);
  if (freq.empty()) throw InputError("cannot learn BPE merges from an empty corpus");

  // Symbol interning.
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = ids.try_emplace(s, static_cast<int>(names.size()));
    if (inserted) names.push_back(s);
    return it->second;
  };

  struct Word {
    std::vector<int> symbols;
    std::size_t count;
  };
  std::vector<Word> words;
  words.reserve(freq.size());
  for (const auto& [w, c] : freq) {
    Word word{{}, c};
    for (const auto& s : initial_symbols(w)) word.symbols.push_back(intern(s));
    words.push_back(std::move(word));
  }
  const std::size_t alphabet = names.size();
  if (vocab_size <= alphabet) {
    throw InputError("BPE vocabulary size " + std::to_string(vocab_size) +
                     " must exceed the alphabet size " + std::to_string(alphabet));
  }

  auto pair_id = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  };
  std::unordered_map<std::uint64_t, std::size_t> counts;
  std::unordered_map<std::uint64_t, std::set<std::size_t>> where;
  // Ordered by (count desc, left, right); begin() is the next merge.
  using Ranked = std::tuple<std::size_t, std::string, std::string>;
  auto cmp = [](const Ranked& a, const Ranked& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  };
  std::set<Ranked, decltype(cmp)> queue(cmp);

  auto adjust = [&](int a, int b, long long delta, std::size_t word_index) {
    const auto id = pair_id(a, b);
    auto& c = counts[id];
    if (c > 0) queue.erase({c, names[static_cast<std::size_t>(a)], names[static_cast<std::size_t>(b)]});
    c = static_cast<std::size_t>(static_cast<long long>(c) + delta);
    if (c > 0) {
      queue.insert({c, names[static_cast<std::size_t>(a)], names[static_cast<std::size_t>(b)]});
      if (delta > 0) where[id].insert(word_index);
    }
  };

  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto& s = words[w].symbols;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      adjust(s[i], s[i + 1], static_cast<long long>(words[w].count), w);
    }
  }

  std::vector<BpeModel::Merge> merges;
  while (alphabet + merges.size() < vocab_size && !queue.empty()) {
    const auto [count, left, right] = *queue.begin();
    if (count < 2) break;
    const int a = ids.at(left);
    const int b = ids.at(right);
    const int merged = intern(left + right);
    merges.emplace_back(left, right);

    const auto affected = where[pair_id(a, b)];
    for (const std::size_t w : affected) {
      auto& s = words[w].symbols;
      const auto c = static_cast<long long>(words[w].count);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) adjust(s[i], s[i + 1], -c, w);
      std::vector<int> out;
      out.reserve(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 1 < s.size() && s[i] == a && s[i + 1] == b) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(s[i]);
        }
      }
      s = std::move(out);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) adjust(s[i], s[i + 1], c, w);
    }
    where.erase(pair_id(a, b));
  }
  return BpeModel(std::move(merges), vocab_size, alphabet);
}

void write_bpe(std::ostream& out, const BpeModel& model) {
  out << "#vocab_size " << model.vocab_size() << " alphabet " << model.alphabet_size() << '\n';
  for (const auto& [l, r] : model.merges()) out << l << ' ' << r << '\n';
}

BpeModel read_bpe(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t vocab = 0;
  std::size_t alphabet = 0;
  std::vector<BpeModel::Merge> merges;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream header(line.substr(1));
      std::string k1, k2;
      header >> k1 >> vocab >> k2 >> alphabet;
      if (!header || k1 != "vocab_size" || k2 != "alphabet") {
        throw ParseError(source_name, line_no, "malformed BPE header");
      }
      continue;
    }
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 == line.size() ||
        line.find(' ', space + 1) != std::string::npos) {
      throw ParseError(source_name, line_no, "expected 'left right'");
    }
    merges.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  try {
    return BpeModel(std::move(merges), vocab, alphabet);
  } catch (const InvalidArgument& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

}  // namespace parmine::sentiment
