#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "parmine/text.hpp"

namespace parmine::sentiment {

/// Marker glued to the last symbol of every word.
inline constexpr std::string_view kEndOfWord = "</w>";

/// Byte-pair encoding merge table learned over lowercased words.
class BpeModel {
 public:
  using Merge = std::pair<std::string, std::string>;

  BpeModel() = default;
  BpeModel(std::vector<Merge> merges, std::size_t vocab_size, std::size_t alphabet_size);

  const std::vector<Merge>& merges() const noexcept { return merges_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }

  /// Subword symbols of one (already lowercased) word.
  std::vector<std::string> encode_word(std::string_view word) const;

  /// Tokenizes, lowercases and encodes every word of `text`.
  text::TokenList encode(std::string_view text) const;

 private:
  std::vector<Merge> merges_;
  std::unordered_map<std::string, std::size_t> rank_;
  std::size_t vocab_size_ = 0;
  std::size_t alphabet_size_ = 0;
};

/// Greedy merge learning: at each step merge the most frequent adjacent pair
/// (ties: smaller (left, right) strings). Stops once alphabet + merges reaches
/// `vocab_size` or no pair occurs at least twice.
/// Throws InputError on an empty corpus or vocab_size <= alphabet size.
BpeModel bpe_train(std::span<const std::string> texts, std::size_t vocab_size);

/// One merge per line: `left<SPACE>right`, preceded by a `#vocab_size N
/// alphabet M` header.
void write_bpe(std::ostream& out, const BpeModel& model);
BpeModel read_bpe(std::istream& in, const std::string& source_name = "<input>");

}  // namespace parmine::sentiment
