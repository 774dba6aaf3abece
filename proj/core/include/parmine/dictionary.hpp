#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace parmine::dictionary {

/// Ordered language pair, e.g. {"min", "id"}.
struct LanguagePair {
  std::string source;
  std::string target;

  LanguagePair reversed() const { return {target, source}; }
  std::string str() const { return source + "-" + target; }
  friend bool operator==(const LanguagePair&, const LanguagePair&) = default;
};

/// Parses "min-id" style tags. Throws InputError on a malformed tag.
LanguagePair parse_language_pair(std::string_view tag);

struct DictEntry {
  std::string source_word;
  /// Non-empty, duplicate-free; the first target is the preferred one.
  std::vector<std::string> targets;
};

/// Many-to-many word map. Keys and targets are stored lowercased; entries keep
/// insertion order, which defines both target preference and the source order
/// of the inverted view.
class BilingualDictionary {
 public:
  BilingualDictionary() = default;
  explicit BilingualDictionary(LanguagePair direction) : direction_(std::move(direction)) {}

  /// Adds (source, target), lowercasing both. Duplicate pairs are ignored.
  /// Throws InvalidArgument for empty or whitespace-containing words.
  void add(std::string_view source, std::string_view target);

  /// Case-insensitive lookup; nullopt when absent or when `word` is empty.
  std::optional<std::span<const std::string>> lookup(std::string_view word) const;

  /// Exact lookup of an already-lowercased word.
  const DictEntry* find(std::string_view lowercased) const;

  const std::vector<DictEntry>& entries() const noexcept { return entries_; }
  const LanguagePair& direction() const noexcept { return direction_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t pair_count() const noexcept;

 private:
  LanguagePair direction_;
  std::vector<DictEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reference word list used to discard unregistered translations.
class Lexicon {
 public:
  Lexicon() = default;
  void insert(std::string_view word);
  bool contains(std::string_view lowercased) const { return words_.contains(std::string(lowercased)); }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Reads `source<TAB>t1|t2|...` rows. '#' lines and blank lines are skipped,
/// columns past the second are ignored. Throws ParseError (with line number)
/// for rows with fewer than two columns, empty targets or multi-word targets.
BilingualDictionary read_dictionary(std::istream& in, LanguagePair direction,
                                    const std::string& source_name = "<input>");
BilingualDictionary load_dictionary(const std::string& path, LanguagePair direction);

/// Writes entries in insertion order in the same TSV format.
void write_dictionary(std::ostream& out, const BilingualDictionary& dict);

/// One word per line. Blank lines and '#' lines are skipped, as are entries
/// containing whitespace (they can never match a single-token target).
Lexicon read_lexicon(std::istream& in);
Lexicon load_lexicon(const std::string& path);

/// Keeps only targets present in the lexicon; drops entries left empty.
BilingualDictionary filter_by_lexicon(const BilingualDictionary& dict, const Lexicon& lexicon);

/// Target -> sources view. Each inverted entry lists sources in the order they
/// first appear in `dict`; inverted keys are ordered by first appearance too.
BilingualDictionary invert(const BilingualDictionary& dict);

/// Fraction of entries whose source word is among its own targets.
/// Throws UndefinedValue on an empty dictionary.
double identity_ratio(const BilingualDictionary& dict);

struct DictionaryStats {
  std::size_t entries = 0;
  std::size_t pairs = 0;
  std::size_t identical_entries = 0;
  std::optional<double> identity_ratio;
  /// Target words reached from two or more source words.
  std::size_t targets_with_multiple_sources = 0;
  std::size_t distinct_targets = 0;
};

DictionaryStats dictionary_stats(const BilingualDictionary& dict);

}  // namespace parmine::dictionary
