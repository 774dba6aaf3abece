#include "parmine/dictionary.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "parmine/error.hpp"
#include "parmine/text.hpp"

namespace parmine::dictionary {
namespace {

bool has_inner_space(std::string_view word) {
  return text::collapse_whitespace(word).find(' ') != std::string::npos;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string trimmed(std::string_view s) { return text::collapse_whitespace(s); }

}  // namespace

LanguagePair parse_language_pair(std::string_view tag) {
  const auto dash = tag.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == tag.size() ||
      tag.find('-', dash + 1) != std::string_view::npos) {
    throw InputError("language pair must look like 'src-tgt', got '" + std::string(tag) + "'");
  }
  return {text::lowercase(tag.substr(0, dash)), text::lowercase(tag.substr(dash + 1))};
}

void BilingualDictionary::add(std::string_view source, std::string_view target) {
  if (source.empty() || target.empty()) throw InvalidArgument("dictionary words must be non-empty");
  if (text::collapse_whitespace(source) != source || text::collapse_whitespace(target) != target ||
      source.find(' ') != std::string_view::npos || target.find(' ') != std::string_view::npos) {
    throw InvalidArgument("dictionary words must be single tokens");
  }
  auto src = text::lowercase(source);
  auto tgt = text::lowercase(target);
  auto it = index_.find(src);
  if (it == index_.end()) {
    index_.emplace(src, entries_.size());
    entries_.push_back({std::move(src), {std::move(tgt)}});
    return;
  }
  auto& targets = entries_[it->second].targets;
  if (std::find(targets.begin(), targets.end(), tgt) == targets.end()) {
    targets.push_back(std::move(tgt));
  }
}

std::optional<std::span<const std::string>> BilingualDictionary::lookup(std::string_view word) const {
  if (word.empty()) return std::nullopt;
  const auto* entry = find(text::lowercase(word));
  if (entry == nullptr) return std::nullopt;
  return std::span<const std::string>(entry->targets);
}

const DictEntry* BilingualDictionary::find(std::string_view lowercased) const {
  auto it = index_.find(std::string(lowercased));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::size_t BilingualDictionary::pair_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.targets.size();
  return n;
}

void Lexicon::insert(std::string_view word) { words_.insert(text::lowercase(word)); }

BilingualDictionary read_dictionary(std::istream& in, LanguagePair direction,
                                    const std::string& source_name) {
  BilingualDictionary dict(std::move(direction));
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    if (trimmed(line).empty()) continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(source_name, line_no, "expected 'source<TAB>target[|target...]'");
    }
    const auto source = trimmed(line.substr(0, tab));
    auto rest = line.substr(tab + 1);
    rest = rest.substr(0, rest.find('\t'));
    if (source.empty()) throw ParseError(source_name, line_no, "empty source word");
    if (has_inner_space(source)) {
      throw ParseError(source_name, line_no, "multi-word source '" + source + "'");
    }

    std::size_t added = 0;
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto bar = std::min(rest.find('|', pos), rest.size());
      const auto target = trimmed(rest.substr(pos, bar - pos));
      pos = bar + 1;
      if (target.empty()) continue;
      if (has_inner_space(target)) {
        throw ParseError(source_name, line_no, "multi-word translation '" + target + "'");
      }
      dict.add(source, target);
      ++added;
    }
    if (added == 0) throw ParseError(source_name, line_no, "no target word for '" + source + "'");
  }
  return dict;
}

BilingualDictionary load_dictionary(const std::string& path, LanguagePair direction) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open dictionary");
  return read_dictionary(in, std::move(direction), path);
}

void write_dictionary(std::ostream& out, const BilingualDictionary& dict) {
  for (const auto& e : dict.entries()) {
    out << e.source_word << '\t';
    for (std::size_t i = 0; i < e.targets.size(); ++i) {
      if (i > 0) out << '|';
      out << e.targets[i];
    }
    out << '\n';
  }
}

Lexicon read_lexicon(std::istream& in) {
  Lexicon lex;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto word = trimmed(strip_cr(raw));
    if (word.empty() || word.front() == '#') continue;
    if (word.find(' ') != std::string::npos) continue;
    lex.insert(word);
  }
  return lex;
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open lexicon");
  return read_lexicon(in);
}

BilingualDictionary filter_by_lexicon(const BilingualDictionary& dict, const Lexicon& lexicon) {
  BilingualDictionary out(dict.direction());
  for (const auto& e : dict.entries()) {
    for (const auto& t : e.targets) {
      if (lexicon.contains(t)) out.add(e.source_word, t);
    }
  }
  return out;
}

BilingualDictionary invert(const BilingualDictionary& dict) {
  BilingualDictionary out(dict.direction().reversed());
  for (const auto& e : dict.entries()) {
    for (const auto& t : e.targets) out.add(t, e.source_word);
  }
  return out;
}

double identity_ratio(const BilingualDictionary& dict) {
  if (dict.empty()) throw UndefinedValue("identity ratio of an empty dictionary is undefined");
  std::size_t same = 0;
  for (const auto& e : dict.entries()) {
    if (std::find(e.targets.begin(), e.targets.end(), e.source_word) != e.targets.end()) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(dict.size());
}

DictionaryStats dictionary_stats(const BilingualDictionary& dict) {
  DictionaryStats s;
  s.entries = dict.size();
  s.pairs = dict.pair_count();
  for (const auto& e : dict.entries()) {
    if (std::find(e.targets.begin(), e.targets.end(), e.source_word) != e.targets.end()) {
      ++s.identical_entries;
    }
  }
  if (!dict.empty()) s.identity_ratio = identity_ratio(dict);
  const auto inverse = invert(dict);
  s.distinct_targets = inverse.size();
  for (const auto& e : inverse.entries()) {
    if (e.targets.size() >= 2) ++s.targets_with_multiple_sources;
  }
  return s;
}

}  // namespace parmine::dictionary
