#include "parmine/corpus_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "parmine/error.hpp"
#include "parmine/parallel.hpp"

namespace parmine::io {

using mining::AlignedPair;
using mining::Document;
using json = nlohmann::json;

Document parse_document(std::string_view json_line, const std::string& source_name, std::size_t line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw ParseError(source_name, line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(source_name, line, "expected a JSON object");

  auto field = [&](const char* name, bool required) -> std::string {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) {
      if (required) throw ParseError(source_name, line, std::string("missing field '") + name + "'");
      return {};
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return it->dump();
    throw ParseError(source_name, line, std::string("field '") + name + "' must be a string");
  };

  Document doc;
  doc.id = field("id", true);
  doc.title = field("title", true);
  doc.text = field("text", true);
  doc.language = field("language", false);
  if (doc.id.empty()) throw ParseError(source_name, line, "empty document id");
  if (text::collapse_whitespace(doc.title).empty()) throw ParseError(source_name, line, "empty title");
  return doc;
}

DocumentReader::DocumentReader(std::string path) : path_(std::move(path)), in_(path_, std::ios::binary) {
  if (!in_) throw InputError(path_, 0, "cannot open document collection");
}

bool DocumentReader::next(Document& doc) {
  std::string raw;
  for (;;) {
    const std::streamoff at = in_.tellg();
    if (!std::getline(in_, raw)) return false;
    const std::size_t line = next_line_++;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (text::collapse_whitespace(raw).empty()) continue;
    doc = parse_document(raw, path_, line);
    if (!seen_ids_.insert(doc.id).second) {
      throw ParseError(path_, line, "duplicate document id '" + doc.id + "'");
    }
    offset_ = at;
    line_ = line;
    return true;
  }
}

Document DocumentReader::read_at(std::streamoff offset, std::size_t line) {
  in_.clear();
  in_.seekg(offset);
  std::string raw;
  if (!std::getline(in_, raw)) throw InputError(path_, line, "cannot re-read document");
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  return parse_document(raw, path_, line);
}

std::vector<Document> read_documents(const std::string& path) {
  DocumentReader reader(path);
  std::vector<Document> docs;
  Document doc;
  while (reader.next(doc)) docs.push_back(std::move(doc));
  return docs;
}

void write_document(std::ostream& out, const Document& doc) {
  json j = {{"id", doc.id}, {"title", doc.title}, {"text", doc.text}};
  if (!doc.language.empty()) j["language"] = doc.language;
  out << j.dump() << '\n';
}

std::string format_score(double score) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, score);
  return std::string(buf, end);
}

namespace {

std::string single_line(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
    if (tab == std::string_view::npos) return cols;
    start = tab + 1;
  }
}

}  // namespace

void write_pairs(std::ostream& out, std::span<const AlignedPair> pairs) {
  for (const auto& p : pairs) {
    out << single_line(p.source_sentence.text) << '\t' << single_line(p.target_sentence.text) << '\t'
        << format_score(p.score) << '\t' << single_line(p.doc_id) << '\n';
  }
}

std::vector<AlignedPair> read_pairs(std::istream& in, const std::string& source_name) {
  std::vector<AlignedPair> pairs;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const auto cols = split_tabs(raw);
    if (cols.size() < 4) throw ParseError(source_name, line, "expected 4 tab-separated columns");
    AlignedPair p;
    p.source_sentence.text = std::string(cols[0]);
    p.target_sentence.text = std::string(cols[1]);
    const auto score_text = cols[2];
    const auto [ptr, ec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), p.score);
    if (ec != std::errc() || ptr != score_text.data() + score_text.size() || !std::isfinite(p.score) ||
        p.score < 0.0 || p.score > 1.0) {
      throw ParseError(source_name, line, "score '" + std::string(score_text) + "' is not a number in [0, 1]");
    }
    p.doc_id = std::string(cols[3]);
    if (text::collapse_whitespace(p.source_sentence.text).empty() ||
        text::collapse_whitespace(p.target_sentence.text).empty()) {
      throw ParseError(source_name, line, "empty sentence");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<AlignedPair> load_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open aligned corpus");
  return read_pairs(in, path);
}

namespace {

struct IndexedDoc {
  std::streamoff offset;
  std::size_t line;
};

using TitleIndex = std::unordered_map<std::string, IndexedDoc>;

TitleIndex index_titles(DocumentReader& reader, std::size_t& count) {
  TitleIndex index;
  Document doc;
  while (reader.next(doc)) {
    ++count;
    auto key = mining::normalize_title(doc.title);
    if (!key.empty()) index.try_emplace(std::move(key), IndexedDoc{reader.offset(), reader.line()});
  }
  return index;
}

// Streams source documents and calls on_pair(source, target, title) for each
// title match, in source order.
template <typename OnPair>
void for_each_document_pair(DocumentReader& source, DocumentReader& target, const TitleIndex& index,
                            std::size_t& source_count, OnPair&& on_pair) {
  std::unordered_set<std::string> used;
  Document doc;
  while (source.next(doc)) {
    ++source_count;
    auto key = mining::normalize_title(doc.title);
    if (key.empty()) continue;
    auto it = index.find(key);
    if (it == index.end()) continue;
    if (!used.insert(key).second) continue;
    on_pair(std::move(doc), target.read_at(it->second.offset, it->second.line), key);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<DocumentPairRecord> pair_document_files(const std::string& source_path,
                                                    const std::string& target_path,
                                                    mining::MiningStats* stats) {
  DocumentReader source(source_path);
  DocumentReader target(target_path);
  std::size_t target_count = 0;
  std::size_t source_count = 0;
  const auto index = index_titles(target, target_count);
  std::vector<DocumentPairRecord> records;
  for_each_document_pair(source, target, index, source_count,
                         [&](Document src, Document tgt, const std::string& title) {
                           records.push_back({src.id, tgt.id, title});
                         });
  if (stats != nullptr) {
    stats->source_documents = source_count;
    stats->target_documents = target_count;
    stats->document_pairs = records.size();
  }
  return records;
}

mining::MiningResult mine_files(const std::string& source_path, const std::string& target_path,
                                const dictionary::BilingualDictionary& dict,
                                const mining::MiningConfig& config, std::size_t jobs,
                                std::size_t batch_size) {
  config.validate();
  batch_size = std::max<std::size_t>(batch_size, 1);
  mining::MiningResult result;
  auto& stats = result.stats;

  DocumentReader source(source_path);
  DocumentReader target(target_path);

  auto t0 = std::chrono::steady_clock::now();
  const auto index = index_titles(target, stats.target_documents);
  stats.seconds_documents = seconds_since(t0);

  struct Slot {
    Document source;
    Document target;
    std::vector<AlignedPair> pairs;
    std::size_t source_sentences = 0;
    std::size_t target_sentences = 0;
  };
  std::vector<Slot> batch;
  batch.reserve(batch_size);

  auto flush = [&] {
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
      auto& s = batch[i];
      s.pairs = mining::align_document_pair(s.source, s.target, dict, config, &s.source_sentences,
                                            &s.target_sentences);
    });
    for (auto& s : batch) {
      stats.source_sentences += s.source_sentences;
      stats.target_sentences += s.target_sentences;
      for (auto& p : s.pairs) result.thresholded.push_back(std::move(p));
    }
    batch.clear();
  };

  t0 = std::chrono::steady_clock::now();
  for_each_document_pair(source, target, index, stats.source_documents,
                         [&](Document src, Document tgt, const std::string&) {
                           ++stats.document_pairs;
                           batch.push_back({std::move(src), std::move(tgt), {}, 0, 0});
                           if (batch.size() == batch_size) flush();
                         });
  flush();
  stats.thresholded_pairs = result.thresholded.size();
  stats.seconds_alignment = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  result.corpus = mining::diversity_filter(result.thresholded, config, &stats.filter);
  stats.final_pairs = result.corpus.size();
  stats.seconds_filter = seconds_since(t0);
  return result;
}

}  // namespace parmine::io
