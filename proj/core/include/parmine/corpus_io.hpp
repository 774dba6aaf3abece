#pragma once

// File formats: JSON-lines document collections, the aligned-corpus TSV, and
// a streaming variant of the mining pipeline that keeps only the title index
// and the aligned pair list in memory.

#include <cstddef>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "parmine/dictionary.hpp"
#include "parmine/mining.hpp"

namespace parmine::io {

/// Parses one JSON object with string fields `id`, `title`, `text` and an
/// optional `language`. Throws ParseError naming `source_name:line`.
mining::Document parse_document(std::string_view json_line, const std::string& source_name,
                                std::size_t line);

/// Line-at-a-time reader over a JSON-lines collection. Blank lines are
/// skipped; ids must be unique within the file.
class DocumentReader {
 public:
  explicit DocumentReader(std::string path);

  /// False at end of file.
  bool next(mining::Document& doc);

  /// Byte offset and 1-based line of the document last returned by next().
  std::streamoff offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }

  /// Random access to a previously indexed document.
  mining::Document read_at(std::streamoff offset, std::size_t line);

 private:
  std::string path_;
  std::ifstream in_;
  std::streamoff offset_ = 0;
  std::size_t line_ = 0;
  std::size_t next_line_ = 1;
  std::unordered_set<std::string> seen_ids_;
};

std::vector<mining::Document> read_documents(const std::string& path);
void write_document(std::ostream& out, const mining::Document& doc);

/// Shortest decimal that round-trips to the same double.
std::string format_score(double score);

/// `source<TAB>target<TAB>score<TAB>doc_id`, one pair per line.
void write_pairs(std::ostream& out, std::span<const mining::AlignedPair> pairs);
std::vector<mining::AlignedPair> read_pairs(std::istream& in, const std::string& source_name = "<input>");
std::vector<mining::AlignedPair> load_pairs(const std::string& path);

struct DocumentPairRecord {
  std::string source_id;
  std::string target_id;
  std::string title;
};

/// Title matching over two JSON-lines files. The target file is indexed by
/// title (byte offsets only); the source file is streamed.
std::vector<DocumentPairRecord> pair_document_files(const std::string& source_path,
                                                    const std::string& target_path,
                                                    mining::MiningStats* stats = nullptr);

/// Streaming equivalent of mining::mine(): identical output for identical
/// inputs. Document pairs are aligned in batches of `batch_size` on up to
/// `jobs` threads and merged in source order.
mining::MiningResult mine_files(const std::string& source_path, const std::string& target_path,
                                const dictionary::BilingualDictionary& dict,
                                const mining::MiningConfig& config, std::size_t jobs = 1,
                                std::size_t batch_size = 256);

}  // namespace parmine::io
