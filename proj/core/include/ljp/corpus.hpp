#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ljp/task_graph.hpp"

namespace ljp {

/// A quantity annotation: the composite number+unit token at `pos`.
struct Numeral {
  std::size_t pos = 0;
  std::uint64_t value = 0;
  std::string unit;
  bool operator==(const Numeral&) const = default;
};

/// A dependency-linked word pair, by token position.
struct Collocation {
  std::size_t first = 0;
  std::size_t second = 0;
  bool operator==(const Collocation&) const = default;
};

/// Pre-tokenized fact description with annotations and one gold class per
/// task (keyed by task id).
struct CaseRecord {
  std::vector<std::string> tokens;
  std::vector<Numeral> numerals;
  std::vector<Collocation> collocations;
  std::map<std::string, std::size_t> labels;
  bool operator==(const CaseRecord&) const = default;
};

/// Throws SchemaError if an annotation points past the token list.
void validate_record(const CaseRecord& record);

class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();
  /// Tokens with corpus frequency >= threshold, most frequent first (ties
  /// in lexicographic order).
  static Vocabulary build(const std::vector<CaseRecord>& records, std::size_t threshold);
  /// Exact index order; the first two entries must be PAD and UNK.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t index(const std::string& token) const;
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Model-ready case: exactly max_doc_len token ids, annotations filtered to
/// the kept prefix, labels ordered by task index.
struct IndexedCase {
  std::vector<std::size_t> token_ids;
  std::vector<Numeral> numerals;
  std::vector<Collocation> collocations;
  std::vector<std::size_t> labels;
  bool operator==(const IndexedCase&) const = default;
};

struct EncodeOptions {
  std::size_t max_doc_len = 512;
  std::size_t max_collocations = 128;
};

/// Pads with PAD / truncates to the prefix. Annotations that reference a
/// dropped token are removed; collocations beyond the cap are dropped in
/// record order. Throws LabelError for missing or out-of-range labels.
IndexedCase encode_record(const CaseRecord& record, const Vocabulary& vocab,
                          const TaskGraph& graph, const EncodeOptions& options);

std::vector<IndexedCase> encode_records(const std::vector<CaseRecord>& records,
                                        const Vocabulary& vocab, const TaskGraph& graph,
                                        const EncodeOptions& options);

/// Inverse of encode_record for retained tokens; trailing PADs stripped.
CaseRecord decode_indexed(const IndexedCase& indexed, const Vocabulary& vocab, const TaskGraph& graph);

// JSONL, one object per line:
// {"tokens": [str], "numerals": [{"pos": int, "value": int, "unit": str}],
//  "collocations": [[int, int]], "labels": {"law": int, "charge": int, "penalty": int}}
std::vector<CaseRecord> read_jsonl(std::istream& in);
void write_jsonl(const std::vector<CaseRecord>& records, std::ostream& out);
std::vector<CaseRecord> load_jsonl(const std::filesystem::path& path);
void save_jsonl(const std::vector<CaseRecord>& records, const std::filesystem::path& path);

}  // namespace ljp
