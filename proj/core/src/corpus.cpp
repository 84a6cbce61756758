#include "ljp/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "ljp/error.hpp"

namespace ljp {

void validate_record(const CaseRecord& record) {
  const std::size_t n = record.tokens.size();
  for (const auto& num : record.numerals) {
    if (num.pos >= n) {
      throw SchemaError("numeral position " + std::to_string(num.pos) + " outside " +
                        std::to_string(n) + " tokens");
    }
  }
  for (const auto& col : record.collocations) {
    if (col.first >= n || col.second >= n) {
      throw SchemaError("collocation (" + std::to_string(col.first) + ", " +
                        std::to_string(col.second) + ") outside " + std::to_string(n) + " tokens");
    }
  }
}

Vocabulary::Vocabulary() : tokens_{kPadToken, kUnkToken} {
  index_[kPadToken] = kPad;
  index_[kUnkToken] = kUnk;
}

Vocabulary Vocabulary::build(const std::vector<CaseRecord>& records, std::size_t threshold) {
  if (records.empty()) throw EmptyInputError("cannot build a vocabulary from zero records");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& r : records) {
    for (const auto& t : r.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= threshold && token != kPadToken && token != kUnkToken) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  for (const auto& [token, _] : kept) {
    vocab.index_[token] = vocab.tokens_.size();
    vocab.tokens_.push_back(token);
  }
  return vocab;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw SchemaError("vocabulary must start with " + std::string(kPadToken) + ", " + kUnkToken);
  }
  Vocabulary vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.index_.clear();
  for (std::size_t i = 0; i < vocab.tokens_.size(); ++i) {
    if (!vocab.index_.emplace(vocab.tokens_[i], i).second) {
      throw SchemaError("duplicate vocabulary token '" + vocab.tokens_[i] + "'");
    }
  }
  return vocab;
}

std::size_t Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

IndexedCase encode_record(const CaseRecord& record, const Vocabulary& vocab,
                          const TaskGraph& graph, const EncodeOptions& options) {
  validate_record(record);
  IndexedCase out;
  const std::size_t keep = std::min(record.tokens.size(), options.max_doc_len);
  out.token_ids.assign(options.max_doc_len, Vocabulary::kPad);
  for (std::size_t i = 0; i < keep; ++i) out.token_ids[i] = vocab.index(record.tokens[i]);
  for (const auto& num : record.numerals) {
    if (num.pos < keep) out.numerals.push_back(num);
  }
  for (const auto& col : record.collocations) {
    if (out.collocations.size() >= options.max_collocations) break;
    if (col.first < keep && col.second < keep) out.collocations.push_back(col);
  }
  for (std::size_t t = 0; t < graph.task_count(); ++t) {
    const auto& task = graph.task(t);
    auto it = record.labels.find(task.id);
    if (it == record.labels.end()) throw LabelError("record has no label for task '" + task.id + "'");
    if (it->second >= task.classes) {
      throw LabelError("label " + std::to_string(it->second) + " for task '" + task.id +
                       "' with " + std::to_string(task.classes) + " classes");
    }
    out.labels.push_back(it->second);
  }
  return out;
}

std::vector<IndexedCase> encode_records(const std::vector<CaseRecord>& records,
                                        const Vocabulary& vocab, const TaskGraph& graph,
                                        const EncodeOptions& options) {
  std::vector<IndexedCase> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(encode_record(r, vocab, graph, options));
  return out;
}

CaseRecord decode_indexed(const IndexedCase& indexed, const Vocabulary& vocab, const TaskGraph& graph) {
  CaseRecord out;
  std::size_t len = indexed.token_ids.size();
  while (len > 0 && indexed.token_ids[len - 1] == Vocabulary::kPad) --len;
  for (std::size_t i = 0; i < len; ++i) out.tokens.push_back(vocab.token(indexed.token_ids[i]));
  out.numerals = indexed.numerals;
  out.collocations = indexed.collocations;
  for (std::size_t t = 0; t < graph.task_count() && t < indexed.labels.size(); ++t) {
    out.labels[graph.task(t).id] = indexed.labels[t];
  }
  return out;
}

namespace {

using nlohmann::json;

std::size_t as_index(const json& j, const char* what, std::size_t line) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw SchemaError("line " + std::to_string(line) + ": " + what + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

const json& field(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError("line " + std::to_string(line) + ": missing field '" + key + "'");
  }
  return *it;
}

CaseRecord record_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw SchemaError("line " + std::to_string(line) + ": expected an object");
  CaseRecord r;
  const json& tokens = field(obj, "tokens", line);
  if (!tokens.is_array()) throw SchemaError("line " + std::to_string(line) + ": tokens must be a list");
  for (const auto& t : tokens) {
    if (!t.is_string()) throw SchemaError("line " + std::to_string(line) + ": tokens must be strings");
    r.tokens.push_back(t.get<std::string>());
  }
  const json& numerals = field(obj, "numerals", line);
  if (!numerals.is_array()) throw SchemaError("line " + std::to_string(line) + ": numerals must be a list");
  for (const auto& n : numerals) {
    if (!n.is_object()) throw SchemaError("line " + std::to_string(line) + ": numeral must be an object");
    Numeral num;
    num.pos = as_index(field(n, "pos", line), "numeral pos", line);
    const json& value = field(n, "value", line);
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
      throw SchemaError("line " + std::to_string(line) + ": numeral value must be a non-negative integer");
    }
    num.value = value.get<std::uint64_t>();
    const json& unit = field(n, "unit", line);
    if (!unit.is_string()) throw SchemaError("line " + std::to_string(line) + ": numeral unit must be a string");
    num.unit = unit.get<std::string>();
    r.numerals.push_back(std::move(num));
  }
  const json& cols = field(obj, "collocations", line);
  if (!cols.is_array()) throw SchemaError("line " + std::to_string(line) + ": collocations must be a list");
  for (const auto& c : cols) {
    if (!c.is_array() || c.size() != 2) {
      throw SchemaError("line " + std::to_string(line) + ": collocation must be a pair");
    }
    r.collocations.push_back(
        {as_index(c[0], "collocation index", line), as_index(c[1], "collocation index", line)});
  }
  const json& labels = field(obj, "labels", line);
  if (!labels.is_object()) throw SchemaError("line " + std::to_string(line) + ": labels must be an object");
  for (const auto& [task, value] : labels.items()) {
    if (value.is_array()) {
      throw SchemaError("line " + std::to_string(line) + ": multi-label value for task '" + task + "'");
    }
    r.labels[task] = as_index(value, "label", line);
  }
  try {
    validate_record(r);
  } catch (const SchemaError& e) {
    throw SchemaError("line " + std::to_string(line) + ": " + e.what());
  }
  return r;
}

}  // namespace

std::vector<CaseRecord> read_jsonl(std::istream& in) {
  std::vector<CaseRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    out.push_back(record_from_json(obj, line));
  }
  return out;
}

void write_jsonl(const std::vector<CaseRecord>& records, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["tokens"] = r.tokens;
    obj["numerals"] = nlohmann::ordered_json::array();
    for (const auto& n : r.numerals) {
      obj["numerals"].push_back({{"pos", n.pos}, {"value", n.value}, {"unit", n.unit}});
    }
    obj["collocations"] = nlohmann::ordered_json::array();
    for (const auto& c : r.collocations) obj["collocations"].push_back({c.first, c.second});
    obj["labels"] = nlohmann::ordered_json::object();
    for (const auto& [task, value] : r.labels) obj["labels"][task] = value;
    out << obj.dump() << '\n';
  }
}

std::vector<CaseRecord> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_jsonl(in);
}

void save_jsonl(const std::vector<CaseRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_jsonl(records, out);
}

}  // namespace ljp
