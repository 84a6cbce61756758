#include "ljp/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ljp/error.hpp"

namespace ljp {
namespace {

constexpr const char* kMagic = "ljp-checkpoint 1";

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const char* expecting) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ParseError(line_ + 1, std::string("unexpected end of checkpoint, expected ") + expecting);
    }
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::size_t parse_count(const std::string& text, const std::string& keyword, const LineReader& r) {
  std::istringstream ss(text);
  std::string word;
  std::size_t n = 0;
  if (!(ss >> word >> n) || word != keyword) {
    throw ParseError(r.line(), "expected '" + keyword + " <count>'");
  }
  return n;
}

}  // namespace

void write_checkpoint(std::ostream& out, const RunConfig& config, const Vocabulary& vocab,
                      const Model& model) {
  out << kMagic << '\n';
  const auto kv = to_key_values(config);
  out << "config " << kv.entries().size() << '\n';
  for (const auto& [key, value] : kv.entries()) out << key << " = " << value << '\n';
  out << "vocab " << vocab.size() << '\n';
  for (const auto& token : vocab.tokens()) out << nlohmann::json(token).dump() << '\n';
  const auto params = model.parameters();
  out << "params " << params.size() << '\n';
  char buf[64];
  for (const auto& [name, tensor] : params) {
    out << "param " << name << ' ' << tensor->rank();
    for (auto d : tensor->shape()) out << ' ' << d;
    out << '\n';
    bool first = true;
    for (double v : tensor->values()) {
      auto res = std::to_chars(buf, buf + sizeof buf, v);
      if (!first) out << ' ';
      out.write(buf, res.ptr - buf);
      first = false;
    }
    out << '\n';
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  LineReader r(in);
  if (r.next("header") != kMagic) throw ParseError(r.line(), "not an ljp checkpoint (bad header)");

  const std::size_t n_config = parse_count(r.next("config"), "config", r);
  std::ostringstream cfg_text;
  for (std::size_t i = 0; i < n_config; ++i) cfg_text << r.next("config entry") << '\n';
  RunConfig config = run_config_from(KeyValueConfig::parse_string(cfg_text.str()));

  const std::size_t n_vocab = parse_count(r.next("vocab"), "vocab", r);
  std::vector<std::string> tokens;
  tokens.reserve(n_vocab);
  for (std::size_t i = 0; i < n_vocab; ++i) {
    const std::string line = r.next("vocab token");
    try {
      tokens.push_back(nlohmann::json::parse(line).get<std::string>());
    } catch (const nlohmann::json::exception&) {
      throw ParseError(r.line(), "vocabulary entry is not a JSON string");
    }
  }
  Vocabulary vocab = Vocabulary::from_tokens(std::move(tokens));
  Model model(config.model, vocab.size(), config.train.seed);

  const std::size_t n_params = parse_count(r.next("params"), "params", r);
  if (n_params != model.parameters().size()) {
    throw SchemaError("checkpoint has " + std::to_string(n_params) + " parameter arrays, model expects " +
                      std::to_string(model.parameters().size()));
  }
  for (std::size_t i = 0; i < n_params; ++i) {
    std::istringstream header(r.next("param header"));
    std::string word, name;
    std::size_t rank = 0;
    if (!(header >> word >> name >> rank) || word != "param") {
      throw ParseError(r.line(), "expected 'param <name> <rank> <dims...>'");
    }
    Shape shape(rank);
    for (auto& d : shape) {
      if (!(header >> d)) throw ParseError(r.line(), "missing dimension for " + name);
    }
    Tensor* target = model.find_parameter(name);
    if (!target) throw SchemaError("checkpoint parameter '" + name + "' is unknown to the model");
    if (target->shape() != shape) {
      throw DimensionError("parameter '" + name + "' has shape " + shape_string(shape) +
                           " in checkpoint, model expects " + shape_string(target->shape()));
    }
    const std::string values = r.next("param values");
    const char* p = values.data();
    const char* end = values.data() + values.size();
    for (double& v : target->data()) {
      while (p < end && *p == ' ') ++p;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw ParseError(r.line(), "bad value in parameter '" + name + "'");
      p = res.ptr;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) throw ParseError(r.line(), "too many values in parameter '" + name + "'");
  }
  if (r.next("end") != "end") throw ParseError(r.line(), "expected 'end'");
  return Checkpoint{std::move(config), std::move(vocab), std::move(model)};
}

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config,
                     const Vocabulary& vocab, const Model& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  write_checkpoint(out, config, vocab, model);
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace ljp
