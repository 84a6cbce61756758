#include "ljp/run_config.hpp"

#include <charconv>
#include <cstdio>

#include "ljp/error.hpp"

namespace ljp {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
  std::vector<std::string> parts;
  for (auto x : xs) parts.push_back(std::to_string(x));
  return join(parts, ",");
}

std::filesystem::path resolve(const std::string& raw, const std::filesystem::path& base) {
  if (raw.empty()) return {};
  std::filesystem::path p(raw);
  if (p.is_relative() && !base.empty()) return base / p;
  return p;
}

}  // namespace

std::vector<TaskSpec> parse_tasks(const std::string& text) {
  std::vector<TaskSpec> out;
  for (const auto& item : split(text, ',')) {
    const std::string entry = trim(item);
    if (entry.empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string::npos) throw ConfigError("task '" + entry + "' must look like id:classes");
    TaskSpec spec;
    spec.id = trim(entry.substr(0, colon));
    const std::string count = trim(entry.substr(colon + 1));
    std::size_t classes = 0;
    auto res = std::from_chars(count.data(), count.data() + count.size(), classes);
    if (res.ec != std::errc() || res.ptr != count.data() + count.size() || spec.id.empty()) {
      throw ConfigError("task '" + entry + "' must look like id:classes");
    }
    spec.classes = classes;
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw ConfigError("tasks list is empty");
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_edges(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : split(text, ',')) {
    const std::string entry = trim(item);
    if (entry.empty()) continue;
    const auto arrow = entry.find('>');
    if (arrow == std::string::npos) throw ConfigError("edge '" + entry + "' must look like from>to");
    std::string from = trim(entry.substr(0, arrow));
    std::string to = trim(entry.substr(arrow + 1));
    if (from.empty() || to.empty()) throw ConfigError("edge '" + entry + "' must look like from>to");
    out.emplace_back(std::move(from), std::move(to));
  }
  return out;
}

const std::set<std::string>& run_config_keys() {
  static const std::set<std::string> keys{
      "d_w",          "windows",          "d_c",         "max_doc_len",  "d_s",
      "d_n",          "ln",               "shared_digit_table",          "wca_target",
      "tasks",        "edges",            "variant",     "bv_enabled",   "wca_enabled",
      "renormalize_yhat",                 "learning_rate",               "batch_size",
      "epochs",       "dropout",          "seed",        "max_collocations",
      "vocab_threshold",                  "train_data",  "valid_data",   "test_data",
      "out_dir",      "repeats"};
  return keys;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (repeats == 0) throw ConfigError("repeats must be at least 1");
  if (vocab_threshold == 0) throw ConfigError("vocab_threshold must be at least 1");
}

RunConfig run_config_from(const KeyValueConfig& kv, const std::filesystem::path& base_dir) {
  kv.require_known(run_config_keys());
  RunConfig c;
  auto& enc = c.model.encoder;
  enc.d_w = kv.get_size("d_w", enc.d_w);
  enc.windows = kv.get_size_list("windows", enc.windows);
  enc.d_c = kv.get_size("d_c", enc.d_c);
  enc.max_doc_len = kv.get_size("max_doc_len", enc.max_doc_len);
  c.model.d_s = kv.get_size("d_s", c.model.d_s);
  c.model.wca.d_n = kv.get_size("d_n", c.model.wca.d_n);
  c.model.wca.ln = kv.get_size("ln", c.model.wca.ln);
  c.model.wca.shared_digit_table = kv.get_bool("shared_digit_table", c.model.wca.shared_digit_table);
  c.model.wca.target_task = kv.get_string("wca_target", c.model.wca.target_task);
  if (kv.has("tasks")) c.model.tasks = parse_tasks(kv.get_string("tasks", ""));
  if (kv.has("edges")) c.model.edges = parse_edges(kv.get_string("edges", ""));

  if (kv.has("variant")) {
    c.model.variant = parse_variant(kv.get_string("variant", ""));
    if (kv.has("bv_enabled") || kv.has("wca_enabled")) {
      const bool bv = kv.get_bool("bv_enabled", bv_enabled(c.model.variant));
      const bool wca = kv.get_bool("wca_enabled", wca_enabled(c.model.variant));
      if (bv != bv_enabled(c.model.variant) || wca != wca_enabled(c.model.variant)) {
        throw ConfigError("bv_enabled/wca_enabled contradict variant " + to_string(c.model.variant));
      }
    }
  } else if (kv.has("bv_enabled") || kv.has("wca_enabled")) {
    const bool bv = kv.get_bool("bv_enabled", true);
    const bool wca = kv.get_bool("wca_enabled", true);
    if (wca && !bv) throw ConfigError("wca_enabled requires bv_enabled");
    c.model.variant = !bv ? Variant::kMpfp : (wca ? Variant::kMpbfnWca : Variant::kMpbfn);
  }
  c.model.renormalize_yhat = kv.get_bool("renormalize_yhat", c.model.renormalize_yhat);

  c.train.learning_rate = kv.get_double("learning_rate", c.train.learning_rate);
  c.train.batch_size = kv.get_size("batch_size", c.train.batch_size);
  c.train.epochs = kv.get_size("epochs", c.train.epochs);
  c.train.dropout = kv.get_double("dropout", c.train.dropout);
  c.train.seed = kv.get_u64("seed", c.train.seed);

  c.max_collocations = kv.get_size("max_collocations", c.max_collocations);
  c.vocab_threshold = kv.get_size("vocab_threshold", c.vocab_threshold);
  c.train_data = resolve(kv.get_string("train_data", ""), base_dir);
  c.valid_data = resolve(kv.get_string("valid_data", ""), base_dir);
  c.test_data = resolve(kv.get_string("test_data", ""), base_dir);
  c.out_dir = kv.get_string("out_dir", c.out_dir.string());
  c.repeats = kv.get_size("repeats", c.repeats);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from(KeyValueConfig::load(path), path.parent_path());
}

KeyValueConfig to_key_values(const RunConfig& c) {
  KeyValueConfig kv;
  const auto& enc = c.model.encoder;
  kv.set("d_w", std::to_string(enc.d_w));
  kv.set("windows", join_sizes(enc.windows));
  kv.set("d_c", std::to_string(enc.d_c));
  kv.set("max_doc_len", std::to_string(enc.max_doc_len));
  kv.set("d_s", std::to_string(c.model.d_s));
  kv.set("d_n", std::to_string(c.model.wca.d_n));
  kv.set("ln", std::to_string(c.model.wca.ln));
  kv.set("shared_digit_table", c.model.wca.shared_digit_table ? "true" : "false");
  kv.set("wca_target", c.model.wca.target_task);
  std::vector<std::string> tasks;
  for (const auto& t : c.model.tasks) tasks.push_back(t.id + ":" + std::to_string(t.classes));
  kv.set("tasks", join(tasks, ","));
  std::vector<std::string> edges;
  for (const auto& [from, to] : c.model.edges) edges.push_back(from + ">" + to);
  kv.set("edges", join(edges, ","));
  kv.set("variant", to_string(c.model.variant));
  kv.set("renormalize_yhat", c.model.renormalize_yhat ? "true" : "false");
  kv.set("learning_rate", format_double(c.train.learning_rate));
  kv.set("batch_size", std::to_string(c.train.batch_size));
  kv.set("epochs", std::to_string(c.train.epochs));
  kv.set("dropout", format_double(c.train.dropout));
  kv.set("seed", std::to_string(c.train.seed));
  kv.set("max_collocations", std::to_string(c.max_collocations));
  kv.set("vocab_threshold", std::to_string(c.vocab_threshold));
  if (!c.train_data.empty()) kv.set("train_data", c.train_data.string());
  if (!c.valid_data.empty()) kv.set("valid_data", c.valid_data.string());
  if (!c.test_data.empty()) kv.set("test_data", c.test_data.string());
  kv.set("out_dir", c.out_dir.string());
  kv.set("repeats", std::to_string(c.repeats));
  return kv;
}

}  // namespace ljp
