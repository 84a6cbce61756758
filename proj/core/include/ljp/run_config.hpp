#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>

#include "ljp/config.hpp"
#include "ljp/corpus.hpp"
#include "ljp/model.hpp"
#include "ljp/training.hpp"

namespace ljp {

/// Everything a train/eval/gradcheck run needs, read from one flat config.
///
/// Keys (all optional; defaults are the full-scale setup):
///   d_w, windows, d_c, max_doc_len, d_s, d_n, ln, shared_digit_table,
///   wca_target, tasks ("law:3,charge:6,penalty:11"),
///   edges ("law>charge,law>penalty,charge>penalty"), variant,
///   bv_enabled, wca_enabled, renormalize_yhat,
///   learning_rate, batch_size, epochs, dropout, seed,
///   max_collocations, vocab_threshold,
///   train_data, valid_data, test_data, out_dir, repeats
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::size_t max_collocations = 128;
  std::size_t vocab_threshold = 1;
  std::filesystem::path train_data;
  std::filesystem::path valid_data;
  std::filesystem::path test_data;
  std::filesystem::path out_dir = "out";
  std::size_t repeats = 1;

  EncodeOptions encode_options() const { return {model.encoder.max_doc_len, max_collocations}; }
  void validate() const;
};

const std::set<std::string>& run_config_keys();

/// Relative data paths resolve against `base_dir` when it is non-empty.
RunConfig run_config_from(const KeyValueConfig& kv, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
/// Round-trips through run_config_from (paths included).
KeyValueConfig to_key_values(const RunConfig& config);

std::vector<TaskSpec> parse_tasks(const std::string& text);
std::vector<std::pair<std::string, std::string>> parse_edges(const std::string& text);

}  // namespace ljp
