#pragma once

#include <filesystem>
#include <iosfwd>

#include "ljp/corpus.hpp"
#include "ljp/model.hpp"
#include "ljp/run_config.hpp"

namespace ljp {

/// A trained model together with the vocabulary and config that built it.
struct Checkpoint {
  RunConfig config;
  Vocabulary vocab;
  Model model;
};

/// Line-based text: a version header, the config echo, the vocabulary (one
/// JSON string per line) and every named parameter array. Values are written
/// in shortest round-trip form, so reading them back is bit-exact.
void write_checkpoint(std::ostream& out, const RunConfig& config, const Vocabulary& vocab,
                      const Model& model);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config,
                     const Vocabulary& vocab, const Model& model);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ljp
