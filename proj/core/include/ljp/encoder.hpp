#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ljp/tape.hpp"
#include "ljp/tensor.hpp"

namespace ljp {

/// CNN fact encoder shape. Defaults are the full-scale setup: 200-d
/// embeddings, windows {2,3,4,5} with 64 filters each, 512-token documents.
struct EncoderConfig {
  std::size_t d_w = 200;
  std::vector<std::size_t> windows{2, 3, 4, 5};
  std::size_t d_c = 256;
  std::size_t max_doc_len = 512;

  void validate() const;
  /// Filters per window length; d_c must divide evenly.
  std::size_t filters_per_window() const;
};

struct EncoderParams {
  Tensor word_embedding;             // [V x d_w]
  std::vector<Tensor> conv_weight;   // per window h: [filters_h x h*d_w]
  std::vector<Tensor> conv_bias;     // per window h: [filters_h]

  static EncoderParams init(const EncoderConfig& cfg, std::size_t vocab_size, std::uint64_t seed);

  template <class Self, class Fn>
  static void visit(Self& self, const EncoderConfig& cfg, Fn&& fn) {
    fn(std::string("encoder.word_embedding"), self.word_embedding);
    for (std::size_t k = 0; k < cfg.windows.size(); ++k) {
      const std::string h = std::to_string(cfg.windows[k]);
      fn("encoder.conv" + h + ".weight", self.conv_weight[k]);
      fn("encoder.conv" + h + ".bias", self.conv_bias[k]);
    }
  }
};

struct EncoderVars {
  Var word_embedding;
  std::vector<Var> conv_weight;
  std::vector<Var> conv_bias;
};

template <class Params>
EncoderVars bind_encoder(Tape& tape, Params& p) {
  EncoderVars v;
  v.word_embedding = tape.param(p.word_embedding);
  for (auto& w : p.conv_weight) v.conv_weight.push_back(tape.param(w));
  for (auto& b : p.conv_bias) v.conv_bias.push_back(tape.param(b));
  return v;
}

/// fact_ori: per window bank, affine map over every window of concatenated
/// embeddings, max over positions, banks concatenated in window order.
/// `token_ids` must have exactly max_doc_len entries.
Var encode_fact(std::span<const std::size_t> token_ids, const EncoderVars& params,
                const EncoderConfig& cfg);

}  // namespace ljp
