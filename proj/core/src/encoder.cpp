#include "ljp/encoder.hpp"

#include <algorithm>

#include "ljp/error.hpp"
#include "ljp/init.hpp"
#include "ljp/ops.hpp"

namespace ljp {

void EncoderConfig::validate() const {
  if (d_w == 0 || d_c == 0 || max_doc_len == 0 || windows.empty()) {
    throw ConfigError("encoder sizes must be positive");
  }
  for (std::size_t h : windows) {
    if (h == 0) throw ConfigError("window length must be positive");
  }
  if (max_doc_len < *std::max_element(windows.begin(), windows.end())) {
    throw ConfigError("max_doc_len shorter than the widest window");
  }
  if (d_c % windows.size() != 0) {
    throw ConfigError("d_c = " + std::to_string(d_c) + " not divisible by " +
                      std::to_string(windows.size()) + " window lengths");
  }
}

std::size_t EncoderConfig::filters_per_window() const { return d_c / windows.size(); }

EncoderParams EncoderParams::init(const EncoderConfig& cfg, std::size_t vocab_size,
                                  std::uint64_t seed) {
  cfg.validate();
  EncoderParams p;
  p.word_embedding = Tensor(Shape{vocab_size, cfg.d_w});
  const std::size_t filters = cfg.filters_per_window();
  for (std::size_t h : cfg.windows) {
    p.conv_weight.emplace_back(Shape{filters, h * cfg.d_w});
    p.conv_bias.emplace_back(Shape{filters});
  }
  visit(p, cfg, [&](const std::string& name, Tensor& t) {
    if (name == "encoder.word_embedding") {
      init_uniform(t, -0.1, 0.1, seed, name);
    } else if (t.rank() == 2) {
      init_glorot(t, seed, name);
    }
  });
  return p;
}

Var encode_fact(std::span<const std::size_t> token_ids, const EncoderVars& params,
                const EncoderConfig& cfg) {
  if (token_ids.size() != cfg.max_doc_len) {
    throw DimensionError("encode_fact expects " + std::to_string(cfg.max_doc_len) +
                         " token ids, got " + std::to_string(token_ids.size()));
  }
  Var rows = gather_rows(params.word_embedding, token_ids);
  Var fact;
  for (std::size_t k = 0; k < cfg.windows.size(); ++k) {
    Var positions = conv_windows(rows, params.conv_weight[k], params.conv_bias[k], cfg.windows[k]);
    Var pooled = max_pool_over_positions(positions);
    fact = fact.valid() ? concat(fact, pooled) : pooled;
  }
  return fact;
}

}  // namespace ljp
