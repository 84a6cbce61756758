#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ljp/corpus.hpp"
#include "ljp/mpbfn.hpp"
#include "ljp/tape.hpp"
#include "ljp/task_graph.hpp"
#include "ljp/tensor.hpp"

namespace ljp {

struct WcaConfig {
  std::size_t d_n = 32;
  std::size_t ln = 8;
  /// One digit table for every position instead of one per position.
  bool shared_digit_table = false;
  /// Task whose incoming forward predictions use the mixed semantics.
  std::string target_task = "penalty";

  void validate(std::size_t d_c) const;
};

/// Least-significant digit first; always exactly ln entries.
struct DigitVector {
  std::vector<std::uint8_t> digits;
  bool operator==(const DigitVector&) const = default;
};

/// Keeps the ln low decimal digits, zero-padded. Negative values are a
/// DomainError.
DigitVector digitize(std::int64_t value, std::size_t ln);
/// Integer represented by the digits.
std::uint64_t digits_value(const DigitVector& digits);

/// Collocation-attention parameters. Attention and mixing exist for every
/// pre-order task of the target task, in pre-order order.
struct WcaParams {
  std::vector<Tensor> digit_tables;  // ln (or 1 shared) x [10 x d_n]
  LinearParams number;               // [d_w x (d_c + d_w)], [d_w]
  LinearParams lstm;                 // [4 d_c x (d_w + d_c)], [4 d_c]; gates i, f, o, g
  std::vector<std::size_t> attended_tasks;
  std::vector<Tensor> attention;     // [d_c x d_c]
  std::vector<LinearParams> mix;     // [d_c x 2 d_c], [d_c]

  static WcaParams init(const WcaConfig& cfg, const TaskGraph& graph, std::size_t d_w,
                        std::size_t d_c, std::uint64_t seed);

  template <class Self, class Fn>
  static void visit(Self& self, const TaskGraph& graph, Fn&& fn) {
    for (std::size_t k = 0; k < self.digit_tables.size(); ++k) {
      fn("wca.digit_table." + std::to_string(k), self.digit_tables[k]);
    }
    fn(std::string("wca.number.weight"), self.number.weight);
    fn(std::string("wca.number.bias"), self.number.bias);
    fn(std::string("wca.lstm.weight"), self.lstm.weight);
    fn(std::string("wca.lstm.bias"), self.lstm.bias);
    for (std::size_t k = 0; k < self.attended_tasks.size(); ++k) {
      const std::string& id = graph.task(self.attended_tasks[k]).id;
      fn("wca.attention." + id, self.attention[k]);
      fn("wca.mix." + id + ".weight", self.mix[k].weight);
      fn("wca.mix." + id + ".bias", self.mix[k].bias);
    }
  }
};

struct WcaVars {
  std::vector<Var> digit_tables;
  LinearVars number;
  LinearVars lstm;
  std::vector<std::size_t> attended_tasks;
  std::vector<Var> attention;
  std::vector<LinearVars> mix;
};

template <class Params>
WcaVars bind_wca(Tape& tape, Params& p) {
  WcaVars v;
  for (auto& t : p.digit_tables) v.digit_tables.push_back(tape.param(t));
  v.number = {tape.param(p.number.weight), tape.param(p.number.bias)};
  v.lstm = {tape.param(p.lstm.weight), tape.param(p.lstm.bias)};
  v.attended_tasks = p.attended_tasks;
  for (auto& a : p.attention) v.attention.push_back(tape.param(a));
  for (auto& m : p.mix) v.mix.push_back({tape.param(m.weight), tape.param(m.bias)});
  return v;
}

/// num = emb(dig_1) (+) ... (+) emb(dig_ln), length d_n * ln.
Var number_embedding(const DigitVector& digits, const WcaVars& params);
/// ns = tanh(Wn (num (+) x_unit) + bn).
Var number_semantic(std::uint64_t value, Var unit_embedding, const WcaVars& params, std::size_t ln);

struct LstmState {
  Var h;
  Var c;
};
LstmState lstm_step(Var input, const LstmState& state, const LinearVars& cell);
/// Two recurrent steps from a zero state; returns (h1 + h2) / 2.
Var encode_collocation(Var first, Var second, const LinearVars& cell);

struct CollocationAttention {
  Var context;  // ect_j
  Var weights;  // alpha_j; invalid when there are no collocations
};
/// alpha = softmax_i(tanh(Wa ec_i) . sem), context = sum_i alpha_i ec_i.
/// With no collocations the context is the zero vector of length d_c.
CollocationAttention collocation_attention(Tape& tape, std::span<const Var> collocations, Var sem,
                                           Var attention_weight, std::size_t d_c);
/// fc = elu(Wm (ect (+) fact_ori) + bm) (x) fact_j.
Var mixed_semantic(Var context, Var fact_ori, Var task_fact, const LinearVars& mix);

/// ec_i for every collocation of the case. A word that carries a numeral
/// annotation is represented by its number semantic vector.
std::vector<Var> encode_case_collocations(const IndexedCase& input, Var word_embedding,
                                          const WcaVars& params, std::size_t ln);

}  // namespace ljp
