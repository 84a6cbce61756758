#include "ljp/wca.hpp"

#include <map>

#include "ljp/error.hpp"
#include "ljp/init.hpp"
#include "ljp/ops.hpp"

namespace ljp {

void WcaConfig::validate(std::size_t d_c) const {
  if (d_n == 0 || ln == 0) throw ConfigError("d_n and ln must be positive");
  if (d_n * ln != d_c) {
    throw ConfigError("d_n * ln = " + std::to_string(d_n * ln) + " must equal d_c = " +
                      std::to_string(d_c));
  }
}

DigitVector digitize(std::int64_t value, std::size_t ln) {
  if (value < 0) throw DomainError("cannot digitize negative value " + std::to_string(value));
  DigitVector out;
  out.digits.resize(ln, 0);
  auto v = static_cast<std::uint64_t>(value);
  for (std::size_t k = 0; k < ln && v > 0; ++k) {
    out.digits[k] = static_cast<std::uint8_t>(v % 10);
    v /= 10;
  }
  return out;
}

std::uint64_t digits_value(const DigitVector& digits) {
  std::uint64_t value = 0;
  for (std::size_t k = digits.digits.size(); k-- > 0;) value = value * 10 + digits.digits[k];
  return value;
}

WcaParams WcaParams::init(const WcaConfig& cfg, const TaskGraph& graph, std::size_t d_w,
                          std::size_t d_c, std::uint64_t seed) {
  cfg.validate(d_c);
  WcaParams p;
  const std::size_t tables = cfg.shared_digit_table ? 1 : cfg.ln;
  for (std::size_t k = 0; k < tables; ++k) p.digit_tables.emplace_back(Shape{10, cfg.d_n});
  p.number = {Tensor(Shape{d_w, d_c + d_w}), Tensor(Shape{d_w})};
  p.lstm = {Tensor(Shape{4 * d_c, d_w + d_c}), Tensor(Shape{4 * d_c})};
  p.attended_tasks = graph.pre_order(graph.index_of(cfg.target_task));
  for (std::size_t k = 0; k < p.attended_tasks.size(); ++k) {
    p.attention.emplace_back(Shape{d_c, d_c});
    p.mix.push_back({Tensor(Shape{d_c, 2 * d_c}), Tensor(Shape{d_c})});
  }
  visit(p, graph, [&](const std::string& name, Tensor& t) {
    if (name.rfind("wca.digit_table.", 0) == 0) {
      init_uniform(t, -0.1, 0.1, seed, name);
    } else if (t.rank() == 2) {
      init_glorot(t, seed, name);
    }
  });
  for (std::size_t j = d_c; j < 2 * d_c; ++j) p.lstm.bias[j] = 1.0;
  return p;
}

Var number_embedding(const DigitVector& digits, const WcaVars& params) {
  Var num;
  const bool shared = params.digit_tables.size() == 1;
  if (!shared && params.digit_tables.size() != digits.digits.size()) {
    throw DimensionError("digit vector of length " + std::to_string(digits.digits.size()) +
                         " for " + std::to_string(params.digit_tables.size()) + " digit tables");
  }
  for (std::size_t k = 0; k < digits.digits.size(); ++k) {
    Var e = embedding_lookup(params.digit_tables[shared ? 0 : k], digits.digits[k]);
    num = num.valid() ? concat(num, e) : e;
  }
  return num;
}

Var number_semantic(std::uint64_t value, Var unit_embedding, const WcaVars& params, std::size_t ln) {
  Var num = number_embedding(digitize(static_cast<std::int64_t>(value), ln), params);
  Var joined = concat(num, unit_embedding);
  return tanh(add(matmul(params.number.weight, joined), params.number.bias));
}

LstmState lstm_step(Var input, const LstmState& state, const LinearVars& cell) {
  const std::size_t hidden = state.h.size();
  Var z = add(matmul(cell.weight, concat(input, state.h)), cell.bias);
  Var in_gate = sigmoid(slice(z, 0, hidden));
  Var forget_gate = sigmoid(slice(z, hidden, hidden));
  Var out_gate = sigmoid(slice(z, 2 * hidden, hidden));
  Var candidate = tanh(slice(z, 3 * hidden, hidden));
  Var c = add(mul(forget_gate, state.c), mul(in_gate, candidate));
  Var h = mul(out_gate, tanh(c));
  return {h, c};
}

Var encode_collocation(Var first, Var second, const LinearVars& cell) {
  Tape& tape = first.tape();
  const std::size_t hidden = cell.bias.size() / 4;
  LstmState zero{tape.constant(Tensor(Shape{hidden})), tape.constant(Tensor(Shape{hidden}))};
  LstmState s1 = lstm_step(first, zero, cell);
  LstmState s2 = lstm_step(second, s1, cell);
  return scale(add(s1.h, s2.h), 0.5);
}

CollocationAttention collocation_attention(Tape& tape, std::span<const Var> collocations, Var sem,
                                           Var attention_weight, std::size_t d_c) {
  if (collocations.empty()) return {tape.constant(Tensor(Shape{d_c})), Var()};
  Var stacked = stack_rows(collocations);
  Var keys = tanh(matmul(stacked, transpose(attention_weight)));
  Var weights = softmax(matmul(keys, sem));
  return {matmul(weights, stacked), weights};
}

Var mixed_semantic(Var context, Var fact_ori, Var task_fact, const LinearVars& mix) {
  Var gate = elu(add(matmul(mix.weight, concat(context, fact_ori)), mix.bias));
  return mul(gate, task_fact);
}

std::vector<Var> encode_case_collocations(const IndexedCase& input, Var word_embedding,
                                          const WcaVars& params, std::size_t ln) {
  const std::size_t len = input.token_ids.size();
  std::map<std::size_t, Var> numbers;
  for (const auto& num : input.numerals) {
    if (num.pos >= len || num.unit.empty()) {
      throw AnnotationError("numeral at position " + std::to_string(num.pos) +
                            " has no unit token");
    }
    if (numbers.count(num.pos)) continue;
    Var unit = embedding_lookup(word_embedding, input.token_ids[num.pos]);
    numbers.emplace(num.pos, number_semantic(num.value, unit, params, ln));
  }
  auto word = [&](std::size_t pos) {
    if (auto it = numbers.find(pos); it != numbers.end()) return it->second;
    return embedding_lookup(word_embedding, input.token_ids.at(pos));
  };
  std::vector<Var> out;
  out.reserve(input.collocations.size());
  for (const auto& col : input.collocations) {
    out.push_back(encode_collocation(word(col.first), word(col.second), params.lstm));
  }
  return out;
}

}  // namespace ljp
