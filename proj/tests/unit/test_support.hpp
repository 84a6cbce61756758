#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ljp/model.hpp"
#include "ljp/ops.hpp"
#include "ljp/tape.hpp"
#include "ljp/tensor.hpp"

namespace ljp::test {

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : t.data()) v = u(rng);
  return t;
}

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::vector<double> out(n);
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : out) v = u(rng);
  return out;
}

/// Probability vector with strictly positive entries.
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> out = random_values(n, rng, 0.05, 1.0);
  double s = 0.0;
  for (double v : out) s += v;
  for (double& v : out) v /= s;
  return out;
}

using OpFn = std::function<Var(Tape&, const std::vector<Var>&)>;

/// Largest |analytic - numeric| / (1 + |numeric|) over every input coordinate
/// of sum(w (x) op(inputs)) for fixed random w, with central differences
/// computed here rather than by the library's checker.
inline double op_gradient_error(const OpFn& op, std::vector<Tensor> inputs, std::uint64_t seed = 5,
                                double h = 1e-6) {
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  auto loss = [&](Tape& tape, const std::vector<Var>& vars) {
    Var out = op(tape, vars);
    if (weights.empty()) weights = random_values(out.size(), rng);
    return sum(mul(out, tape.constant(out.shape(), weights)));
  };
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.input(t));
    tape.backward(loss(tape, vars));
    for (const auto& v : vars) analytic.emplace_back(v.grad().begin(), v.grad().end());
  }
  auto eval = [&]() {
    Tape tape(GradMode::kInference);
    std::vector<Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.constant(t));
    return loss(tape, vars).item();
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto data = inputs[k].data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double x = data[i];
      data[i] = x + h;
      const double up = eval();
      data[i] = x - h;
      const double down = eval();
      data[i] = x;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(analytic[k][i] - numeric) / (1.0 + std::abs(numeric)));
    }
  }
  return worst;
}

inline std::vector<double> values_of(Var v) { return {v.value().begin(), v.value().end()}; }

inline double total(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

/// Small model used by gradient and training tests: d_w = d_c = 8, d_s = 6,
/// 12-token documents, tasks of 3, 4 and 5 classes.
inline ModelConfig toy_config(Variant variant = Variant::kMpbfnWca) {
  ModelConfig cfg;
  cfg.encoder.d_w = 8;
  cfg.encoder.windows = {2, 3, 4, 5};
  cfg.encoder.d_c = 8;
  cfg.encoder.max_doc_len = 12;
  cfg.d_s = 6;
  cfg.wca.d_n = 2;
  cfg.wca.ln = 4;
  cfg.tasks = {{"law", 3}, {"charge", 4}, {"penalty", 5}};
  cfg.variant = variant;
  return cfg;
}

}  // namespace ljp::test
