#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ljp/tape.hpp"
#include "ljp/tensor.hpp"

namespace ljp {

/// Relative error with the denominator floored at 1e-8.
double relative_error(double analytic, double numeric);

struct CoordinateCheck {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct TensorCheck {
  std::string name;
  std::size_t coordinates = 0;
  CoordinateCheck worst;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  double max_relative_error() const;
};

/// Builds a scalar on the given tape. It must read the checked tensors
/// through Tape::param so their gradients are recorded.
using ScalarFn = std::function<Var(Tape&)>;

struct NamedTensor {
  std::string name;
  Tensor* tensor;
};

/// kCentral: (f(x+h) - f(x-h)) / 2h.
/// kFivePoint: (8(f(x+h) - f(x-h)) - (f(x+2h) - f(x-2h))) / 12h.
enum class Stencil { kCentral, kFivePoint };

/// Finite differences for every coordinate of every tensor, compared against
/// reverse-mode gradients. Tensors are restored bit-exactly afterwards and
/// their grads hold the analytic gradient.
GradCheckReport check_gradients(const ScalarFn& f, std::span<const NamedTensor> tensors,
                                double step, Stencil stencil = Stencil::kCentral);

/// Convenience form over owned inputs; returns the worst relative error.
double grad_check(const std::function<Var(Tape&, std::span<const Var>)>& f,
                  std::vector<Tensor> inputs, double step);

}  // namespace ljp
