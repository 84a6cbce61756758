#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ljp/tape.hpp"

namespace ljp {

// Differentiable tensor ops. All shape alignment is explicit; there is no
// broadcasting. Rank-1 operands of matmul act as a row (left) or a column
// (right) vector and the corresponding output axis is dropped.

Var matmul(Var a, Var b);

enum class Elementwise { kAdd, kSub, kMul };
Var elementwise(Elementwise kind, Var a, Var b);
inline Var add(Var a, Var b) { return elementwise(Elementwise::kAdd, a, b); }
inline Var sub(Var a, Var b) { return elementwise(Elementwise::kSub, a, b); }
inline Var mul(Var a, Var b) { return elementwise(Elementwise::kMul, a, b); }

Var concat(Var a, Var b);

enum class Activation { kElu, kSigmoid, kTanh, kSoftmax };
/// elu uses alpha = 1. softmax is rank-1 only and subtracts the max first.
Var activation(Activation kind, Var x);
inline Var elu(Var x) { return activation(Activation::kElu, x); }
inline Var sigmoid(Var x) { return activation(Activation::kSigmoid, x); }
inline Var tanh(Var x) { return activation(Activation::kTanh, x); }
inline Var softmax(Var x) { return activation(Activation::kSoftmax, x); }

/// Column-wise max over the rows of C. Ties go to the lowest row index and
/// only that row receives gradient.
Var max_pool_over_positions(Var positions);

Var embedding_lookup(Var table, std::size_t index);
/// Rows of `table` stacked in the order of `indices`: [n x d].
Var gather_rows(Var table, std::span<const std::size_t> indices);

/// Sliding-window affine map over the rows of X ([l x d]). Window i is the
/// concatenation of rows i..i+h-1; output row i is W * window_i + b.
/// W is [filters x h*d], b is [filters]; result is [(l-h+1) x filters].
Var conv_windows(Var rows, Var weight, Var bias, std::size_t window);

Var sum(Var x);
Var dot(Var a, Var b);
/// x / sum(x).
Var normalize(Var x);
Var scale(Var x, double factor);
Var slice(Var x, std::size_t offset, std::size_t length);
Var transpose(Var m);
/// Stacks equal-length rank-1 vars into an [n x d] matrix.
Var stack_rows(std::span<const Var> rows);
/// -log(x[index] + eps) as a scalar.
Var neg_log_at(Var x, std::size_t index, double eps);

}  // namespace ljp
