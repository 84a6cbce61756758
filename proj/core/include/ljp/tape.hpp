#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ljp/tensor.hpp"

namespace ljp {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the
/// tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::uint32_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rank() const { return shape().size(); }
  std::span<const double> value() const;
  double item() const;
  std::span<const double> grad() const;
  Tensor to_tensor() const;

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

enum class GradMode { kRecord, kInference };

/// Records operations in execution order and replays their backward rules
/// in reverse.
///
/// Leaves created with `param()` alias an external Tensor: forward reads its
/// values in place and backward accumulates straight into its grad buffer,
/// so parameter gradients sum across tapes until Tensor::zero_grad().
/// A tape must only be used from one thread.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::uint32_t self)>;

  explicit Tape(GradMode mode = GradMode::kRecord) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var param(Tensor& tensor);
  /// Read-only alias: never receives gradient.
  Var param(const Tensor& tensor);
  Var constant(Tensor value);
  Var constant(Shape shape, std::vector<double> values);
  /// Owned leaf whose gradient is kept on the tape.
  Var input(Tensor value);

  /// dLoss/dLeaf for every reachable leaf. Aliased parameter grads and owned
  /// input grads accumulate across calls; intermediate grads are reset.
  void backward(Var loss);

  bool recording() const noexcept { return mode_ == GradMode::kRecord; }
  std::size_t size() const noexcept { return nodes_.size(); }

  const Shape& shape(std::uint32_t id) const { return nodes_[id].shape; }
  std::span<const double> value(std::uint32_t id) const;
  std::span<const double> grad(std::uint32_t id) const;
  bool needs_grad(std::uint32_t id) const { return nodes_[id].needs_grad; }
  /// Mutable gradient buffer of a node; only valid during backward().
  std::span<double> grad_buffer(std::uint32_t id);

  /// Appends an op result. `needs_grad` should be the OR of the inputs'
  /// flags; the backward rule is dropped when it is false.
  Var record(Shape shape, std::vector<double> values, bool needs_grad, BackwardFn backward);

 private:
  struct Node {
    Shape shape;
    std::vector<double> value;
    const Tensor* external = nullptr;
    Tensor* grad_target = nullptr;
    std::vector<double> grad;
    bool needs_grad = false;
    bool leaf = false;
    BackwardFn backward;
  };

  GradMode mode_;
  std::vector<Node> nodes_;
};

}  // namespace ljp
