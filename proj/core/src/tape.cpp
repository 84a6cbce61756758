#include "ljp/tape.hpp"

#include <algorithm>

#include "ljp/error.hpp"

namespace ljp {

const Shape& Var::shape() const { return tape_->shape(id_); }
std::size_t Var::size() const { return tape_->value(id_).size(); }
std::span<const double> Var::value() const { return tape_->value(id_); }
std::span<const double> Var::grad() const { return tape_->grad(id_); }

double Var::item() const {
  auto v = value();
  if (v.size() != 1) throw RankError("item() on tensor " + shape_string(shape()));
  return v[0];
}

Tensor Var::to_tensor() const {
  auto v = value();
  return Tensor(shape(), std::vector<double>(v.begin(), v.end()));
}

Var Tape::param(Tensor& tensor) {
  Node node;
  node.shape = tensor.shape();
  node.external = &tensor;
  node.leaf = true;
  node.needs_grad = recording() && tensor.requires_grad();
  if (node.needs_grad) node.grad_target = &tensor;
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::param(const Tensor& tensor) {
  Node node;
  node.shape = tensor.shape();
  node.external = &tensor;
  node.leaf = true;
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) {
  Node node;
  node.shape = value.shape();
  node.value.assign(value.data().begin(), value.data().end());
  node.leaf = true;
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Shape shape, std::vector<double> values) {
  return constant(Tensor(std::move(shape), std::move(values)));
}

Var Tape::input(Tensor value) {
  Node node;
  node.shape = value.shape();
  node.value.assign(value.data().begin(), value.data().end());
  node.leaf = true;
  node.needs_grad = recording();
  if (node.needs_grad) node.grad.assign(node.value.size(), 0.0);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

std::span<const double> Tape::value(std::uint32_t id) const {
  const Node& n = nodes_[id];
  if (n.external) return n.external->data();
  return n.value;
}

std::span<const double> Tape::grad(std::uint32_t id) const {
  const Node& n = nodes_[id];
  if (n.external) return n.external->grad();
  return n.grad;
}

std::span<double> Tape::grad_buffer(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.grad_target) return n.grad_target->grad();
  if (n.external) return {};
  return n.grad;
}

Var Tape::record(Shape shape, std::vector<double> values, bool needs_grad, BackwardFn backward) {
  Node node;
  node.shape = std::move(shape);
  node.value = std::move(values);
  node.needs_grad = recording() && needs_grad;
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw Error("backward: loss recorded on another tape");
  const std::uint32_t root = loss.id();
  if (value(root).size() != 1) {
    throw RankError("backward needs a scalar loss, got " + shape_string(nodes_[root].shape));
  }
  if (!nodes_[root].needs_grad) return;

  for (Node& n : nodes_) {
    if (!n.leaf && n.needs_grad) n.grad.assign(n.value.size(), 0.0);
  }
  grad_buffer(root)[0] += 1.0;
  for (std::uint32_t id = root + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.needs_grad && n.backward) n.backward(*this, id);
  }
}

}  // namespace ljp
