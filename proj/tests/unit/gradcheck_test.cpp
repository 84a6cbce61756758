#include <gtest/gtest.h>

#include <cmath>

#include "ljp/error.hpp"
#include "ljp/gradcheck.hpp"
#include "ljp/ops.hpp"

namespace ljp {
namespace {

TEST(RelativeError, FloorsTheDenominator) {
  EXPECT_DOUBLE_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(relative_error(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(1e-10, 0.0), 1e-2);
}

TEST(CheckGradients, PassesOnCorrectGradientAndRestoresValues) {
  Tensor w = Tensor::vector({0.3, -0.7, 1.1});
  const Tensor before = w;
  ScalarFn f = [&](Tape& tape) {
    Var x = tape.param(w);
    return sum(mul(tanh(x), x));
  };
  NamedTensor named[] = {{"w", &w}};
  for (auto stencil : {Stencil::kCentral, Stencil::kFivePoint}) {
    GradCheckReport r = check_gradients(f, named, 1e-4, stencil);
    ASSERT_EQ(r.tensors.size(), 1u);
    EXPECT_EQ(r.tensors[0].coordinates, 3u);
    EXPECT_LT(r.max_relative_error(), 1e-7);
    EXPECT_EQ(w, before);
  }
  EXPECT_FALSE(w.requires_grad());
}

TEST(CheckGradients, GradBufferHoldsAnalyticGradient) {
  Tensor w = Tensor::vector({2.0});
  w.set_requires_grad(true);
  w.grad()[0] = 100.0;  // stale value must not leak into the check
  ScalarFn f = [&](Tape& tape) {
    Var x = tape.param(w);
    return dot(x, x);
  };
  NamedTensor named[] = {{"w", &w}};
  GradCheckReport r = check_gradients(f, named, 1e-5);
  EXPECT_LT(r.max_relative_error(), 1e-8);
  EXPECT_DOUBLE_EQ(w.grad()[0], 4.0);
}

TEST(CheckGradients, FivePointIsMoreAccurateOnSmoothFunction) {
  Tensor w = Tensor::vector({0.9});
  ScalarFn f = [&](Tape& tape) {
    Var x = tape.param(w);
    return sum(mul(mul(x, x), mul(x, x)));  // x^4, third derivative non-zero
  };
  NamedTensor named[] = {{"w", &w}};
  const double central = check_gradients(f, named, 1e-2, Stencil::kCentral).max_relative_error();
  const double five = check_gradients(f, named, 1e-2, Stencil::kFivePoint).max_relative_error();
  EXPECT_LT(five, central);
  EXPECT_LT(five, 1e-10);
}

TEST(CheckGradients, DetectsWrongGradient) {
  // A rule that reports twice the true derivative of sum(x).
  Tensor w = Tensor::vector({1.0, 2.0});
  ScalarFn f = [&](Tape& tape) {
    Var x = tape.param(w);
    const std::uint32_t ix = x.id();
    double s = 0;
    for (double v : x.value()) s += v;
    return tape.record(Shape{}, {s}, true, [ix](Tape& t, std::uint32_t self) {
      auto g = t.grad(self);
      auto gx = t.grad_buffer(ix);
      for (double& v : gx) v += 2.0 * g[0];
    });
  };
  NamedTensor named[] = {{"w", &w}};
  EXPECT_NEAR(check_gradients(f, named, 1e-5).max_relative_error(), 0.5, 1e-6);
}

TEST(CheckGradients, RejectsNonPositiveStep) {
  Tensor w = Tensor::vector({1.0});
  ScalarFn f = [&](Tape& tape) { return sum(tape.param(w)); };
  NamedTensor named[] = {{"w", &w}};
  EXPECT_THROW(check_gradients(f, named, 0.0), DomainError);
}

TEST(GradCheck, ConvenienceFormOnOwnedInputs) {
  auto f = [](Tape&, std::span<const Var> v) { return dot(sigmoid(v[0]), v[1]); };
  EXPECT_LT(grad_check(f, {Tensor::vector({0.1, -0.4}), Tensor::vector({1.5, 2.0})}, 1e-5), 1e-7);
}

}  // namespace
}  // namespace ljp
