#include <gtest/gtest.h>

#include "ljp/error.hpp"
#include "ljp/ops.hpp"
#include "ljp/tape.hpp"

namespace ljp {
namespace {

TEST(Tape, ParamGradientsAccumulateAcrossTapes) {
  Tensor w = Tensor::vector({1.0, 2.0});
  w.set_requires_grad(true);
  for (int rep = 0; rep < 2; ++rep) {
    Tape tape;
    Var x = tape.param(w);
    tape.backward(dot(x, x));  // d/dw = 2w
  }
  EXPECT_DOUBLE_EQ(w.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(w.grad()[1], 8.0);
}

TEST(Tape, ParamReadsValuesInPlace) {
  Tensor w = Tensor::vector({3.0});
  Tape tape;
  Var x = tape.param(w);
  EXPECT_EQ(x.item(), 3.0);
}

TEST(Tape, ConstParamNeverReceivesGradient) {
  const Tensor w = [] {
    Tensor t = Tensor::vector({1.0, 1.0});
    t.set_requires_grad(true);
    return t;
  }();
  Tape tape;
  Var x = tape.param(w);
  Var y = tape.input(Tensor::vector({2.0, 3.0}));
  tape.backward(dot(x, y));
  EXPECT_EQ(w.grad()[0], 0.0);
  EXPECT_EQ(y.grad()[0], 1.0);
  EXPECT_EQ(y.grad()[1], 1.0);
}

TEST(Tape, BackwardNeedsScalar) {
  Tape tape;
  Var x = tape.input(Tensor::vector({1, 2}));
  EXPECT_THROW(tape.backward(x), RankError);
}

TEST(Tape, InferenceModeRecordsNoGradient) {
  Tensor w = Tensor::vector({1.0, 2.0});
  w.set_requires_grad(true);
  Tape tape(GradMode::kInference);
  EXPECT_FALSE(tape.recording());
  Var x = tape.param(w);
  Var loss = dot(x, x);
  EXPECT_DOUBLE_EQ(loss.item(), 5.0);
  EXPECT_FALSE(tape.needs_grad(loss.id()));
}

TEST(Tape, SharedSubexpressionGetsBothContributions) {
  Tape tape;
  Var x = tape.input(Tensor::vector({3.0}));
  Var y = mul(x, x);        // x^2
  Var z = add(y, x);      // x^2 + x
  tape.backward(sum(mul(z, y)));  // (x^2 + x) x^2 -> 4x^3 + 3x^2 = 135
  EXPECT_DOUBLE_EQ(x.grad()[0], 135.0);
}

TEST(Tape, ItemOnVectorIsRankError) {
  Tape tape;
  Var x = tape.constant(Tensor::vector({1, 2}));
  EXPECT_THROW(x.item(), RankError);
}

TEST(Tape, OperandsFromDifferentTapesRejected) {
  Tape a, b;
  Var x = a.constant(Tensor::vector({1}));
  Var y = b.constant(Tensor::vector({1}));
  EXPECT_THROW(add(x, y), Error);
}

}  // namespace
}  // namespace ljp
