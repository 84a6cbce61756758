#include <gtest/gtest.h>

#include "ljp/error.hpp"
#include "ljp/tensor.hpp"

namespace ljp {
namespace {

TEST(Tensor, ShapeAndFill) {
  Tensor t(Shape{2, 3}, 1.5);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  for (double v : t.values()) EXPECT_EQ(v, 1.5);
}

TEST(Tensor, ScalarHasOneElement) {
  Tensor s = Tensor::scalar(4.0);
  EXPECT_EQ(s.rank(), 0u);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], 4.0);
}

TEST(Tensor, MatrixIsRowMajor) {
  Tensor m = Tensor::matrix(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(m.at(0, 1), 2.0);
  EXPECT_EQ(m.at(1, 0), 3.0);
}

TEST(Tensor, ValueCountMustMatchShape) {
  EXPECT_THROW(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(Tensor, RowsOnVectorIsRankError) {
  Tensor v = Tensor::vector({1, 2, 3});
  EXPECT_THROW(v.rows(), RankError);
  EXPECT_THROW(v.cols(), RankError);
}

TEST(Tensor, IdentityAndOnes) {
  Tensor id = Tensor::identity(3);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(id.at(r, c), r == c ? 1.0 : 0.0);
  }
  Tensor ones = Tensor::ones({4});
  EXPECT_EQ(ones, Tensor::vector({1, 1, 1, 1}));
}

TEST(Tensor, GradBufferFollowsRequiresGrad) {
  Tensor t(Shape{3});
  EXPECT_TRUE(t.grad().empty());
  t.set_requires_grad(true);
  ASSERT_EQ(t.grad().size(), 3u);
  t.grad()[1] = 2.0;
  t.zero_grad();
  EXPECT_EQ(t.grad()[1], 0.0);
  t.set_requires_grad(false);
  EXPECT_TRUE(t.grad().empty());
}

TEST(Tensor, EqualityComparesShapeAndValues) {
  EXPECT_EQ(Tensor::vector({1, 2}), Tensor::vector({1, 2}));
  EXPECT_FALSE(Tensor::vector({1, 2, 3, 4}) == Tensor::matrix(2, 2, {1, 2, 3, 4}));
}

TEST(Shape, SizeAndString) {
  EXPECT_EQ(shape_size({2, 3, 4}), 24u);
  EXPECT_EQ(shape_size({}), 1u);
  EXPECT_EQ(shape_string({2, 3}), "[2x3]");
}

}  // namespace
}  // namespace ljp
