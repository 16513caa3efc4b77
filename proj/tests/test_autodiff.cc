// tests/test_autodiff.cc

// Copyright 2026  The gid authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "gid/autodiff.h"

#include <functional>
#include <random>

#include "doctest.h"
#include "oracles.h"

namespace ad = gid::ad;
using ad::Matrix;
using ad::Var;

namespace {

Matrix Randn(std::mt19937_64 &g, int r, int c) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(g);
  return m;
}

// Gradient of sum(f(x) .* w) against central differences.
double Check(const std::function<Var(const Var &)> &f, const Matrix &x, std::mt19937_64 &g) {
  const Var in = ad::Input(x);
  const Var out = f(in);
  const Matrix w = Randn(g, out.rows(), out.cols());
  ad::Backward(ad::Sum(ad::Mul(out, ad::Constant(w))));
  const Matrix numeric = oracle::NumericGrad(
      [&](const Matrix &xi) { return f(ad::Constant(xi)).value().cwiseProduct(w).sum(); }, x);
  return oracle::RelError(in.grad(), numeric);
}

}  // namespace

TEST_CASE("op gradients match central differences") {
  std::mt19937_64 g(3);
  const Matrix b = Randn(g, 4, 3);
  CHECK(Check([&](const Var &x) { return ad::MatMul(x, ad::Constant(b)); }, Randn(g, 2, 4), g) < 1e-6);
  CHECK(Check([&](const Var &x) { return ad::MatMulNT(x, x); }, Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::SoftmaxRows(x); }, Randn(g, 3, 5), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::LogSoftmaxRows(x); }, Randn(g, 3, 5), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::Tanh(x); }, Randn(g, 3, 5), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::L2NormalizeRows(x, 1e-12); }, Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::ClampRenormRows(ad::SoftmaxRows(x), 1e-8); },
              Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::MeanRows(x); }, Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::SumCols(x); }, Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::PickPerRow(x, {2, 0, 1}); }, Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::SliceCols(ad::SliceRows(x, 1, 2), 1, 2); },
              Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::VStack({x, ad::Scale(x, 2.0)}); }, Randn(g, 2, 3), g) <
        1e-6);
  CHECK(Check([](const Var &x) { return ad::GatherRows(x, {0, 2, 2, 1}); }, Randn(g, 3, 4), g) <
        1e-6);
  const Matrix gain = Randn(g, 1, 4), bias = Randn(g, 1, 4);
  CHECK(Check([&](const Var &x) {
    return ad::LayerNormRows(x, ad::Constant(gain), ad::Constant(bias));
  }, Randn(g, 3, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) {
    return ad::SegmentAttention(x, ad::Scale(x, 0.5), ad::Tanh(x), {2, 3}, 0.7);
  }, Randn(g, 5, 4), g) < 1e-6);
  CHECK(Check([](const Var &x) { return ad::Log(ad::SoftmaxRows(x)); }, Randn(g, 2, 3), g) < 1e-6);
}

TEST_CASE("parameter leaves accumulate into the parameter gradient") {
  ad::Parameter p("p", Matrix::Ones(2, 2));
  ad::Backward(ad::Sum(ad::Scale(ad::Leaf(p), 3.0)));
  CHECK(p.grad().isApprox(Matrix::Constant(2, 2, 3.0)));
  ad::Backward(ad::Sum(ad::Leaf(p)));
  CHECK(p.grad().isApprox(Matrix::Constant(2, 2, 4.0)));
  p.ZeroGrad();
  CHECK(p.grad().isZero());
}

TEST_CASE("frozen parameters and detached values carry no gradient") {
  ad::Parameter p("p", Matrix::Ones(1, 3));
  p.set_trainable(false);
  const Var leaf = ad::Leaf(p);
  CHECK_FALSE(leaf.requires_grad());
  const Var x = ad::Input(Matrix::Ones(1, 3));
  const Var y = ad::Add(ad::Detach(x), ad::Scale(x, 2.0));
  ad::Backward(ad::Sum(y));
  CHECK(x.grad().isApprox(Matrix::Constant(1, 3, 2.0)));
}

TEST_CASE("zero rows pass no gradient through normalization") {
  std::size_t zero = 0;
  Matrix m(2, 2);
  m << 0.0, 0.0, 3.0, 4.0;
  const Var x = ad::Input(m);
  const Var n = ad::L2NormalizeRows(x, 1e-12, &zero);
  CHECK(zero == 1);
  CHECK(n.value().row(0).isZero());
  CHECK(n.value()(1, 0) == doctest::Approx(0.6));
  ad::Backward(ad::Sum(n));
  CHECK(x.grad().row(0).isZero());
}
