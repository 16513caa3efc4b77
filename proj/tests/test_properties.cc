// tests/test_properties.cc

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

// Randomised properties of the loss stack and the metric code.
#include <random>

#include "criteria.h"
#include "doctest.h"
#include "gid/evaluation.h"
#include "gid/losses.h"
#include "oracles.h"

namespace ad = gid::ad;
using ad::Matrix;

namespace {

Matrix Randn(std::mt19937_64 &g, int r, int c, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  return Matrix::NullaryExpr(r, c, [&] { return n(g); });
}

std::vector<gid::Origin> AllOod(int b) { return std::vector<gid::Origin>(b, gid::Origin::kOod); }

}  // namespace

TEST_CASE("consistency and contrastive terms are nonnegative") {
  std::mt19937_64 g(21);
  for (int t = 0; t < 200; ++t) {
    const int b = 1 + t % 4, c = 2 + t % 5, d = 2 + t % 7;
    const auto p1 = ad::SoftmaxRows(ad::Constant(Randn(g, b, c, 3.0)));
    const auto p2 = ad::SoftmaxRows(ad::Constant(Randn(g, b, c, 3.0)));
    const double dc = gid::DataConsistency(ad::Constant(Randn(g, b, d)), ad::Constant(Randn(g, b, d))).scalar();
    const double pc = gid::PredictionConsistency({{p1, p2}}).scalar();
    CHECK(dc >= 0.0);
    CHECK(pc >= 0.0);
    CHECK(gid::CrossPrediction({{p1, p2}}, AllOod(b), std::vector<int>(b, -1)).scalar() >= 0.0);
    CHECK(gid::NtXent(ad::Constant(Randn(g, 2 * b, d)), gid::ViewPairMap(b), 0.1).scalar() >= 0.0);
    // The consistency term is exactly the sum of its two parts.
    gid::LossParts parts{ad::Constant(Matrix::Constant(1, 1, dc)), ad::Constant(Matrix::Constant(1, 1, pc)),
                         {}, {}};
    CHECK(gid::TotalLoss(parts, {1, 1, 0, 0}).scalar() == dc + pc);
  }
}

TEST_CASE("head distributions sum to one") {
  std::mt19937_64 g(4);
  for (int t = 0; t < 50; ++t) {
    const Matrix p = ad::SoftmaxRows(ad::Constant(Randn(g, 4, 6, 20.0))).value();
    for (int r = 0; r < 4; ++r) CHECK(std::abs(p.row(r).sum() - 1.0) < 1e-6);
  }
}

TEST_CASE("pseudo labels carry no gradient") {
  // With the predicting head fixed, a small change to the logits that chose
  // the pseudo label leaves the term scored against it constant.
  std::mt19937_64 g(17);
  for (int t = 0; t < 50; ++t) {
    const int b = 3, c = 4;
    const Matrix x1 = Randn(g, b, c), x2 = Randn(g, b, c);
    auto cp_head1 = [&](const Matrix &logits2) {
      const auto p1 = ad::SoftmaxRows(ad::Constant(x1));
      const auto p2 = ad::SoftmaxRows(ad::Constant(logits2));
      const auto h = gid::MakeHybridLabels(p1.value(), p2.value(), AllOod(b), std::vector<int>(b, -1));
      return gid::CrossEntropy(p1, h.hybrid1).scalar();
    };
    Matrix nudged = x2;
    for (int r = 0; r < b; ++r) {
      Eigen::Index a;
      x2.row(r).maxCoeff(&a);
      for (int k = 0; k < c; ++k)
        if (k != a) nudged(r, k) -= 1e-3;  // widens the margin, never flips
    }
    CHECK(cp_head1(nudged) == cp_head1(x2));

    // Analytic gradient w.r.t. head 2's logits is that of its own CE term alone.
    const auto in2 = ad::Input(x2);
    ad::Backward(gid::CrossPredictionView(ad::SoftmaxRows(ad::Constant(x1)), ad::SoftmaxRows(in2),
                                          AllOod(b), std::vector<int>(b, -1)));
    std::vector<int> from_p1(b);
    for (int r = 0; r < b; ++r) from_p1[r] = oracle::Argmax(oracle::ToMat(x1)[r]);
    const Matrix numeric = oracle::NumericGrad(
        [&](const Matrix &x) {
          return 0.5 * oracle::Ce(oracle::ToMat(ad::SoftmaxRows(ad::Constant(x)).value()), from_p1);
        },
        x2);
    CHECK(oracle::RelError(in2.grad(), numeric) < 1e-6);
  }
}

TEST_CASE("metric oracles on random confusion data") {
  std::mt19937_64 g(99);
  for (int t = 0; t < 100; ++t) {
    const int c = 2 + t % 9, n = 1 + static_cast<int>(g() % 200);
    std::vector<int> gold(n), pred(n);
    for (int i = 0; i < n; ++i) gold[i] = g() % c, pred[i] = g() % c;
    CHECK(std::abs(gid::Accuracy(gold, pred) - oracle::Accuracy(gold, pred)) < 1e-9);
    CHECK(std::abs(gid::WeightedF1(gold, pred, c) - oracle::WeightedF1(gold, pred, c)) < 1e-9);
  }
}

TEST_CASE("criterion checks at reduced size") {
  for (const auto &r : {criteria::LossOracles(100), criteria::GradientChecks(10),
                        criteria::VerbalizerExactness(20), criteria::SplitRatioLaw(2),
                        criteria::MetricEquivalence(10)}) {
    INFO(r.detail);
    CHECK(r.pass);
  }
}
