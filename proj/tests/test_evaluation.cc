// tests/test_evaluation.cc

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

#include "gid/evaluation.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gid/errors.h"
#include "oracles.h"

namespace {

gid::LabelSpace TwoByTwo() { return gid::LabelSpace({"a", "b"}, {"x", "y"}); }

}  // namespace

TEST_CASE("percent rounds half to even") {
  CHECK(gid::Percent(2.0 / 3.0) == doctest::Approx(66.67));
  CHECK(gid::Percent(1.0) == doctest::Approx(100.0));
  CHECK(gid::Percent(0.123450) == doctest::Approx(12.34));
  CHECK(gid::Percent(0.123750) == doctest::Approx(12.38));
}

TEST_CASE("two-class toy: accuracy and weighted f1") {
  const std::vector<int> gold{0, 0, 1}, pred{0, 1, 1};
  CHECK(gid::Percent(gid::Accuracy(gold, pred)) == doctest::Approx(66.67));
  // A: p=1, r=1/2 -> 2/3; B: p=1/2, r=1 -> 2/3.
  CHECK(gid::WeightedF1(gold, pred, 2) == doctest::Approx(oracle::WeightedF1(gold, pred, 2)));
  CHECK(gid::Percent(gid::WeightedF1(gold, pred, 2)) == doctest::Approx(66.67));
}

TEST_CASE("perfect predictions score 100 everywhere") {
  const std::vector<int> gold{0, 1, 2, 3, 3, 2};
  const auto r = gid::Evaluate(gold, gold, TwoByTwo());
  CHECK(gid::Percent(*r.ind_acc) == 100.0);
  CHECK(gid::Percent(*r.ood_acc) == 100.0);
  CHECK(gid::Percent(*r.ood_f1) == 100.0);
  CHECK(gid::Percent(r.all_acc) == 100.0);
  CHECK(gid::Percent(r.all_f1) == 100.0);
}

TEST_CASE("empty OOD partition leaves OOD metrics undefined") {
  const auto r = gid::Evaluate({0, 1}, {0, 0}, TwoByTwo());
  CHECK_FALSE(r.ood_acc.has_value());
  CHECK_FALSE(r.ood_f1.has_value());
  CHECK(r.n_ood == 0);
  const std::string table = gid::FormatTable({r});
  const std::string row = table.substr(table.rfind('\n', table.size() - 2) + 1);
  CHECK(row.find("|       - |       - |") != std::string::npos);
}

TEST_CASE("unknown gold labels are evaluation errors") {
  CHECK_THROWS_AS(gid::EvaluateNamed({"a", "zzz"}, {0, 1}, TwoByTwo()), gid::EvaluationError);
  CHECK_THROWS_AS(gid::Evaluate({0, 9}, {0, 1}, TwoByTwo()), gid::EvaluationError);
}

TEST_CASE("reports round-trip through json") {
  auto r = gid::Evaluate({0, 1, 2, 3, 2}, {0, 2, 2, 3, 3}, TwoByTwo());
  r.method = "cpp";
  r.notes = "n";
  CHECK(gid::EvalReport::FromJson(r.ToJson()) == r);
  const auto empty = gid::Evaluate({0}, {0}, TwoByTwo());
  CHECK(gid::EvalReport::FromJson(empty.ToJson()) == empty);
}

TEST_CASE("hungarian alignment") {
  SUBCASE("identity contingency maps to identity") {
    CHECK(gid::HungarianAlign({0, 1, 2, 0}, {0, 1, 2, 0}, 3) == std::vector<int>{0, 1, 2});
  }
  SUBCASE("2x2 contingency [[1,9],[8,2]] swaps") {
    std::vector<int> clusters, gold;
    auto add = [&](int c, int l, int n) {
      for (int i = 0; i < n; ++i) clusters.push_back(c), gold.push_back(l);
    };
    add(0, 0, 1);
    add(0, 1, 9);
    add(1, 0, 8);
    add(1, 1, 2);
    CHECK(gid::HungarianAlign(clusters, gold, 2) == std::vector<int>{1, 0});
    CHECK(oracle::BestMatch(clusters, gold, 2) == 17);
  }
  SUBCASE("out of range indices are shape errors") {
    CHECK_THROWS_AS(gid::HungarianAlign({0, 2}, {0, 1}, 2), gid::ShapeError);
  }
}

TEST_CASE("assignment solver matches brute force on random costs") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int n = 1; n <= 6; ++n) {
    for (int t = 0; t < 20; ++t) {
      std::vector<std::vector<double>> cost(n, std::vector<double>(n));
      for (auto &row : cost)
        for (double &c : row) c = u(g);
      const auto a = gid::SolveAssignment(cost);
      double got = 0;
      for (int i = 0; i < n; ++i) got += cost[i][a[i]];
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double s = 0;
        for (int i = 0; i < n; ++i) s += cost[i][perm[i]];
        best = std::min(best, s);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(got == doctest::Approx(best).epsilon(1e-12));
    }
  }
}
