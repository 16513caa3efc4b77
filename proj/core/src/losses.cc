// core/src/losses.cc

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

#include "gid/losses.h"

#include <cmath>
#include <string>

#include "gid/errors.h"

namespace gid {

double SymmetricKl(const Eigen::VectorXd &p, const Eigen::VectorXd &q, double eps) {
  if (p.size() != q.size())
    throw ShapeError("symmetric KL over lengths " + std::to_string(p.size()) + " and " +
                     std::to_string(q.size()));
  Eigen::VectorXd a = p.cwiseMax(eps);
  Eigen::VectorXd b = q.cwiseMax(eps);
  a /= a.sum();
  b /= b.sum();
  return 0.5 * ((a - b).array() * (a.array().log() - b.array().log())).sum();
}

ad::Var SymmetricKlRows(const ad::Var &p, const ad::Var &q, double eps) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw ShapeError("symmetric KL over mismatched distribution matrices");
  ad::Var a = ad::ClampRenormRows(p, eps);
  ad::Var b = ad::ClampRenormRows(q, eps);
  // KL(a||b) + KL(b||a) = sum (a - b)(log a - log b)
  return ad::Scale(ad::SumCols(ad::Mul(ad::Sub(a, b), ad::Sub(ad::Log(a), ad::Log(b)))), 0.5);
}

ad::Var DataConsistency(const ad::Var &pooled1, const ad::Var &pooled2, double eps) {
  return ad::Mean(SymmetricKlRows(ad::SoftmaxRows(pooled1), ad::SoftmaxRows(pooled2), eps));
}

ad::Var PredictionConsistencyView(const ad::Var &p1, const ad::Var &p2, double eps) {
  return ad::Mean(SymmetricKlRows(p1, p2, eps));
}

ad::Var PredictionConsistency(const std::vector<ViewDistributions> &views, double eps) {
  if (views.empty()) throw ShapeError("prediction consistency needs at least one view");
  ad::Var acc = PredictionConsistencyView(views[0].p1, views[0].p2, eps);
  for (std::size_t v = 1; v < views.size(); ++v)
    acc = ad::Add(acc, PredictionConsistencyView(views[v].p1, views[v].p2, eps));
  return ad::Scale(acc, 1.0 / static_cast<double>(views.size()));
}

HybridLabels MakeHybridLabels(const Eigen::MatrixXd &p1, const Eigen::MatrixXd &p2,
                              const std::vector<Origin> &origin, const std::vector<int> &gold) {
  const auto n = static_cast<std::size_t>(p1.rows());
  if (p2.rows() != p1.rows() || p2.cols() != p1.cols() || origin.size() != n || gold.size() != n)
    throw ShapeError("hybrid labels: batch shapes disagree");
  HybridLabels h;
  h.hybrid1.resize(n);
  h.hybrid2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (origin[i] == Origin::kInd) {
      if (gold[i] < 0 || gold[i] >= p1.cols())
        throw ShapeError("IND row " + std::to_string(i) + " has no valid gold label");
      h.hybrid1[i] = h.hybrid2[i] = gold[i];
    } else {
      Eigen::Index a1, a2;
      p1.row(r).maxCoeff(&a1);
      p2.row(r).maxCoeff(&a2);
      h.hybrid1[i] = static_cast<int>(a2);
      h.hybrid2[i] = static_cast<int>(a1);
    }
  }
  return h;
}

ad::Var CrossEntropy(const ad::Var &p, const std::vector<int> &target, double eps) {
  if (static_cast<Eigen::Index>(target.size()) != p.rows())
    throw ShapeError("cross entropy: target length differs from batch");
  return ad::Scale(ad::Mean(ad::Log(ad::PickPerRow(ad::ClampRenormRows(p, eps), target))), -1.0);
}

std::string CpTargetsName(CpTargets t) { return t == CpTargets::kOther ? "other" : "own"; }

CpTargets ParseCpTargets(const std::string &name) {
  if (name == "other") return CpTargets::kOther;
  if (name == "own") return CpTargets::kOwn;
  throw ConfigError("cp_targets must be other or own, got '" + name + "'");
}

ad::Var CrossPredictionView(const ad::Var &p1, const ad::Var &p2,
                            const std::vector<Origin> &origin, const std::vector<int> &gold,
                            double eps, CpTargets targets) {
  HybridLabels h = MakeHybridLabels(p1.value(), p2.value(), origin, gold);
  const bool other = targets == CpTargets::kOther;
  return ad::Scale(ad::Add(CrossEntropy(p1, other ? h.hybrid1 : h.hybrid2, eps),
                           CrossEntropy(p2, other ? h.hybrid2 : h.hybrid1, eps)),
                   0.5);
}

ad::Var CrossPrediction(const std::vector<ViewDistributions> &views,
                        const std::vector<Origin> &origin, const std::vector<int> &gold,
                        double eps, CpTargets targets) {
  if (views.empty()) throw ShapeError("cross prediction needs at least one view");
  ad::Var acc = CrossPredictionView(views[0].p1, views[0].p2, origin, gold, eps, targets);
  for (std::size_t v = 1; v < views.size(); ++v)
    acc = ad::Add(acc, CrossPredictionView(views[v].p1, views[v].p2, origin, gold, eps, targets));
  return ad::Scale(acc, 1.0 / static_cast<double>(views.size()));
}

std::vector<int> ViewPairMap(int batch) {
  std::vector<int> pair(static_cast<std::size_t>(2 * batch));
  for (int i = 0; i < batch; ++i) {
    pair[static_cast<std::size_t>(i)] = i + batch;
    pair[static_cast<std::size_t>(i + batch)] = i;
  }
  return pair;
}

ad::Var NtXent(const ad::Var &z, const std::vector<int> &pair, double tau, bool sum) {
  const Eigen::Index n = z.rows();
  if (n < 2 || n % 2 != 0) throw ShapeError("NT-Xent needs 2B rows with B >= 1");
  if (static_cast<Eigen::Index>(pair.size()) != n) throw ShapeError("NT-Xent pair map size");
  if (!(tau > 0.0)) throw ConfigError("NT-Xent temperature must be positive");
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = pair[static_cast<std::size_t>(i)];
    if (j < 0 || j >= n || j == i) throw ShapeError("NT-Xent pair map is not a matching");
  }
  ad::Var zn = ad::L2NormalizeRows(z, 1e-12);
  ad::Var sim = ad::Scale(ad::MatMulNT(zn, zn), 1.0 / tau);
  // Self-similarity is excluded from the denominator.
  ad::Matrix self = ad::Matrix::Zero(n, n);
  self.diagonal().setConstant(-1e30);
  ad::Var logp = ad::LogSoftmaxRows(ad::Add(sim, ad::Constant(std::move(self))));
  ad::Var picked = ad::PickPerRow(logp, pair);
  return ad::Scale(sum ? ad::Sum(picked) : ad::Mean(picked), -1.0);
}

void ValidateWeights(const LossWeights &w) {
  for (double v : {w.dc, w.pc, w.cp, w.cl})
    if (!(v >= 0.0)) throw ConfigError("loss weights must be non-negative");
}

ad::Var TotalLoss(const LossParts &parts, const LossWeights &weights) {
  ValidateWeights(weights);
  ad::Var total = ad::Constant(ad::Matrix::Zero(1, 1));
  auto add = [&](const ad::Var &part, double w) {
    if (w == 0.0) return;
    if (!part.defined()) throw ShapeError("loss term with non-zero weight was not computed");
    total = ad::Add(total, ad::Scale(part, w));
  };
  add(parts.dc, weights.dc);
  add(parts.pc, weights.pc);
  add(parts.cp, weights.cp);
  add(parts.cl, weights.cl);
  return total;
}

}  // namespace gid
