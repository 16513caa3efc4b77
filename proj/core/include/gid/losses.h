// core/include/gid/losses.h

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

#ifndef GID_LOSSES_H_
#define GID_LOSSES_H_

#include <string>
#include <vector>

#include "gid/autodiff.h"
#include "gid/dataset.h"

namespace gid {

inline constexpr double kProbEps = 1e-8;

/// 0.5 * (KL(p||q) + KL(q||p)) after clamping entries to >= eps and
/// renormalising. ShapeError on length mismatch.
double SymmetricKl(const Eigen::VectorXd &p, const Eigen::VectorXd &q, double eps = kProbEps);

/// Row-wise symmetric KL between two B x K distribution matrices, as a B x 1 Var.
ad::Var SymmetricKlRows(const ad::Var &p, const ad::Var &q, double eps = kProbEps);

/// Softmax over the d components of each pooled row, then the batch mean of
/// the symmetric KL between the two views.
ad::Var DataConsistency(const ad::Var &pooled1, const ad::Var &pooled2, double eps = kProbEps);

/// Batch-mean symmetric KL between the heads' distributions of one view.
ad::Var PredictionConsistencyView(const ad::Var &p1, const ad::Var &p2, double eps = kProbEps);

struct ViewDistributions {
  ad::Var p1;
  ad::Var p2;
};

/// Mean of PredictionConsistencyView over the views.
ad::Var PredictionConsistency(const std::vector<ViewDistributions> &views,
                              double eps = kProbEps);

struct HybridLabels {
  std::vector<int> hybrid1;  // IND gold, else argmax of p2
  std::vector<int> hybrid2;  // IND gold, else argmax of p1
};

/// `gold` holds the joint index for IND rows; it is ignored for OOD rows.
HybridLabels MakeHybridLabels(const Eigen::MatrixXd &p1, const Eigen::MatrixXd &p2,
                              const std::vector<Origin> &origin, const std::vector<int> &gold);

/// Batch-mean -log p[target] with clamping.
ad::Var CrossEntropy(const ad::Var &p, const std::vector<int> &target, double eps = kProbEps);

/// Which pseudo labels each head learns from at OOD rows.
enum class CpTargets {
  kOther,  // P1 against hybrid1 (argmax P2), P2 against hybrid2 (argmax P1)
  kOwn,    // P1 against hybrid2 (argmax P1), P2 against hybrid1 (argmax P2)
};

std::string CpTargetsName(CpTargets t);
/// "other" or "own"; ConfigError otherwise.
CpTargets ParseCpTargets(const std::string &name);

/// Mean of the two heads' CE against hybrid labels for one view; the labels
/// are computed from the values of p1/p2 and carry no gradient.
ad::Var CrossPredictionView(const ad::Var &p1, const ad::Var &p2,
                            const std::vector<Origin> &origin, const std::vector<int> &gold,
                            double eps = kProbEps, CpTargets targets = CpTargets::kOther);
/// Mean of CrossPredictionView over the views.
ad::Var CrossPrediction(const std::vector<ViewDistributions> &views,
                        const std::vector<Origin> &origin, const std::vector<int> &gold,
                        double eps = kProbEps, CpTargets targets = CpTargets::kOther);

/// pair[i] is the index of row i's positive in z (2B rows).
std::vector<int> ViewPairMap(int batch);

/// NT-Xent with cosine similarity; the denominator runs over every k != i.
/// Mean over anchors unless `sum` is set.
ad::Var NtXent(const ad::Var &z, const std::vector<int> &pair, double tau, bool sum = false);

struct LossWeights {
  double dc = 1.0;
  double pc = 1.0;
  double cp = 1.0;
  double cl = 1.0;
};

/// ConfigError if any weight is negative.
void ValidateWeights(const LossWeights &w);

struct LossParts {
  ad::Var dc;
  ad::Var pc;
  ad::Var cp;
  ad::Var cl;
};

/// Weighted sum. A zero weight drops the term from the graph.
ad::Var TotalLoss(const LossParts &parts, const LossWeights &weights);

}  // namespace gid

#endif  // GID_LOSSES_H_
