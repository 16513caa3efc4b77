// core/include/gid/evaluation.h

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

#ifndef GID_EVALUATION_H_
#define GID_EVALUATION_H_

#include <optional>
#include <string>
#include <vector>

#include "gid/dataset.h"
#include "gid/heads.h"

namespace gid {

/// Metrics for one run. Fractions in [0, 1]; OOD fields are empty when the
/// test set holds no OOD rows.
struct EvalReport {
  std::string method;
  std::optional<double> ind_acc;
  std::optional<double> ood_acc;
  std::optional<double> ood_f1;
  double all_acc = 0.0;
  double all_f1 = 0.0;
  std::size_t n_ind = 0;
  std::size_t n_ood = 0;
  std::vector<std::vector<long>> confusion;  // [gold][pred]
  std::vector<std::string> labels;
  std::string notes;

  std::string ToJson() const;
  static EvalReport FromJson(const std::string &text);
  bool operator==(const EvalReport &) const = default;
};

/// Round half to even at 2 decimals, of 100 * fraction.
double Percent(double fraction);

/// Support-weighted mean of per-class F1 over the rows given; classes with
/// no support are skipped, 0/0 precision or recall counts as 0.
double WeightedF1(const std::vector<int> &gold, const std::vector<int> &pred, int num_classes);
double Accuracy(const std::vector<int> &gold, const std::vector<int> &pred);

/// gold/pred are joint indices. EvaluationError on out-of-range values.
EvalReport Evaluate(const std::vector<int> &gold, const std::vector<int> &pred,
                    const LabelSpace &labels);

/// Gold names are mapped through the label space; an unknown name is an
/// EvaluationError.
EvalReport EvaluateNamed(const std::vector<std::string> &gold, const std::vector<int> &pred,
                         const LabelSpace &labels);

/// Kuhn-Munkres on an n x n cost matrix; returns assignment[row] = col with
/// minimal total cost.
std::vector<int> SolveAssignment(const std::vector<std::vector<double>> &cost);

/// Bijection cluster -> OOD label offset (0..M-1) maximising matched count.
/// ShapeError if an index falls outside [0, M).
std::vector<int> HungarianAlign(const std::vector<int> &clusters, const std::vector<int> &gold,
                                int m);

/// One row per report, columns IND ACC | OOD ACC | OOD F1 | ALL ACC | ALL F1.
std::string FormatTable(const std::vector<EvalReport> &reports);

/// Runs a model over the test partition. `sealed` is not needed here: test
/// records carry their labels.
EvalReport EvaluateModel(Model &model, const GidSplit &split);

}  // namespace gid

#endif  // GID_EVALUATION_H_
