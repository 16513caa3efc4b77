// core/include/gid/autodiff.h

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

#ifndef GID_AUTODIFF_H_
#define GID_AUTODIFF_H_

// Tape-free reverse-mode differentiation over dense Eigen matrices.
//
// Every op returns a Var that owns its value and a closure that pushes the
// incoming gradient to its parents. Backward() topologically sorts the graph
// reachable from a 1x1 root and runs the closures in reverse order; leaves
// created from a Parameter accumulate into Parameter::grad.

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gid::ad {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

class Parameter {
 public:
  Parameter() = default;
  Parameter(std::string name, Matrix value)
      : name_(std::move(name)), value_(std::move(value)),
        grad_(Matrix::Zero(value_.rows(), value_.cols())) {}

  const std::string &name() const { return name_; }
  const Matrix &value() const { return value_; }
  Matrix &mutable_value() { return value_; }
  const Matrix &grad() const { return grad_; }
  Matrix &mutable_grad() { return grad_; }
  bool trainable() const { return trainable_; }
  void set_trainable(bool t) { trainable_ = t; }
  void ZeroGrad() { grad_.setZero(value_.rows(), value_.cols()); }

 private:
  std::string name_;
  Matrix value_;
  Matrix grad_;
  bool trainable_ = true;
};

struct Node {
  Matrix value;
  Matrix grad;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &)> backward;
  Parameter *param = nullptr;
  bool requires_grad = false;

  void Accumulate(const Matrix &g);
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  const Matrix &value() const { return node_->value; }
  /// Gradient after Backward(); zero-sized if nothing reached this node.
  const Matrix &grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }
  bool defined() const { return node_ != nullptr; }
  const std::shared_ptr<Node> &node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

Var Constant(Matrix value);
/// Leaf bound to a parameter. Frozen parameters yield constants.
Var Leaf(Parameter &p);
/// Leaf that records its own gradient (used by gradient checks).
Var Input(Matrix value);

/// Runs reverse accumulation from a 1x1 root.
void Backward(const Var &root);

Var Detach(const Var &a);

Var MatMul(const Var &a, const Var &b);
/// a * b^T
Var MatMulNT(const Var &a, const Var &b);
Var Add(const Var &a, const Var &b);
Var Sub(const Var &a, const Var &b);
/// Adds a 1xC row to every row of a.
Var AddRow(const Var &a, const Var &row);
Var Mul(const Var &a, const Var &b);
/// Elementwise product with a constant mask (dropout).
Var MaskMul(const Var &a, const Matrix &mask);
Var Scale(const Var &a, double s);
Var Tanh(const Var &a);
Var Log(const Var &a);

Var SoftmaxRows(const Var &a);
Var LogSoftmaxRows(const Var &a);
/// Each row divided by its L2 norm; rows with norm below eps become zero
/// (and pass no gradient). zero_rows, when given, counts those rows.
Var L2NormalizeRows(const Var &a, double eps, std::size_t *zero_rows = nullptr);
/// Entries clamped to >= eps, then each row renormalised to sum 1.
Var ClampRenormRows(const Var &a, double eps);
Var LayerNormRows(const Var &a, const Var &gain, const Var &bias,
                  double eps = 1e-5);

/// 1xC mean over rows.
Var MeanRows(const Var &a);
/// Rx1 row sums.
Var SumCols(const Var &a);
/// 1x1 sum / mean of all entries.
Var Sum(const Var &a);
Var Mean(const Var &a);
/// Rx1 vector of a(r, index[r]).
Var PickPerRow(const Var &a, const std::vector<int> &index);

Var SliceRows(const Var &a, Eigen::Index start, Eigen::Index n);
Var SliceCols(const Var &a, Eigen::Index start, Eigen::Index n);
Var VStack(const std::vector<Var> &parts);
/// Scaled dot-product attention applied independently to consecutive row
/// segments of q/k/v (lengths sum to the row count): for each segment,
/// softmax(q k^T * scale) v.
Var SegmentAttention(const Var &q, const Var &k, const Var &v,
                     const std::vector<int> &segment_lengths, double scale);
/// Rows of table selected by ids (embedding lookup, scatter-add backward).
Var GatherRows(const Var &table, const std::vector<int> &ids);

}  // namespace gid::ad

#endif  // GID_AUTODIFF_H_
