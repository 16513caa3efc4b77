// core/src/autodiff.cc

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

#include <unordered_set>

#include "gid/errors.h"

namespace gid::ad {

void Node::Accumulate(const Matrix &g) {
  if (grad.size() == 0)
    grad = g;
  else
    grad += g;
}

namespace {

using NodePtr = std::shared_ptr<Node>;

Var Make(Matrix value, std::vector<NodePtr> parents,
         std::function<void(Node &)> backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  bool any = false;
  for (const auto &p : parents) any = any || p->requires_grad;
  if (any) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward = std::move(backward);
  }
  return Var(std::move(n));
}

void CheckSame(const Var &a, const Var &b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": operand shapes differ (" +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
}

}  // namespace

Var Constant(Matrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return Var(std::move(n));
}

Var Leaf(Parameter &p) {
  auto n = std::make_shared<Node>();
  n->value = p.value();
  if (p.trainable()) {
    n->requires_grad = true;
    n->param = &p;
  }
  return Var(std::move(n));
}

Var Input(Matrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return Var(std::move(n));
}

void Backward(const Var &root) {
  if (root.rows() != 1 || root.cols() != 1)
    throw ShapeError("Backward: root must be a scalar");
  if (!root.requires_grad()) return;

  // Iterative post-order DFS.
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(root.node().get(), 0);
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *p = node->parents[next++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->Accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (n->grad.size() == 0) continue;
    if (n->backward) n->backward(*n);
    if (n->param != nullptr) n->param->mutable_grad() += n->grad;
  }
}

Var Detach(const Var &a) { return Constant(a.value()); }

Var MatMul(const Var &a, const Var &b) {
  if (a.cols() != b.rows()) throw ShapeError("MatMul: inner dimensions differ");
  auto pa = a.node(), pb = b.node();
  return Make(a.value() * b.value(), {pa, pb}, [pa, pb](Node &n) {
    if (pa->requires_grad) pa->Accumulate(n.grad * pb->value.transpose());
    if (pb->requires_grad) pb->Accumulate(pa->value.transpose() * n.grad);
  });
}

Var MatMulNT(const Var &a, const Var &b) {
  if (a.cols() != b.cols()) throw ShapeError("MatMulNT: inner dimensions differ");
  auto pa = a.node(), pb = b.node();
  return Make(a.value() * b.value().transpose(), {pa, pb}, [pa, pb](Node &n) {
    if (pa->requires_grad) pa->Accumulate(n.grad * pb->value);
    if (pb->requires_grad) pb->Accumulate(n.grad.transpose() * pa->value);
  });
}

Var Add(const Var &a, const Var &b) {
  CheckSame(a, b, "Add");
  auto pa = a.node(), pb = b.node();
  return Make(a.value() + b.value(), {pa, pb}, [pa, pb](Node &n) {
    if (pa->requires_grad) pa->Accumulate(n.grad);
    if (pb->requires_grad) pb->Accumulate(n.grad);
  });
}

Var Sub(const Var &a, const Var &b) {
  CheckSame(a, b, "Sub");
  auto pa = a.node(), pb = b.node();
  return Make(a.value() - b.value(), {pa, pb}, [pa, pb](Node &n) {
    if (pa->requires_grad) pa->Accumulate(n.grad);
    if (pb->requires_grad) pb->Accumulate(-n.grad);
  });
}

Var AddRow(const Var &a, const Var &row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ShapeError("AddRow: row must be 1x" + std::to_string(a.cols()));
  auto pa = a.node(), pr = row.node();
  Matrix v = a.value().rowwise() + row.value().row(0);
  return Make(std::move(v), {pa, pr}, [pa, pr](Node &n) {
    if (pa->requires_grad) pa->Accumulate(n.grad);
    if (pr->requires_grad) pr->Accumulate(n.grad.colwise().sum());
  });
}

Var Mul(const Var &a, const Var &b) {
  CheckSame(a, b, "Mul");
  auto pa = a.node(), pb = b.node();
  return Make(a.value().cwiseProduct(b.value()), {pa, pb}, [pa, pb](Node &n) {
    if (pa->requires_grad) pa->Accumulate(n.grad.cwiseProduct(pb->value));
    if (pb->requires_grad) pb->Accumulate(n.grad.cwiseProduct(pa->value));
  });
}

Var MaskMul(const Var &a, const Matrix &mask) {
  if (mask.rows() != a.rows() || mask.cols() != a.cols())
    throw ShapeError("MaskMul: mask shape differs");
  auto pa = a.node();
  return Make(a.value().cwiseProduct(mask), {pa}, [pa, mask](Node &n) {
    pa->Accumulate(n.grad.cwiseProduct(mask));
  });
}

Var Scale(const Var &a, double s) {
  auto pa = a.node();
  return Make(a.value() * s, {pa}, [pa, s](Node &n) { pa->Accumulate(n.grad * s); });
}

Var Tanh(const Var &a) {
  auto pa = a.node();
  Matrix y = a.value().array().tanh().matrix();
  return Make(y, {pa}, [pa, y](Node &n) {
    pa->Accumulate((n.grad.array() * (1.0 - y.array().square())).matrix());
  });
}

Var Log(const Var &a) {
  auto pa = a.node();
  return Make(a.value().array().log().matrix(), {pa}, [pa](Node &n) {
    pa->Accumulate((n.grad.array() / pa->value.array()).matrix());
  });
}

namespace {

Matrix SoftmaxValue(const Matrix &x) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

}  // namespace

Var SoftmaxRows(const Var &a) {
  auto pa = a.node();
  Matrix y = SoftmaxValue(a.value());
  return Make(y, {pa}, [pa, y](Node &n) {
    Eigen::VectorXd dot = n.grad.cwiseProduct(y).rowwise().sum();
    Matrix g = y.cwiseProduct(n.grad - dot.replicate(1, y.cols()));
    pa->Accumulate(g);
  });
}

Var LogSoftmaxRows(const Var &a) {
  auto pa = a.node();
  const Matrix &x = a.value();
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double m = x.row(r).maxCoeff();
    double lse = m + std::log((x.row(r).array() - m).exp().sum());
    y.row(r) = x.row(r).array() - lse;
  }
  Matrix p = y.array().exp().matrix();
  return Make(y, {pa}, [pa, p](Node &n) {
    Eigen::VectorXd s = n.grad.rowwise().sum();
    pa->Accumulate(n.grad - p.cwiseProduct(s.replicate(1, p.cols())));
  });
}

Var L2NormalizeRows(const Var &a, double eps, std::size_t *zero_rows) {
  auto pa = a.node();
  const Matrix &x = a.value();
  Eigen::VectorXd norms = x.rowwise().norm();
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (norms(r) < eps) {
      if (zero_rows != nullptr) ++*zero_rows;
      continue;
    }
    y.row(r) = x.row(r) / norms(r);
  }
  return Make(y, {pa}, [pa, y, norms, eps](Node &n) {
    Matrix g = Matrix::Zero(y.rows(), y.cols());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      if (norms(r) < eps) continue;
      double d = n.grad.row(r).dot(y.row(r));
      g.row(r) = (n.grad.row(r) - d * y.row(r)) / norms(r);
    }
    pa->Accumulate(g);
  });
}

Var ClampRenormRows(const Var &a, double eps) {
  auto pa = a.node();
  const Matrix &x = a.value();
  Matrix q = x.cwiseMax(eps);
  Eigen::VectorXd sums = q.rowwise().sum();
  Matrix y = q.array().colwise() / sums.array();
  return Make(y, {pa}, [pa, y, sums, eps](Node &n) {
    const Matrix &x = pa->value;
    Matrix g(y.rows(), y.cols());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      double d = n.grad.row(r).dot(y.row(r));
      for (Eigen::Index c = 0; c < y.cols(); ++c)
        g(r, c) = x(r, c) > eps ? (n.grad(r, c) - d) / sums(r) : 0.0;
    }
    pa->Accumulate(g);
  });
}

Var LayerNormRows(const Var &a, const Var &gain, const Var &bias, double eps) {
  if (gain.rows() != 1 || gain.cols() != a.cols() || bias.rows() != 1 ||
      bias.cols() != a.cols())
    throw ShapeError("LayerNormRows: gain/bias must be 1x" +
                     std::to_string(a.cols()));
  auto pa = a.node(), pg = gain.node(), pb = bias.node();
  const Matrix &x = a.value();
  const double d = static_cast<double>(x.cols());
  Matrix xhat(x.rows(), x.cols());
  Eigen::VectorXd inv_std(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double mu = x.row(r).mean();
    double var = (x.row(r).array() - mu).square().sum() / d;
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (x.row(r).array() - mu) * inv_std(r);
  }
  Matrix y = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  y.rowwise() += bias.value().row(0);
  return Make(y, {pa, pg, pb}, [pa, pg, pb, xhat, inv_std, d](Node &n) {
    if (pg->requires_grad)
      pg->Accumulate(n.grad.cwiseProduct(xhat).colwise().sum());
    if (pb->requires_grad) pb->Accumulate(n.grad.colwise().sum());
    if (pa->requires_grad) {
      Matrix dxhat = n.grad.array().rowwise() * pg->value.row(0).array();
      Matrix g(dxhat.rows(), dxhat.cols());
      for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
        double m1 = dxhat.row(r).sum() / d;
        double m2 = dxhat.row(r).dot(xhat.row(r)) / d;
        g.row(r) = inv_std(r) *
                   (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2).matrix();
      }
      pa->Accumulate(g);
    }
  });
}

Var MeanRows(const Var &a) {
  auto pa = a.node();
  const double n_rows = static_cast<double>(a.rows());
  return Make(a.value().colwise().mean(), {pa}, [pa, n_rows](Node &n) {
    pa->Accumulate(n.grad.replicate(pa->value.rows(), 1) / n_rows);
  });
}

Var SumCols(const Var &a) {
  auto pa = a.node();
  return Make(a.value().rowwise().sum(), {pa}, [pa](Node &n) {
    pa->Accumulate(n.grad.replicate(1, pa->value.cols()));
  });
}

Var Sum(const Var &a) {
  auto pa = a.node();
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return Make(v, {pa}, [pa](Node &n) {
    pa->Accumulate(Matrix::Constant(pa->value.rows(), pa->value.cols(), n.grad(0, 0)));
  });
}

Var Mean(const Var &a) {
  if (a.value().size() == 0) throw ShapeError("Mean: empty operand");
  return Scale(Sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var PickPerRow(const Var &a, const std::vector<int> &index) {
  if (static_cast<Eigen::Index>(index.size()) != a.rows())
    throw ShapeError("PickPerRow: index length differs from row count");
  Matrix v(a.rows(), 1);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    if (index[r] < 0 || index[r] >= a.cols())
      throw ShapeError("PickPerRow: column index out of range");
    v(r, 0) = a.value()(r, index[r]);
  }
  auto pa = a.node();
  return Make(v, {pa}, [pa, index](Node &n) {
    Matrix g = Matrix::Zero(pa->value.rows(), pa->value.cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, index[r]) = n.grad(r, 0);
    pa->Accumulate(g);
  });
}

Var SliceRows(const Var &a, Eigen::Index start, Eigen::Index n_rows) {
  if (start < 0 || n_rows < 0 || start + n_rows > a.rows())
    throw ShapeError("SliceRows: range out of bounds");
  auto pa = a.node();
  return Make(a.value().middleRows(start, n_rows), {pa},
              [pa, start, n_rows](Node &n) {
                Matrix g = Matrix::Zero(pa->value.rows(), pa->value.cols());
                g.middleRows(start, n_rows) = n.grad;
                pa->Accumulate(g);
              });
}

Var SliceCols(const Var &a, Eigen::Index start, Eigen::Index n_cols) {
  if (start < 0 || n_cols < 0 || start + n_cols > a.cols())
    throw ShapeError("SliceCols: range out of bounds");
  auto pa = a.node();
  return Make(a.value().middleCols(start, n_cols), {pa},
              [pa, start, n_cols](Node &n) {
                Matrix g = Matrix::Zero(pa->value.rows(), pa->value.cols());
                g.middleCols(start, n_cols) = n.grad;
                pa->Accumulate(g);
              });
}

Var VStack(const std::vector<Var> &parts) {
  if (parts.empty()) throw ShapeError("VStack: no operands");
  Eigen::Index cols = parts[0].cols(), rows = 0;
  for (const auto &p : parts) {
    if (p.cols() != cols) throw ShapeError("VStack: column counts differ");
    rows += p.rows();
  }
  Matrix v(rows, cols);
  std::vector<NodePtr> parents;
  std::vector<Eigen::Index> offsets;
  Eigen::Index at = 0;
  for (const auto &p : parts) {
    v.middleRows(at, p.rows()) = p.value();
    offsets.push_back(at);
    parents.push_back(p.node());
    at += p.rows();
  }
  auto ps = parents;
  return Make(std::move(v), std::move(parents), [ps, offsets](Node &n) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!ps[i]->requires_grad) continue;
      ps[i]->Accumulate(n.grad.middleRows(offsets[i], ps[i]->value.rows()));
    }
  });
}

Var GatherRows(const Var &table, const std::vector<int> &ids) {
  Matrix v(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows())
      throw ShapeError("GatherRows: id out of range");
    v.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  auto pt = table.node();
  return Make(std::move(v), {pt}, [pt, ids](Node &n) {
    Matrix g = Matrix::Zero(pt->value.rows(), pt->value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
      g.row(ids[i]) += n.grad.row(static_cast<Eigen::Index>(i));
    pt->Accumulate(g);
  });
}

}  // namespace gid::ad

namespace gid::ad {

Var SegmentAttention(const Var &q, const Var &k, const Var &v,
                     const std::vector<int> &segment_lengths, double scale) {
  CheckSame(q, k, "SegmentAttention");
  if (v.rows() != q.rows()) throw ShapeError("SegmentAttention: v row count differs");
  Eigen::Index total = 0;
  for (int len : segment_lengths) total += len;
  if (total != q.rows()) throw ShapeError("SegmentAttention: segments do not cover rows");

  Matrix out(q.rows(), v.cols());
  std::vector<Matrix> probs;
  probs.reserve(segment_lengths.size());
  Eigen::Index at = 0;
  for (int len : segment_lengths) {
    Matrix s = q.value().middleRows(at, len) * k.value().middleRows(at, len).transpose() * scale;
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      double m = s.row(r).maxCoeff();
      s.row(r) = (s.row(r).array() - m).exp().matrix();
      s.row(r) /= s.row(r).sum();
    }
    out.middleRows(at, len) = s * v.value().middleRows(at, len);
    probs.push_back(std::move(s));
    at += len;
  }
  auto pq = q.node(), pk = k.node(), pv = v.node();
  return Make(std::move(out), {pq, pk, pv},
              [pq, pk, pv, probs, segment_lengths, scale](Node &n) {
                Matrix gq = Matrix::Zero(pq->value.rows(), pq->value.cols());
                Matrix gk = Matrix::Zero(pk->value.rows(), pk->value.cols());
                Matrix gv = Matrix::Zero(pv->value.rows(), pv->value.cols());
                Eigen::Index at = 0;
                for (std::size_t s = 0; s < segment_lengths.size(); ++s) {
                  const int len = segment_lengths[s];
                  const Matrix &a = probs[s];
                  auto dout = n.grad.middleRows(at, len);
                  gv.middleRows(at, len) = a.transpose() * dout;
                  Matrix da = dout * pv->value.middleRows(at, len).transpose();
                  Eigen::VectorXd dot = da.cwiseProduct(a).rowwise().sum();
                  Matrix ds = a.cwiseProduct(da - dot.replicate(1, a.cols())) * scale;
                  gq.middleRows(at, len) = ds * pk->value.middleRows(at, len);
                  gk.middleRows(at, len) = ds.transpose() * pq->value.middleRows(at, len);
                  at += len;
                }
                if (pq->requires_grad) pq->Accumulate(gq);
                if (pk->requires_grad) pk->Accumulate(gk);
                if (pv->requires_grad) pv->Accumulate(gv);
              });
}

}  // namespace gid::ad
