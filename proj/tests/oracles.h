// tests/oracles.h

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

// Brute-force reference implementations. Plain loops over std::vector, no
// library code, so a shared bug cannot hide in both sides of a comparison.
#ifndef GID_TESTS_ORACLES_H_
#define GID_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline Vec ClampRenorm(Vec p, double eps = 1e-8) {
  double s = 0;
  for (double &x : p) {
    if (x < eps) x = eps;
    s += x;
  }
  for (double &x : p) x /= s;
  return p;
}

inline double Kl(const Vec &p, const Vec &q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::log(p[i] / q[i]);
  return s;
}

inline double SymKl(const Vec &p0, const Vec &q0, double eps = 1e-8) {
  const Vec p = ClampRenorm(p0, eps), q = ClampRenorm(q0, eps);
  return 0.5 * (Kl(p, q) + Kl(q, p));
}

inline Vec Softmax(const Vec &x) {
  double m = *std::max_element(x.begin(), x.end());
  Vec e(x.size());
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += e[i] = std::exp(x[i] - m);
  for (double &v : e) v /= s;
  return e;
}

inline double DataConsistency(const Mat &h1, const Mat &h2) {
  double s = 0;
  for (std::size_t b = 0; b < h1.size(); ++b) s += SymKl(Softmax(h1[b]), Softmax(h2[b]));
  return s / h1.size();
}

inline double PredictionConsistencyView(const Mat &p1, const Mat &p2) {
  double s = 0;
  for (std::size_t b = 0; b < p1.size(); ++b) s += SymKl(p1[b], p2[b]);
  return s / p1.size();
}

inline int Argmax(const Vec &v) {
  int a = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[a]) a = static_cast<int>(i);
  return a;
}

inline double Ce(const Mat &p, const std::vector<int> &t) {
  double s = 0;
  for (std::size_t b = 0; b < p.size(); ++b) s -= std::log(ClampRenorm(p[b])[t[b]]);
  return s / p.size();
}

// is_ind[b] true -> gold[b] is the target for both heads. By default each
// head is scored against the other head's argmax; `own` swaps that.
inline double CrossPredictionView(const Mat &p1, const Mat &p2, const std::vector<bool> &is_ind,
                                  const std::vector<int> &gold, bool own = false) {
  std::vector<int> from_p2(p1.size()), from_p1(p1.size());
  for (std::size_t b = 0; b < p1.size(); ++b) {
    from_p2[b] = is_ind[b] ? gold[b] : Argmax(p2[b]);
    from_p1[b] = is_ind[b] ? gold[b] : Argmax(p1[b]);
  }
  return own ? 0.5 * (Ce(p1, from_p1) + Ce(p2, from_p2))
             : 0.5 * (Ce(p1, from_p2) + Ce(p2, from_p1));
}

inline double Cos(const Vec &a, const Vec &b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

// z holds 2B rows; row i's positive is (i + B) mod 2B.
inline double NtXent(const Mat &z, double tau, bool sum = false) {
  const std::size_t n = z.size(), b = n / 2;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pos = (i + b) % n;
    double denom = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) denom += std::exp(Cos(z[i], z[k]) / tau);
    total += -std::log(std::exp(Cos(z[i], z[pos]) / tau) / denom);
  }
  return sum ? total : total / n;
}

inline double Accuracy(const std::vector<int> &g, const std::vector<int> &p) {
  int hit = 0;
  for (std::size_t i = 0; i < g.size(); ++i) hit += g[i] == p[i];
  return static_cast<double>(hit) / g.size();
}

// sklearn-style weighted F1 computed from per-class counts found by scanning.
inline double WeightedF1(const std::vector<int> &g, const std::vector<int> &p, int c) {
  double total = 0;
  for (int k = 0; k < c; ++k) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p[i] == k && g[i] == k) ++tp;
      if (p[i] == k && g[i] != k) ++fp;
      if (p[i] != k && g[i] == k) ++fn;
    }
    const int support = tp + fn;
    if (support == 0) continue;
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    total += f1 * support;
  }
  return total / g.size();
}

// Best matched count over all bijections, by enumeration.
inline long BestMatch(const std::vector<int> &clusters, const std::vector<int> &gold, int m) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  long best = -1;
  do {
    long hit = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) hit += perm[clusters[i]] == gold[i];
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Vec RandomDistribution(std::mt19937_64 &g, int n, bool peaky = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(n);
  double s = 0;
  for (double &x : v) {
    x = u(g);
    if (peaky) x = std::pow(x, 6.0);
    s += x;
  }
  for (double &x : v) x /= s;
  return v;
}

inline Mat ToMat(const Eigen::MatrixXd &m) {
  Mat out(m.rows(), Vec(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

inline Eigen::MatrixXd FromMat(const Mat &m) {
  Eigen::MatrixXd out(m.size(), m.empty() ? 0 : m[0].size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[r].size(); ++c) out(r, c) = m[r][c];
  return out;
}

/// Central-difference gradient of f at x (entrywise).
inline Eigen::MatrixXd NumericGrad(const std::function<double(const Eigen::MatrixXd &)> &f,
                                   Eigen::MatrixXd x, double h = 1e-6) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    g(i) = (up - down) / (2 * h);
  }
  return g;
}

/// max |a-b| / max(1e-6, max |b|); scaled so near-zero gradients do not blow up.
inline double RelError(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  const double scale = std::max(1e-6, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace oracle

#endif  // GID_TESTS_ORACLES_H_
