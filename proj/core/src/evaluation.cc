// core/src/evaluation.cc

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

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "gid/errors.h"
#include "json.hpp"

namespace gid {

using nlohmann::json;

double Percent(double fraction) {
  // nearbyint follows the default rounding mode, round-half-even.
  return std::nearbyint(fraction * 10000.0) / 100.0;
}

double Accuracy(const std::vector<int> &gold, const std::vector<int> &pred) {
  if (gold.size() != pred.size()) throw EvaluationError("gold and pred lengths differ");
  if (gold.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

double WeightedF1(const std::vector<int> &gold, const std::vector<int> &pred, int num_classes) {
  if (gold.size() != pred.size()) throw EvaluationError("gold and pred lengths differ");
  if (gold.empty()) return 0.0;
  const auto c = static_cast<std::size_t>(num_classes);
  std::vector<long> tp(c, 0), support(c, 0), predicted(c, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = static_cast<std::size_t>(gold[i]);
    const auto p = static_cast<std::size_t>(pred[i]);
    ++support[g];
    ++predicted[p];
    if (g == p) ++tp[g];
  }
  double total = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    if (support[k] == 0) continue;
    const double precision = predicted[k] ? static_cast<double>(tp[k]) / predicted[k] : 0.0;
    const double recall = static_cast<double>(tp[k]) / support[k];
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    total += f1 * static_cast<double>(support[k]);
  }
  return total / static_cast<double>(gold.size());
}

EvalReport Evaluate(const std::vector<int> &gold, const std::vector<int> &pred,
                    const LabelSpace &labels) {
  if (gold.size() != pred.size()) throw EvaluationError("gold and pred lengths differ");
  const int c = static_cast<int>(labels.size());
  EvalReport r;
  r.labels = labels.All();
  r.confusion.assign(static_cast<std::size_t>(c), std::vector<long>(static_cast<std::size_t>(c), 0));
  std::vector<int> gi, pi, go, po;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= c)
      throw EvaluationError("gold index " + std::to_string(gold[i]) + " outside the label space");
    if (pred[i] < 0 || pred[i] >= c)
      throw EvaluationError("prediction " + std::to_string(pred[i]) + " outside the label space");
    ++r.confusion[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(pred[i])];
    if (labels.IsInd(gold[i])) {
      gi.push_back(gold[i]);
      pi.push_back(pred[i]);
    } else {
      go.push_back(gold[i]);
      po.push_back(pred[i]);
    }
  }
  r.n_ind = gi.size();
  r.n_ood = go.size();
  if (!gi.empty()) r.ind_acc = Accuracy(gi, pi);
  if (!go.empty()) {
    r.ood_acc = Accuracy(go, po);
    r.ood_f1 = WeightedF1(go, po, c);
  }
  r.all_acc = Accuracy(gold, pred);
  r.all_f1 = WeightedF1(gold, pred, c);
  return r;
}

EvalReport EvaluateNamed(const std::vector<std::string> &gold, const std::vector<int> &pred,
                         const LabelSpace &labels) {
  std::vector<int> idx;
  idx.reserve(gold.size());
  for (const auto &g : gold) {
    const int i = labels.IndexOf(g);
    if (i < 0) throw EvaluationError("unknown gold label '" + g + "'");
    idx.push_back(i);
  }
  return Evaluate(idx, pred, labels);
}

std::vector<int> SolveAssignment(const std::vector<std::vector<double>> &cost) {
  const std::size_t n = cost.size();
  for (const auto &row : cost)
    if (row.size() != n) throw ShapeError("assignment cost matrix must be square");
  if (n == 0) return {};
  // Potentials formulation, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = static_cast<int>(j - 1);
  return assignment;
}

std::vector<int> HungarianAlign(const std::vector<int> &clusters, const std::vector<int> &gold,
                                int m) {
  if (clusters.size() != gold.size()) throw ShapeError("clusters and gold lengths differ");
  if (m < 1) throw ShapeError("alignment needs M >= 1");
  const auto n = static_cast<std::size_t>(m);
  std::vector<std::vector<double>> count(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i] < 0 || clusters[i] >= m || gold[i] < 0 || gold[i] >= m)
      throw ShapeError("cluster or label index outside [0, M)");
    count[static_cast<std::size_t>(clusters[i])][static_cast<std::size_t>(gold[i])] += 1.0;
  }
  for (auto &row : count)
    for (auto &x : row) x = -x;
  return SolveAssignment(count);
}

namespace {

json Opt(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

std::optional<double> OptFrom(const json &j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string Cell(const std::optional<double> &v) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << Percent(*v);
  return os.str();
}

}  // namespace

std::string EvalReport::ToJson() const {
  json j{{"method", method},       {"ind_acc", Opt(ind_acc)}, {"ood_acc", Opt(ood_acc)},
         {"ood_f1", Opt(ood_f1)},  {"all_acc", all_acc},      {"all_f1", all_f1},
         {"n_ind", n_ind},         {"n_ood", n_ood},          {"confusion", confusion},
         {"labels", labels},       {"notes", notes}};
  j["percent"] = {{"ind_acc", ind_acc ? json(Percent(*ind_acc)) : json(nullptr)},
                  {"ood_acc", ood_acc ? json(Percent(*ood_acc)) : json(nullptr)},
                  {"ood_f1", ood_f1 ? json(Percent(*ood_f1)) : json(nullptr)},
                  {"all_acc", Percent(all_acc)},
                  {"all_f1", Percent(all_f1)}};
  return j.dump(2);
}

EvalReport EvalReport::FromJson(const std::string &text) {
  try {
    json j = json::parse(text);
    EvalReport r;
    r.method = j.at("method").get<std::string>();
    r.ind_acc = OptFrom(j.at("ind_acc"));
    r.ood_acc = OptFrom(j.at("ood_acc"));
    r.ood_f1 = OptFrom(j.at("ood_f1"));
    r.all_acc = j.at("all_acc").get<double>();
    r.all_f1 = j.at("all_f1").get<double>();
    r.n_ind = j.at("n_ind").get<std::size_t>();
    r.n_ood = j.at("n_ood").get<std::size_t>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<long>>>();
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.notes = j.at("notes").get<std::string>();
    return r;
  } catch (const json::exception &e) {
    throw EvaluationError(std::string("malformed report: ") + e.what());
  }
}

std::string FormatTable(const std::vector<EvalReport> &reports) {
  std::size_t w = 6;
  for (const auto &r : reports) w = std::max(w, r.method.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w)) << "Method" << std::right;
  for (const char *h : {"IND ACC", "OOD ACC", "OOD F1", "ALL ACC", "ALL F1"})
    os << " | " << std::setw(7) << h;
  os << "\n" << std::string(w, '-');
  for (int i = 0; i < 5; ++i) os << "-+-" << std::string(7, '-');
  os << "\n";
  for (const auto &r : reports) {
    os << std::left << std::setw(static_cast<int>(w)) << r.method << std::right;
    for (const auto &v : {r.ind_acc, r.ood_acc, r.ood_f1, std::optional<double>(r.all_acc),
                          std::optional<double>(r.all_f1)})
      os << " | " << std::setw(7) << Cell(v);
    os << "\n";
  }
  return os.str();
}

EvalReport EvaluateModel(Model &model, const GidSplit &split) {
  const LabelSpace &ls = model.label_space();
  std::vector<std::string> texts;
  std::vector<int> gold;
  for (const auto &u : split.test) {
    texts.push_back(u.text);
    const int g = u.label ? ls.IndexOf(*u.label) : -1;
    if (g < 0) throw EvaluationError("test record " + u.id + " has an unknown label");
    gold.push_back(g);
  }
  std::vector<int> pred;
  for (const auto &p : model.Predict(texts)) pred.push_back(p.label);

  std::string notes;
  if (model.anonymous_ood()) {
    const int n = static_cast<int>(ls.num_ind());
    const int m = static_cast<int>(ls.num_ood());
    std::vector<int> clusters, golds;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (!ls.IsInd(gold[i]) && !ls.IsInd(pred[i])) {
        clusters.push_back(pred[i] - n);
        golds.push_back(gold[i] - n);
      }
    const std::vector<int> map = HungarianAlign(clusters, golds, m);
    for (int &p : pred)
      if (!ls.IsInd(p)) p = n + map[static_cast<std::size_t>(p - n)];
    notes = "linear head over pooled embeddings; OOD block aligned to gold labels "
            "with the Hungarian algorithm";
  }
  EvalReport r = Evaluate(gold, pred, ls);
  r.method = model.method();
  r.notes = notes;
  return r;
}

}  // namespace gid
