// core/src/baselines.cc

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

#include "gid/baselines.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "checkpoint_io.h"
#include "gid/errors.h"
#include "gid/losses.h"
#include "gid/util.h"
#include "training_loop.h"

namespace gid {

using io::json;

KmeansState KmeansCluster(const ad::Matrix &points, int m, std::uint64_t seed, int max_iter) {
  const Eigen::Index n = points.rows();
  if (m < 1) throw ConfigError("kmeans needs M >= 1");
  if (n < m)
    throw ConfigError("kmeans needs at least M points (n=" + std::to_string(n) +
                      ", M=" + std::to_string(m) + ")");
  if (max_iter < 1) throw ConfigError("kmeans max_iter must be >= 1");

  // M distinct indices by a partial Fisher-Yates shuffle.
  Rng rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  KmeansState s;
  s.centroids.resize(m, points.cols());
  for (int k = 0; k < m; ++k) {
    const std::size_t j = static_cast<std::size_t>(k) + rng.Index(order.size() - static_cast<std::size_t>(k));
    std::swap(order[static_cast<std::size_t>(k)], order[j]);
    s.centroids.row(k) = points.row(order[static_cast<std::size_t>(k)]);
  }

  s.assignment.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      const double d = (s.centroids.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
      inertia += d;
      auto &a = s.assignment[static_cast<std::size_t>(i)];
      if (a != static_cast<int>(best)) {
        a = static_cast<int>(best);
        changed = true;
      }
    }
    s.inertia.push_back(inertia);
    s.iterations = iter + 1;
    if (!changed && iter > 0) break;
    ad::Matrix sum = ad::Matrix::Zero(m, points.cols());
    std::vector<long> count(static_cast<std::size_t>(m), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = s.assignment[static_cast<std::size_t>(i)];
      sum.row(a) += points.row(i);
      ++count[static_cast<std::size_t>(a)];
    }
    for (int k = 0; k < m; ++k)
      if (count[static_cast<std::size_t>(k)] > 0)
        s.centroids.row(k) = sum.row(k) / static_cast<double>(count[static_cast<std::size_t>(k)]);
  }
  return s;
}

LinearModel::LinearModel(LabelSpace labels, std::unique_ptr<Encoder> encoder, std::uint64_t seed)
    : labels_(std::move(labels)), encoder_(std::move(encoder)) {
  const int d = encoder_->dim();
  const auto c = static_cast<Eigen::Index>(labels_.size());
  Rng rng(MixSeed(seed, Fnv1a64("linear_head")));
  ad::Matrix w(d, c);
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index k = 0; k < w.cols(); ++k) w(r, k) = rng.Normal() * sd;
  weight_ = ad::Parameter("linear.weight", std::move(w));
  bias_ = ad::Parameter("linear.bias", ad::Matrix::Zero(1, c));
}

ad::Var LinearModel::Logits(const std::vector<std::string> &templated, std::uint64_t view_seed,
                            bool dropout_active) {
  ForwardResult fr = encoder_->Forward(templated, view_seed, dropout_active);
  return ad::AddRow(ad::MatMul(fr.pooled, ad::Leaf(weight_)), ad::Leaf(bias_));
}

std::vector<Prediction> LinearModel::Predict(const std::vector<std::string> &texts,
                                             std::size_t batch_size) {
  std::vector<Prediction> out;
  out.reserve(texts.size());
  for (std::size_t at = 0; at < texts.size(); at += batch_size) {
    std::vector<std::string> batch;
    for (std::size_t i = at; i < std::min(texts.size(), at + batch_size); ++i)
      batch.push_back(encoder_->Template(texts[i]));
    const ad::Matrix p = ad::SoftmaxRows(Logits(batch, 0, false)).value();
    for (Eigen::Index b = 0; b < p.rows(); ++b) {
      Prediction pr;
      pr.distribution = p.row(b).transpose();
      Eigen::Index arg;
      pr.distribution.maxCoeff(&arg);
      pr.label = static_cast<int>(arg);
      out.push_back(std::move(pr));
    }
  }
  return out;
}

std::vector<ad::Parameter *> LinearModel::parameters() {
  std::vector<ad::Parameter *> ps = encoder_->parameters();
  ps.push_back(&weight_);
  ps.push_back(&bias_);
  return ps;
}

void LinearModel::Save(const std::string &path) const {
  auto *self = const_cast<LinearModel *>(this);
  json j;
  j["format"] = "gid-checkpoint/1";
  j["method"] = method();
  j["encoder_config"] = io::EncoderConfigToJson(encoder_->config());
  j["label_space"] = io::LabelSpaceToJson(labels_);
  j["head"] = "linear";
  j["params"] = io::ParamsToJson(self->parameters());
  io::WriteJsonFile(path, j);
}

std::unique_ptr<LinearModel> LinearModel::Load(const std::string &path) {
  json j = io::ReadJsonFile(path);
  try {
    if (j.at("format") != "gid-checkpoint/1" || j.at("method") != "kmeans")
      throw CheckpointError(path + " is not a kmeans checkpoint");
    std::unique_ptr<LinearModel> m(new LinearModel());
    m->labels_ = io::LabelSpaceFromJson(j.at("label_space"));
    m->encoder_ = MakeEncoder(io::EncoderConfigFromJson(j.at("encoder_config")));
    const auto c = static_cast<Eigen::Index>(m->labels_.size());
    m->weight_ = ad::Parameter("linear.weight", ad::Matrix::Zero(m->encoder_->dim(), c));
    m->bias_ = ad::Parameter("linear.bias", ad::Matrix::Zero(1, c));
    io::ParamsFromJson(j.at("params"), m->parameters());
    m->encoder_->SetFreeze(m->encoder_->config().freeze);
    return m;
  } catch (const json::exception &e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

std::unique_ptr<LinearModel> KmeansPipeline(const GidSplit &split, Encoder &pretrained,
                                            const RunConfig &config, RunManifest &manifest) {
  const LabelSpace &ls = split.label_space;
  const int n_ind = static_cast<int>(ls.num_ind());
  const int m = static_cast<int>(ls.num_ood());

  // Pseudo labels keyed by record id, offset into the OOD block.
  GidSplit train = split;
  if (split.ood_train.empty()) {
    manifest.warnings.push_back("ood_train is empty; kmeans pipeline reduces to supervised CE");
  } else {
    std::vector<std::string> texts;
    for (const auto &u : split.ood_train) texts.push_back(pretrained.Template(u.text));
    ad::Matrix emb(static_cast<Eigen::Index>(texts.size()), pretrained.dim());
    const std::size_t bs = static_cast<std::size_t>(config.train.batch_size);
    for (std::size_t at = 0; at < texts.size(); at += bs) {
      std::vector<std::string> chunk(texts.begin() + static_cast<long>(at),
                                     texts.begin() + static_cast<long>(std::min(texts.size(), at + bs)));
      const auto outs = pretrained.Encode(chunk, 0, false);
      for (std::size_t i = 0; i < outs.size(); ++i)
        emb.row(static_cast<Eigen::Index>(at + i)) = outs[i].pooled.transpose();
    }
    const KmeansState km =
        KmeansCluster(emb, m, config.baseline.kmeans_seed, config.baseline.kmeans_max_iter);
    // Pseudo-labelled OOD records join the labelled pool.
    for (std::size_t i = 0; i < train.ood_train.size(); ++i)
      train.ind_train.push_back(
          {train.ood_train[i].id, train.ood_train[i].text,
           ls.NameOf(n_ind + km.assignment[i]), std::nullopt, std::nullopt});
    train.ood_train.clear();
  }

  auto model = std::make_unique<LinearModel>(ls, pretrained.Clone(), config.heads.seed);
  model->encoder().SetFreeze(config.encoder.freeze);
  const std::uint64_t view_base = MixSeed(config.train.seed, Fnv1a64("baseline.view"));
  std::vector<ad::Matrix> best;
  auto snapshot = [&] {
    best.clear();
    for (auto *p : model->parameters()) best.push_back(p->value());
  };
  snapshot();

  detail::StageHooks hooks;
  hooks.step = [&](const Batch &batch, long step) {
    std::vector<std::string> templated;
    for (const auto &e : batch) templated.push_back(model->encoder().Template(e.text));
    ad::Var logits =
        model->Logits(templated, MixSeed(view_base, static_cast<std::uint64_t>(step)), true);
    return detail::StepLoss{
        CrossEntropy(ad::SoftmaxRows(logits), detail::Labels(batch), config.loss.eps)};
  };
  hooks.end_of_epoch = [&] {
    detail::EpochMetrics em;
    em.dev_ind_acc = DevIndAccuracy(*model, split, false);
    em.monitor = em.dev_ind_acc;
    return em;
  };
  hooks.snapshot = snapshot;
  hooks.restore = [&] {
    auto ps = model->parameters();
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->mutable_value() = best[i];
  };
  manifest.discover = detail::RunStage("baseline", train, Partition::kIndTrain, config,
                                       model->parameters(), hooks, manifest);
  return model;
}

}  // namespace gid
