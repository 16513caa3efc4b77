// core/src/trainer.cc

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

#include "gid/trainer.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "checkpoint_io.h"
#include "gid/baselines.h"
#include "gid/errors.h"
#include "gid/losses.h"
#include "gid/optimizer.h"
#include "gid/util.h"
#include "training_loop.h"

namespace gid {

using io::json;

namespace detail {

std::vector<std::string> Texts(const Batch &batch) {
  std::vector<std::string> out;
  out.reserve(batch.size());
  for (const auto &e : batch) out.push_back(e.text);
  return out;
}

std::vector<int> Labels(const Batch &batch) {
  std::vector<int> out;
  out.reserve(batch.size());
  for (const auto &e : batch) out.push_back(e.label);
  return out;
}

StageSummary RunStage(const std::string &stage, const GidSplit &split, Partition partition,
                      const RunConfig &config, const std::vector<ad::Parameter *> &params,
                      const StageHooks &hooks, RunManifest &manifest) {
  const auto &tc = config.train;
  StageSummary summary;
  if (tc.max_epochs == 0) return summary;
  const auto bs = static_cast<std::size_t>(tc.batch_size);
  const long per_epoch = static_cast<long>(BatchIterator(split, partition, bs, {}).num_batches());
  LinearSchedule schedule(tc.learning_rate, tc.warmup_steps, per_epoch * tc.max_epochs);
  AdamW opt(params, AdamWOptions{.weight_decay = tc.weight_decay});
  const std::uint64_t stage_seed = MixSeed(tc.seed, Fnv1a64(stage));

  double best = -std::numeric_limits<double>::infinity();
  long step = 0;
  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    BatchIterator it(split, partition, bs, MixSeed(stage_seed, static_cast<std::uint64_t>(epoch)));
    EpochLog log;
    log.stage = stage;
    log.epoch = epoch;
    long n = 0;
    while (auto batch = it.Next()) {
      const double lr = schedule.LearningRate(step);
      opt.ZeroGrad();
      detail::StepLoss l = hooks.step(*batch, step);
      const double value = l.total.scalar();
      if (!std::isfinite(value)) {
        std::ostringstream os;
        os << stage << " loss is not finite at epoch " << epoch << " step " << step
           << " (dc=" << l.dc << " pc=" << l.pc << " cp=" << l.cp << " cl=" << l.cl << ")";
        manifest.warnings.push_back(os.str());
        throw TrainingError(os.str() + "\nmanifest: " + manifest.ToJson());
      }
      if (l.total.requires_grad()) {
        ad::Backward(l.total);
        opt.Step(lr);
      }
      log.loss += value;
      log.dc += l.dc;
      log.pc += l.pc;
      log.cp += l.cp;
      log.cl += l.cl;
      log.lr_end = lr;
      ++n;
      ++step;
    }
    for (double *v : {&log.loss, &log.dc, &log.pc, &log.cp, &log.cl}) *v /= static_cast<double>(n);
    const detail::EpochMetrics m = hooks.end_of_epoch();
    log.dev_ind_acc = m.dev_ind_acc;
    log.stability = m.stability;
    log.monitor = m.monitor;
    manifest.epochs.push_back(log);
    if (manifest.on_epoch) manifest.on_epoch(log);
    summary.stop_epoch = epoch;
    if (m.monitor > best) {
      best = m.monitor;
      summary.best_epoch = epoch;
      summary.best_monitor = m.monitor;
      hooks.snapshot();
    } else if (epoch - summary.best_epoch >= tc.patience) {
      break;
    }
  }
  summary.steps = step;
  hooks.restore();
  return summary;
}

}  // namespace detail

namespace {

json SummaryJson(const std::optional<StageSummary> &s) {
  if (!s) return nullptr;
  return json{{"best_epoch", s->best_epoch},
              {"stop_epoch", s->stop_epoch},
              {"best_monitor", s->best_monitor},
              {"steps", s->steps}};
}

int ArgMax(const Eigen::VectorXd &v, Eigen::Index n) {
  Eigen::Index arg;
  v.head(n).maxCoeff(&arg);
  return static_cast<int>(arg);
}

std::vector<std::string> Templated(Encoder &encoder, const Batch &batch) {
  std::vector<std::string> out;
  out.reserve(batch.size());
  for (const auto &e : batch) out.push_back(encoder.Template(e.text));
  return out;
}

}  // namespace

std::string RunManifest::ToJson(bool with_wall_clock) const {
  json epochs_json = json::array();
  for (const auto &e : epochs)
    epochs_json.push_back({{"stage", e.stage},
                           {"epoch", e.epoch},
                           {"loss", e.loss},
                           {"dc", e.dc},
                           {"pc", e.pc},
                           {"cp", e.cp},
                           {"cl", e.cl},
                           {"dev_ind_acc", e.dev_ind_acc},
                           {"stability", e.stability ? json(*e.stability) : json(nullptr)},
                           {"monitor", e.monitor},
                           {"lr_end", e.lr_end}});
  json config = config_json.empty() ? json(nullptr) : json::parse(config_json);
  json j{{"method", method},
         {"config", config},
         {"config_hash", config_hash},
         {"split_hash", split_hash},
         {"meta_hash", meta_hash},
         {"overrides", overrides},
         {"epochs", epochs_json},
         {"pretrain", SummaryJson(pretrain)},
         {"discover", SummaryJson(discover)},
         {"warnings", warnings}};
  if (with_wall_clock) j["wall_seconds"] = wall_seconds;
  return j.dump(2);
}

void RunManifest::Save(const std::string &path) const {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write manifest " + path);
  out << ToJson() << "\n";
}

std::unique_ptr<CppModel> BuildCppModel(const LabelSpace &labels, const MetaMap &meta,
                                        const RunConfig &config) {
  config.Validate();
  auto encoder = MakeEncoder(config.encoder);
  encoder->SetFreeze(config.encoder.freeze);
  return std::make_unique<CppModel>(labels, std::move(encoder), meta, config.heads,
                                    config.Hash());
}

std::vector<int> PredictInd(Model &model, const std::vector<std::string> &texts) {
  const auto n = static_cast<Eigen::Index>(model.label_space().num_ind());
  std::vector<int> out;
  for (const auto &p : model.Predict(texts)) out.push_back(ArgMax(p.distribution, n));
  return out;
}

double DevIndAccuracy(Model &model, const GidSplit &split, bool ind_only) {
  if (split.dev.empty()) return 0.0;
  const LabelSpace &ls = model.label_space();
  std::vector<std::string> texts;
  std::vector<int> gold;
  for (const auto &u : split.dev) {
    texts.push_back(u.text);
    gold.push_back(ls.IndexOf(*u.label));
  }
  std::vector<int> pred;
  if (ind_only) {
    pred = PredictInd(model, texts);
  } else {
    for (const auto &p : model.Predict(texts)) pred.push_back(p.label);
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

StageSummary Pretrain(CppModel &model, const GidSplit &split, const RunConfig &config,
                      RunManifest &manifest) {
  if (split.ind_train.empty()) throw IterationError("pretrain needs a non-empty ind_train");
  const auto n = static_cast<Eigen::Index>(split.label_space.num_ind());
  const double eps = config.loss.eps;
  const std::uint64_t view_base = MixSeed(config.train.seed, Fnv1a64("pretrain.view"));
  CppModel::State best = model.Snapshot();

  detail::StageHooks hooks;
  hooks.step = [&](const Batch &batch, long step) {
    model.Refresh(step);
    HeadOutputs h = model.Forward(Templated(model.encoder(), batch),
                                  MixSeed(view_base, static_cast<std::uint64_t>(step)), true);
    const std::vector<int> gold = detail::Labels(batch);
    ad::Var l1 = CrossEntropy(ad::SoftmaxRows(ad::SliceCols(h.logits1, 0, n)), gold, eps);
    ad::Var l2 = CrossEntropy(ad::SoftmaxRows(ad::SliceCols(h.logits2, 0, n)), gold, eps);
    return detail::StepLoss{ad::Add(l1, l2)};
  };
  hooks.end_of_epoch = [&] {
    detail::EpochMetrics m;
    m.dev_ind_acc = DevIndAccuracy(model, split, true);
    m.monitor = m.dev_ind_acc;
    return m;
  };
  hooks.snapshot = [&] { best = model.Snapshot(); };
  hooks.restore = [&] { model.Restore(best); };

  StageSummary s = detail::RunStage("pretrain", split, Partition::kIndTrain, config,
                                    model.parameters(), hooks, manifest);
  manifest.pretrain = s;
  return s;
}

StageSummary Discover(CppModel &model, const GidSplit &split, const RunConfig &config,
                      RunManifest &manifest) {
  const auto &lc = config.loss;
  ValidateWeights(lc.weights);
  Partition partition = Partition::kMixed;
  if (split.ood_train.empty()) {
    manifest.warnings.push_back("ood_train is empty; discover reduces to supervised training");
    partition = Partition::kIndTrain;
  }
  const std::uint64_t view_base = MixSeed(config.train.seed, Fnv1a64("discover.view"));
  std::vector<std::string> ood_texts;
  for (const auto &u : split.ood_train) ood_texts.push_back(u.text);
  auto ood_labels = [&] {
    std::vector<int> out;
    if (ood_texts.empty()) return out;
    for (const auto &p : model.Predict(ood_texts)) out.push_back(p.label);
    return out;
  };
  std::vector<int> previous = ood_labels();
  CppModel::State best = model.Snapshot();

  detail::StageHooks hooks;
  hooks.step = [&](const Batch &batch, long step) {
    model.Refresh(step);
    const auto templated = Templated(model.encoder(), batch);
    const std::uint64_t s = MixSeed(view_base, static_cast<std::uint64_t>(step));
    HeadOutputs v1 = model.Forward(templated, MixSeed(s, 1), true);
    HeadOutputs v2 = model.Forward(templated, MixSeed(s, 2), true);
    std::vector<Origin> origin;
    for (const auto &e : batch) origin.push_back(e.origin);
    const std::vector<int> gold = detail::Labels(batch);
    const std::vector<ViewDistributions> views{{v1.p1, v1.p2}, {v2.p1, v2.p2}};

    LossParts parts;
    detail::StepLoss out;
    if (lc.weights.dc > 0.0) {
      parts.dc = DataConsistency(v1.pooled, v2.pooled, lc.eps);
      out.dc = parts.dc.scalar();
    }
    if (lc.weights.pc > 0.0) {
      parts.pc = PredictionConsistency(views, lc.eps);
      out.pc = parts.pc.scalar();
    }
    if (lc.weights.cp > 0.0) {
      parts.cp = CrossPrediction(views, origin, gold, lc.eps, lc.cp_targets);
      out.cp = parts.cp.scalar();
    }
    if (lc.weights.cl > 0.0) {
      ad::Var z = ad::VStack({model.Project(v1.pooled), model.Project(v2.pooled)});
      parts.cl = NtXent(z, ViewPairMap(static_cast<int>(batch.size())), lc.tau, lc.nt_xent_sum);
      out.cl = parts.cl.scalar();
    }
    out.total = TotalLoss(parts, lc.weights);
    return out;
  };
  hooks.end_of_epoch = [&] {
    detail::EpochMetrics m;
    m.dev_ind_acc = DevIndAccuracy(model, split, false);
    std::vector<int> now = ood_labels();
    if (!now.empty()) {
      std::size_t same = 0;
      for (std::size_t i = 0; i < now.size(); ++i) same += now[i] == previous[i];
      m.stability = static_cast<double>(same) / static_cast<double>(now.size());
      m.monitor = 0.5 * m.dev_ind_acc + 0.5 * *m.stability;
    } else {
      m.monitor = m.dev_ind_acc;
    }
    previous = std::move(now);
    return m;
  };
  hooks.snapshot = [&] { best = model.Snapshot(); };
  hooks.restore = [&] { model.Restore(best); };

  StageSummary s =
      detail::RunStage("discover", split, partition, config, model.parameters(), hooks, manifest);
  manifest.discover = s;
  return s;
}

RunResult Run(const GidSplit &split, const MetaMap &meta, const RunConfig &config,
              const std::vector<std::string> &overrides) {
  const auto start = std::chrono::steady_clock::now();
  config.Validate();
  RunResult result;
  RunManifest &m = result.manifest;
  m.method = config.method;
  m.config_json = config.ToJson();
  m.config_hash = config.Hash();
  m.split_hash = SplitHash(split);
  m.overrides = overrides;

  MetaMap used;
  for (const auto &label : split.label_space.All()) {
    auto it = meta.find(label);
    if (it == meta.end()) throw CoverageError("no meta-information for category '" + label + "'");
    used[label] = it->second;
  }
  m.meta_hash = MetaMapHash(used);

  auto model = BuildCppModel(split.label_space, used, config);
  if (config.train.pretrain) Pretrain(*model, split, config, m);
  if (config.method == "cpp") {
    if (config.train.discover) Discover(*model, split, config, m);
    result.model = std::move(model);
  } else {
    result.model = KmeansPipeline(split, model->encoder(), config, m);
  }
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::unique_ptr<Model> LoadModel(const std::string &path) {
  json j = io::ReadJsonFile(path);
  const std::string method = j.value("method", "");
  if (method == "cpp") return CppModel::Load(path);
  if (method == "kmeans") return LinearModel::Load(path);
  throw CheckpointError(path + ": unknown method '" + method + "'");
}

}  // namespace gid
