// core/include/gid/trainer.h

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

#ifndef GID_TRAINER_H_
#define GID_TRAINER_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gid/config.h"
#include "gid/dataset.h"
#include "gid/heads.h"

namespace gid {

struct EpochLog {
  std::string stage;  // "pretrain", "discover" or "baseline"
  int epoch = 0;      // 1-based
  double loss = 0.0;
  double dc = 0.0, pc = 0.0, cp = 0.0, cl = 0.0;
  double dev_ind_acc = 0.0;
  std::optional<double> stability;
  double monitor = 0.0;
  double lr_end = 0.0;
};

struct StageSummary {
  int best_epoch = 0;
  int stop_epoch = 0;
  double best_monitor = 0.0;
  long steps = 0;
};

struct RunManifest {
  std::string method;
  std::string config_json;
  std::string config_hash;
  std::string split_hash;
  std::string meta_hash;
  std::vector<std::string> overrides;
  std::vector<EpochLog> epochs;
  std::optional<StageSummary> pretrain;
  std::optional<StageSummary> discover;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  /// Called after each epoch is logged. Not serialized.
  std::function<void(const EpochLog &)> on_epoch;

  /// `with_wall_clock` false gives the run's identity: everything that must
  /// match between two runs with identical inputs.
  std::string ToJson(bool with_wall_clock = true) const;
  void Save(const std::string &path) const;
};

/// Fresh model over the split's label space, with the configured encoder.
std::unique_ptr<CppModel> BuildCppModel(const LabelSpace &labels, const MetaMap &meta,
                                        const RunConfig &config);

/// Supervised stage on ind_train: CE of both heads over the IND columns.
/// Keeps the best dev epoch; early stops after `patience` stale epochs.
StageSummary Pretrain(CppModel &model, const GidSplit &split, const RunConfig &config,
                      RunManifest &manifest);

/// Joint stage over mixed batches with the full loss stack. Never sees OOD
/// gold labels: the split carries none and no sidecar is accepted.
StageSummary Discover(CppModel &model, const GidSplit &split, const RunConfig &config,
                      RunManifest &manifest);

/// Label indices predicted by argmax over the IND block only.
std::vector<int> PredictInd(Model &model, const std::vector<std::string> &texts);

/// Dev IND accuracy with predictions over the full label space, or the IND
/// block alone when `ind_only` is set.
double DevIndAccuracy(Model &model, const GidSplit &split, bool ind_only);

struct RunResult {
  std::unique_ptr<Model> model;
  RunManifest manifest;
};

/// Pretrain + discover (method cpp) or the kmeans pipeline, per config.
RunResult Run(const GidSplit &split, const MetaMap &meta, const RunConfig &config,
              const std::vector<std::string> &overrides = {});

/// Dispatches on the checkpoint's method field.
std::unique_ptr<Model> LoadModel(const std::string &path);

}  // namespace gid

#endif  // GID_TRAINER_H_
