// core/src/training_loop.h

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

#ifndef GID_SRC_TRAINING_LOOP_H_
#define GID_SRC_TRAINING_LOOP_H_

// Epoch loop shared by the trainer stages and the kmeans baseline.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gid/config.h"
#include "gid/dataset.h"
#include "gid/trainer.h"

namespace gid::detail {

struct StepLoss {
  ad::Var total;
  double dc = 0.0, pc = 0.0, cp = 0.0, cl = 0.0;
};

struct EpochMetrics {
  double dev_ind_acc = 0.0;
  std::optional<double> stability;
  double monitor = 0.0;
};

struct StageHooks {
  std::function<StepLoss(const Batch &, long step)> step;
  std::function<EpochMetrics()> end_of_epoch;
  std::function<void()> snapshot;
  std::function<void()> restore;
};

StageSummary RunStage(const std::string &stage, const GidSplit &split, Partition partition,
                      const RunConfig &config, const std::vector<ad::Parameter *> &params,
                      const StageHooks &hooks, RunManifest &manifest);

std::vector<std::string> Texts(const Batch &batch);
std::vector<int> Labels(const Batch &batch);

}  // namespace gid::detail

#endif  // GID_SRC_TRAINING_LOOP_H_
