// core/include/gid/config.h

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

#ifndef GID_CONFIG_H_
#define GID_CONFIG_H_

#include <string>
#include <vector>

#include "gid/encoder.h"
#include "gid/heads.h"
#include "gid/losses.h"
#include "gid/meta_knowledge.h"

namespace gid {

struct TrainConfig {
  int batch_size = 64;
  int max_epochs = 25;
  int patience = 10;
  double learning_rate = 5e-5;
  double weight_decay = 0.01;
  long warmup_steps = 500;
  std::uint64_t seed = 42;
  bool pretrain = true;
  bool discover = true;
};

struct LossConfig {
  LossWeights weights;
  double tau = 0.07;
  double eps = kProbEps;
  bool nt_xent_sum = false;
  CpTargets cp_targets = CpTargets::kOther;
};

struct MetaConfig {
  MetaKind kind = MetaKind::kName;
  int k = 1;
};

struct BaselineConfig {
  int kmeans_max_iter = 100;
  std::uint64_t kmeans_seed = 7;
};

/// Everything a run depends on besides its inputs. Serialises to a JSON
/// object with sections train, loss, encoder, heads, meta and baseline.
struct RunConfig {
  std::string method = "cpp";  // "cpp" or "kmeans"
  TrainConfig train;
  LossConfig loss;
  EncoderConfig encoder;
  HeadsConfig heads;
  MetaConfig meta;
  BaselineConfig baseline;

  std::string ToJson() const;
  static RunConfig FromJson(const std::string &text);
  static RunConfig FromFile(const std::string &path);
  /// "section.key=value"; ConfigError for unknown keys or ill-typed values.
  void ApplyOverride(const std::string &assignment);
  void Validate() const;
  std::string Hash() const;
};

}  // namespace gid

#endif  // GID_CONFIG_H_
