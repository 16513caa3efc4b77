// core/include/gid/optimizer.h

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

#ifndef GID_OPTIMIZER_H_
#define GID_OPTIMIZER_H_

#include <vector>

#include "gid/autodiff.h"

namespace gid {

/// Linear ramp 0 -> peak over `warmup` steps, then linear decay to 0 at
/// `total`. Step s is the 0-based index of the update being taken.
class LinearSchedule {
 public:
  LinearSchedule(double peak, long warmup, long total);
  double LearningRate(long step) const;
  long total() const { return total_; }

 private:
  double peak_;
  long warmup_;
  long total_;
};

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

/// Adam with decoupled weight decay. Frozen parameters are skipped.
class AdamW {
 public:
  AdamW(std::vector<ad::Parameter *> params, AdamWOptions options);

  void ZeroGrad();
  void Step(double lr);
  long steps() const { return t_; }

 private:
  std::vector<ad::Parameter *> params_;
  AdamWOptions options_;
  std::vector<ad::Matrix> m_;
  std::vector<ad::Matrix> v_;
  long t_ = 0;
};

}  // namespace gid

#endif  // GID_OPTIMIZER_H_
