// core/src/optimizer.cc

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

#include "gid/optimizer.h"

#include <cmath>

#include "gid/errors.h"

namespace gid {

LinearSchedule::LinearSchedule(double peak, long warmup, long total)
    : peak_(peak), warmup_(warmup), total_(total) {
  if (peak < 0.0 || warmup < 0 || total < 0) throw ConfigError("schedule values must be >= 0");
}

double LinearSchedule::LearningRate(long step) const {
  if (step < 0 || step >= total_) return 0.0;
  if (step < warmup_) return peak_ * static_cast<double>(step) / static_cast<double>(warmup_);
  return peak_ * static_cast<double>(total_ - step) / static_cast<double>(total_ - warmup_);
}

AdamW::AdamW(std::vector<ad::Parameter *> params, AdamWOptions options)
    : params_(std::move(params)), options_(options) {
  for (auto *p : params_) {
    m_.push_back(ad::Matrix::Zero(p->value().rows(), p->value().cols()));
    v_.push_back(ad::Matrix::Zero(p->value().rows(), p->value().cols()));
  }
}

void AdamW::ZeroGrad() {
  for (auto *p : params_) p->ZeroGrad();
}

void AdamW::Step(double lr) {
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ad::Parameter &p = *params_[i];
    if (!p.trainable()) continue;
    const ad::Matrix &g = p.grad();
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g.cwiseProduct(g);
    ad::Matrix &w = p.mutable_value();
    w *= 1.0 - lr * options_.weight_decay;
    w.array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + options_.eps);
  }
}

}  // namespace gid
