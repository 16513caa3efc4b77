// core/include/gid/baselines.h

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

#ifndef GID_BASELINES_H_
#define GID_BASELINES_H_

#include <memory>
#include <string>
#include <vector>

#include "gid/config.h"
#include "gid/heads.h"
#include "gid/trainer.h"

namespace gid {

struct KmeansState {
  ad::Matrix centroids;  // M x d
  std::vector<int> assignment;
  int iterations = 0;
  /// Inertia after every assignment step.
  std::vector<double> inertia;
};

/// Lloyd iterations from M distinct sampled points. ConfigError when n < M.
/// An emptied cluster keeps its previous centroid.
KmeansState KmeansCluster(const ad::Matrix &points, int m, std::uint64_t seed, int max_iter);

/// Encoder plus one linear C-way head over the pooled embedding. The OOD
/// block holds cluster ids, so evaluation aligns it.
class LinearModel : public Model {
 public:
  LinearModel(LabelSpace labels, std::unique_ptr<Encoder> encoder, std::uint64_t seed);

  std::string method() const override { return "kmeans"; }
  const LabelSpace &label_space() const override { return labels_; }
  bool anonymous_ood() const override { return true; }

  /// Templated inputs; B x C logits.
  ad::Var Logits(const std::vector<std::string> &templated, std::uint64_t view_seed,
                 bool dropout_active);
  std::vector<Prediction> Predict(const std::vector<std::string> &texts,
                                  std::size_t batch_size = 64) override;
  std::vector<ad::Parameter *> parameters();
  Encoder &encoder() { return *encoder_; }

  void Save(const std::string &path) const override;
  static std::unique_ptr<LinearModel> Load(const std::string &path);

 private:
  LinearModel() = default;

  LabelSpace labels_;
  std::unique_ptr<Encoder> encoder_;
  ad::Parameter weight_;
  ad::Parameter bias_;
};

/// Embeds ood_train with the pretrained encoder (dropout off), clusters it
/// into M groups, then trains a LinearModel with CE on IND gold plus OOD
/// cluster labels. One clustering pass.
std::unique_ptr<LinearModel> KmeansPipeline(const GidSplit &split, Encoder &pretrained,
                                            const RunConfig &config, RunManifest &manifest);

}  // namespace gid

#endif  // GID_BASELINES_H_
