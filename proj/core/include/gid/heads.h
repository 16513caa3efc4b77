// core/include/gid/heads.h

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

#ifndef GID_HEADS_H_
#define GID_HEADS_H_

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gid/autodiff.h"
#include "gid/dataset.h"
#include "gid/encoder.h"
#include "gid/meta_knowledge.h"

namespace gid {

/// C x d matrix of category prototypes; row order follows `categories`.
struct PrototypeBank {
  ad::Matrix matrix;
  std::vector<std::string> categories;
  MetaMap source_meta;
  int refresh_interval = 1;
};

/// Embedding of one meta record: each item is templated and encoded with
/// dropout off, and the pooled vectors are averaged.
Eigen::RowVectorXd EmbedMeta(const MetaInfoRecord &record, Encoder &encoder);

/// Throws CoverageError if a category has no meta record.
PrototypeBank BuildPrototypes(const MetaMap &meta, const std::vector<std::string> &categories,
                              Encoder &encoder, int refresh_interval = 1);

/// Recomputes every row when step % refresh_interval == 0. Returns whether it did.
bool RefreshPrototypes(PrototypeBank &bank, Encoder &encoder, long step);

/// B x C cosine similarities between pooled rows and prototype rows. The
/// bank is a constant of the graph. Zero-norm rows give similarity 0 and are
/// counted in CosineZeroNormEvents().
ad::Var PrototypeLogits(const ad::Var &pooled, const PrototypeBank &bank);
std::size_t CosineZeroNormEvents();

/// Soft verbalizer, d x C; column i starts as the mean MLM row over every
/// sub-token of category i's label words.
struct VerbalizerWeights {
  ad::Parameter weight;
  std::map<std::string, std::vector<int>> label_words;
};

VerbalizerWeights InitVerbalizer(const MetaMap &meta, const std::vector<std::string> &categories,
                                 const MlmHeadView &mlm);

/// B x C inner products, no bias.
ad::Var VerbalizerLogits(const ad::Var &mask_hidden, const ad::Var &weight);

/// Linear d -> dim map followed by tanh; feeds the contrastive loss only.
class ProjectionHead {
 public:
  static constexpr int kDefaultDim = 256;

  ProjectionHead() = default;
  ProjectionHead(int in_dim, int out_dim, std::uint64_t seed);

  ad::Var Project(const ad::Var &pooled);
  int out_dim() const { return static_cast<int>(weight_.value().cols()); }
  std::vector<ad::Parameter *> parameters() { return {&weight_, &bias_}; }

 private:
  ad::Parameter weight_;
  ad::Parameter bias_;
};

struct HeadsConfig {
  double logit_temperature = 0.05;
  int refresh_interval = 1;
  int projection_dim = ProjectionHead::kDefaultDim;
  std::uint64_t seed = 99;
};

struct Prediction {
  Eigen::VectorXd distribution;  // combined over the joint label space
  int label = -1;
  Eigen::VectorXd head1;  // prototype head
  Eigen::VectorXd head2;  // verbalizer head
};

/// Anything that can label utterances over a joint label space.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::string method() const = 0;
  virtual const LabelSpace &label_space() const = 0;
  /// Raw texts; templating and batching happen inside. Dropout is off.
  virtual std::vector<Prediction> Predict(const std::vector<std::string> &texts,
                                          std::size_t batch_size = 64) = 0;
  virtual void Save(const std::string &path) const = 0;
  /// True when the OOD block holds anonymous cluster ids that evaluation
  /// must align to gold names.
  virtual bool anonymous_ood() const { return false; }
};

struct HeadOutputs {
  ad::Var pooled;
  ad::Var mask_hidden;
  ad::Var logits1;  // cosine / temperature
  ad::Var logits2;  // verbalizer
  ad::Var p1;
  ad::Var p2;
};

/// Encoder plus the prototype head (C1) and the verbalizer head (C2).
class CppModel : public Model {
 public:
  CppModel(LabelSpace labels, std::unique_ptr<Encoder> encoder, const MetaMap &meta,
           HeadsConfig config, std::string config_hash = "");

  std::string method() const override { return "cpp"; }
  const LabelSpace &label_space() const override { return labels_; }

  /// Texts must already be templated.
  HeadOutputs Forward(const std::vector<std::string> &templated, std::uint64_t view_seed,
                      bool dropout_active);
  ad::Var Project(const ad::Var &pooled) { return projection_.Project(pooled); }
  bool Refresh(long step) { return RefreshPrototypes(bank_, *encoder_, step); }

  std::vector<Prediction> Predict(const std::vector<std::string> &texts,
                                  std::size_t batch_size = 64) override;

  std::vector<ad::Parameter *> parameters();
  Encoder &encoder() { return *encoder_; }
  const PrototypeBank &bank() const { return bank_; }
  const VerbalizerWeights &verbalizer() const { return verbalizer_; }
  const HeadsConfig &config() const { return config_; }

  struct State {
    std::vector<ad::Matrix> params;
    ad::Matrix bank;
  };
  State Snapshot();
  void Restore(const State &state);

  void Save(const std::string &path) const override;
  static std::unique_ptr<CppModel> Load(const std::string &path);

 private:
  CppModel() = default;

  LabelSpace labels_;
  std::unique_ptr<Encoder> encoder_;
  HeadsConfig config_;
  PrototypeBank bank_;
  VerbalizerWeights verbalizer_;
  ProjectionHead projection_;
  std::string config_hash_;
};

}  // namespace gid

#endif  // GID_HEADS_H_
