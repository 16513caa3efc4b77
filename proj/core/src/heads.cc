// core/src/heads.cc

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

#include "gid/heads.h"

#include <cmath>

#include "checkpoint_io.h"
#include "gid/errors.h"
#include "gid/util.h"

namespace gid {

namespace {

std::atomic<std::size_t> g_zero_norm_events{0};

}  // namespace

Eigen::RowVectorXd EmbedMeta(const MetaInfoRecord &record, Encoder &encoder) {
  if (record.items.empty()) throw CoverageError("meta record '" + record.category + "' is empty");
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(encoder.dim());
  // One forward pass per item: the row is then independent of batching and
  // re-embedding reproduces it bit for bit.
  for (const auto &item : record.items)
    sum += encoder.Encode({encoder.Template(item)}, 0, false)[0].pooled.transpose();
  return sum / static_cast<double>(record.items.size());
}

PrototypeBank BuildPrototypes(const MetaMap &meta, const std::vector<std::string> &categories,
                              Encoder &encoder, int refresh_interval) {
  if (refresh_interval < 1) throw ConfigError("refresh_interval must be at least 1");
  PrototypeBank bank;
  bank.categories = categories;
  bank.refresh_interval = refresh_interval;
  bank.matrix.resize(static_cast<Eigen::Index>(categories.size()), encoder.dim());
  for (std::size_t i = 0; i < categories.size(); ++i) {
    auto it = meta.find(categories[i]);
    if (it == meta.end())
      throw CoverageError("no meta-information for category '" + categories[i] + "'");
    bank.source_meta[categories[i]] = it->second;
    bank.matrix.row(static_cast<Eigen::Index>(i)) = EmbedMeta(it->second, encoder);
  }
  return bank;
}

bool RefreshPrototypes(PrototypeBank &bank, Encoder &encoder, long step) {
  if (step % bank.refresh_interval != 0) return false;
  for (std::size_t i = 0; i < bank.categories.size(); ++i)
    bank.matrix.row(static_cast<Eigen::Index>(i)) =
        EmbedMeta(bank.source_meta.at(bank.categories[i]), encoder);
  return true;
}

ad::Var PrototypeLogits(const ad::Var &pooled, const PrototypeBank &bank) {
  if (pooled.cols() != bank.matrix.cols())
    throw ShapeError("PrototypeLogits: pooled dim " + std::to_string(pooled.cols()) +
                     " vs prototype dim " + std::to_string(bank.matrix.cols()));
  std::size_t zero = 0;
  ad::Var a = ad::L2NormalizeRows(pooled, 1e-12, &zero);
  ad::Var p = ad::L2NormalizeRows(ad::Constant(bank.matrix), 1e-12, &zero);
  g_zero_norm_events += zero;
  return ad::MatMulNT(a, p);
}

std::size_t CosineZeroNormEvents() { return g_zero_norm_events.load(); }

VerbalizerWeights InitVerbalizer(const MetaMap &meta, const std::vector<std::string> &categories,
                                 const MlmHeadView &mlm) {
  VerbalizerWeights vw;
  ad::Matrix w(mlm.dim(), static_cast<Eigen::Index>(categories.size()));
  for (std::size_t i = 0; i < categories.size(); ++i) {
    auto it = meta.find(categories[i]);
    if (it == meta.end())
      throw CoverageError("no label words for category '" + categories[i] + "'");
    std::vector<int> pool;
    for (const auto &word : it->second.items) {
      std::vector<int> ids = mlm.lookup(word);
      if (ids.empty()) throw VerbalizerError("label word '" + word + "' has no tokens");
      for (int id : ids) {
        if (id < 0 || id >= mlm.vocab_size())
          throw VerbalizerError("label word '" + word + "' maps outside the vocabulary");
        pool.push_back(id);
      }
    }
    Eigen::VectorXd col = Eigen::VectorXd::Zero(mlm.dim());
    for (int id : pool) col += mlm.weight->row(id).transpose();
    col /= static_cast<double>(pool.size());
    w.col(static_cast<Eigen::Index>(i)) = col;
    vw.label_words[categories[i]] = std::move(pool);
  }
  vw.weight = ad::Parameter("verbalizer.weight", std::move(w));
  return vw;
}

ad::Var VerbalizerLogits(const ad::Var &mask_hidden, const ad::Var &weight) {
  if (mask_hidden.cols() != weight.rows())
    throw ShapeError("VerbalizerLogits: hidden dim differs from verbalizer rows");
  return ad::MatMul(mask_hidden, weight);
}

ProjectionHead::ProjectionHead(int in_dim, int out_dim, std::uint64_t seed) {
  Rng rng(MixSeed(seed, Fnv1a64("projection")));
  ad::Matrix w(in_dim, out_dim);
  const double sd = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.Normal() * sd;
  weight_ = ad::Parameter("projection.weight", std::move(w));
  bias_ = ad::Parameter("projection.bias", ad::Matrix::Zero(1, out_dim));
}

ad::Var ProjectionHead::Project(const ad::Var &pooled) {
  return ad::Tanh(ad::AddRow(ad::MatMul(pooled, ad::Leaf(weight_)), ad::Leaf(bias_)));
}

CppModel::CppModel(LabelSpace labels, std::unique_ptr<Encoder> encoder, const MetaMap &meta,
                   HeadsConfig config, std::string config_hash)
    : labels_(std::move(labels)), encoder_(std::move(encoder)), config_(config),
      config_hash_(std::move(config_hash)) {
  if (config_.logit_temperature <= 0.0) throw ConfigError("logit_temperature must be positive");
  const auto categories = labels_.All();
  bank_ = BuildPrototypes(meta, categories, *encoder_, config_.refresh_interval);
  verbalizer_ = InitVerbalizer(meta, categories, encoder_->mlm_head_view());
  projection_ = ProjectionHead(encoder_->dim(), config_.projection_dim, config_.seed);
}

HeadOutputs CppModel::Forward(const std::vector<std::string> &templated, std::uint64_t view_seed,
                              bool dropout_active) {
  ForwardResult fr = encoder_->Forward(templated, view_seed, dropout_active);
  for (std::size_t i = 0; i < fr.mask_count.size(); ++i)
    if (fr.mask_count[i] != 1)
      throw EncodeError("input " + std::to_string(i) + " must contain exactly one mask");
  HeadOutputs out;
  out.pooled = fr.pooled;
  out.mask_hidden = fr.mask_hidden;
  out.logits1 = ad::Scale(PrototypeLogits(fr.pooled, bank_), 1.0 / config_.logit_temperature);
  out.logits2 = VerbalizerLogits(fr.mask_hidden, ad::Leaf(verbalizer_.weight));
  out.p1 = ad::SoftmaxRows(out.logits1);
  out.p2 = ad::SoftmaxRows(out.logits2);
  return out;
}

std::vector<Prediction> CppModel::Predict(const std::vector<std::string> &texts,
                                          std::size_t batch_size) {
  std::vector<Prediction> out;
  out.reserve(texts.size());
  for (std::size_t at = 0; at < texts.size(); at += batch_size) {
    std::vector<std::string> batch;
    for (std::size_t i = at; i < std::min(texts.size(), at + batch_size); ++i)
      batch.push_back(encoder_->Template(texts[i]));
    HeadOutputs h = Forward(batch, 0, false);
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(batch.size()); ++b) {
      Prediction p;
      p.head1 = h.p1.value().row(b).transpose();
      p.head2 = h.p2.value().row(b).transpose();
      p.distribution = 0.5 * (p.head1 + p.head2);
      Eigen::Index arg;
      p.distribution.maxCoeff(&arg);
      p.label = static_cast<int>(arg);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<ad::Parameter *> CppModel::parameters() {
  std::vector<ad::Parameter *> ps = encoder_->parameters();
  ps.push_back(&verbalizer_.weight);
  for (ad::Parameter *p : projection_.parameters()) ps.push_back(p);
  return ps;
}

CppModel::State CppModel::Snapshot() {
  State s;
  for (ad::Parameter *p : parameters()) s.params.push_back(p->value());
  s.bank = bank_.matrix;
  return s;
}

void CppModel::Restore(const State &state) {
  auto ps = parameters();
  if (ps.size() != state.params.size()) throw CheckpointError("snapshot does not fit the model");
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->mutable_value() = state.params[i];
  bank_.matrix = state.bank;
}

void CppModel::Save(const std::string &path) const {
  auto *self = const_cast<CppModel *>(this);
  io::json j;
  j["format"] = "gid-checkpoint/1";
  j["method"] = method();
  j["config_hash"] = config_hash_;
  j["encoder_config"] = io::EncoderConfigToJson(encoder_->config());
  j["label_space"] = io::LabelSpaceToJson(labels_);
  j["heads_config"] = {{"logit_temperature", config_.logit_temperature},
                       {"refresh_interval", config_.refresh_interval},
                       {"projection_dim", config_.projection_dim},
                       {"seed", config_.seed}};
  j["params"] = io::ParamsToJson(self->parameters());
  j["prototype_bank"] = {{"categories", bank_.categories},
                         {"refresh_interval", bank_.refresh_interval},
                         {"matrix", io::MatrixToJson(bank_.matrix)}};
  j["meta"] = io::MetaMapToJson(bank_.source_meta);
  j["label_words"] = verbalizer_.label_words;
  io::WriteJsonFile(path, j);
}

std::unique_ptr<CppModel> CppModel::Load(const std::string &path) {
  io::json j = io::ReadJsonFile(path);
  try {
    if (j.at("format") != "gid-checkpoint/1" || j.at("method") != "cpp")
      throw CheckpointError(path + " is not a cpp checkpoint");
    std::unique_ptr<CppModel> m(new CppModel());
    m->config_hash_ = j.at("config_hash").get<std::string>();
    m->labels_ = io::LabelSpaceFromJson(j.at("label_space"));
    m->encoder_ = MakeEncoder(io::EncoderConfigFromJson(j.at("encoder_config")));
    const auto &hc = j.at("heads_config");
    m->config_.logit_temperature = hc.at("logit_temperature").get<double>();
    m->config_.refresh_interval = hc.at("refresh_interval").get<int>();
    m->config_.projection_dim = hc.at("projection_dim").get<int>();
    m->config_.seed = hc.at("seed").get<std::uint64_t>();
    const auto &pb = j.at("prototype_bank");
    m->bank_.categories = pb.at("categories").get<std::vector<std::string>>();
    m->bank_.refresh_interval = pb.at("refresh_interval").get<int>();
    m->bank_.matrix = io::MatrixFromJson(pb.at("matrix"));
    m->bank_.source_meta = io::MetaMapFromJson(j.at("meta"));
    m->verbalizer_.label_words =
        j.at("label_words").get<std::map<std::string, std::vector<int>>>();
    m->verbalizer_.weight = ad::Parameter(
        "verbalizer.weight",
        ad::Matrix::Zero(m->encoder_->dim(), static_cast<Eigen::Index>(m->labels_.size())));
    m->projection_ = ProjectionHead(m->encoder_->dim(), m->config_.projection_dim, m->config_.seed);
    io::ParamsFromJson(j.at("params"), m->parameters());
    m->encoder_->SetFreeze(m->encoder_->config().freeze);
    return m;
  } catch (const io::json::exception &e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

}  // namespace gid
