// core/src/config.cc

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

#include "gid/config.h"

#include <fstream>
#include <sstream>

#include "checkpoint_io.h"
#include "gid/errors.h"
#include "gid/util.h"

namespace gid {

namespace {

using io::json;

json Encode(const RunConfig &c) {
  const auto &t = c.train;
  const auto &l = c.loss;
  return json{
      {"method", c.method},
      {"train",
       {{"batch_size", t.batch_size},
        {"max_epochs", t.max_epochs},
        {"patience", t.patience},
        {"learning_rate", t.learning_rate},
        {"weight_decay", t.weight_decay},
        {"warmup_steps", t.warmup_steps},
        {"seed", t.seed},
        {"pretrain", t.pretrain},
        {"discover", t.discover}}},
      {"loss",
       {{"lambda_dc", l.weights.dc},
        {"lambda_pc", l.weights.pc},
        {"lambda_cp", l.weights.cp},
        {"lambda_cl", l.weights.cl},
        {"tau", l.tau},
        {"eps", l.eps},
        {"nt_xent_sum", l.nt_xent_sum},
        {"cp_targets", CpTargetsName(l.cp_targets)}}},
      {"encoder", io::EncoderConfigToJson(c.encoder)},
      {"heads",
       {{"logit_temperature", c.heads.logit_temperature},
        {"refresh_interval", c.heads.refresh_interval},
        {"projection_dim", c.heads.projection_dim},
        {"seed", c.heads.seed}}},
      {"meta", {{"kind", MetaKindName(c.meta.kind)}, {"k", c.meta.k}}},
      {"baseline",
       {{"kmeans_max_iter", c.baseline.kmeans_max_iter},
        {"kmeans_seed", c.baseline.kmeans_seed}}}};
}

RunConfig Decode(const json &j) {
  RunConfig c;
  c.method = j.at("method").get<std::string>();
  const auto &t = j.at("train");
  c.train.batch_size = t.at("batch_size").get<int>();
  c.train.max_epochs = t.at("max_epochs").get<int>();
  c.train.patience = t.at("patience").get<int>();
  c.train.learning_rate = t.at("learning_rate").get<double>();
  c.train.weight_decay = t.at("weight_decay").get<double>();
  c.train.warmup_steps = t.at("warmup_steps").get<long>();
  c.train.seed = t.at("seed").get<std::uint64_t>();
  c.train.pretrain = t.at("pretrain").get<bool>();
  c.train.discover = t.at("discover").get<bool>();
  const auto &l = j.at("loss");
  c.loss.weights.dc = l.at("lambda_dc").get<double>();
  c.loss.weights.pc = l.at("lambda_pc").get<double>();
  c.loss.weights.cp = l.at("lambda_cp").get<double>();
  c.loss.weights.cl = l.at("lambda_cl").get<double>();
  c.loss.tau = l.at("tau").get<double>();
  c.loss.eps = l.at("eps").get<double>();
  c.loss.nt_xent_sum = l.at("nt_xent_sum").get<bool>();
  c.loss.cp_targets = ParseCpTargets(l.at("cp_targets").get<std::string>());
  c.encoder = io::EncoderConfigFromJson(j.at("encoder"));
  const auto &h = j.at("heads");
  c.heads.logit_temperature = h.at("logit_temperature").get<double>();
  c.heads.refresh_interval = h.at("refresh_interval").get<int>();
  c.heads.projection_dim = h.at("projection_dim").get<int>();
  c.heads.seed = h.at("seed").get<std::uint64_t>();
  c.meta.kind = ParseMetaKind(j.at("meta").at("kind").get<std::string>());
  c.meta.k = j.at("meta").at("k").get<int>();
  c.baseline.kmeans_max_iter = j.at("baseline").at("kmeans_max_iter").get<int>();
  c.baseline.kmeans_seed = j.at("baseline").at("kmeans_seed").get<std::uint64_t>();
  return c;
}

bool SameKind(const json &a, const json &b) {
  if (a.is_number() && b.is_number()) {
    // An integer slot rejects fractional values.
    return !(a.is_number_integer() && b.is_number_float());
  }
  return a.type() == b.type();
}

void Assign(json &slot, const json &value, const std::string &key) {
  if (!SameKind(slot, value)) throw ConfigError("'" + key + "' has the wrong type");
  if (slot.is_number_unsigned() && value.is_number_integer() && value.get<long long>() < 0)
    throw ConfigError("'" + key + "' must be non-negative");
  slot = value;
}

void Merge(json &base, const json &patch, const std::string &prefix) {
  if (!patch.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto &[key, value] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    if (base[key].is_object())
      Merge(base[key], value, path);
    else
      Assign(base[key], value, path);
  }
}

RunConfig DecodeChecked(const json &j) {
  try {
    RunConfig c = Decode(j);
    c.Validate();
    return c;
  } catch (const json::exception &e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string RunConfig::ToJson() const { return Encode(*this).dump(2); }

RunConfig RunConfig::FromJson(const std::string &text) {
  json patch;
  try {
    patch = json::parse(text);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  json base = Encode(RunConfig{});
  Merge(base, patch, "");
  return DecodeChecked(base);
}

RunConfig RunConfig::FromFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

void RunConfig::ApplyOverride(const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = Trim(assignment.substr(0, eq));
  const std::string raw = Trim(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception &) {
    value = raw;  // bare strings need no quotes
  }
  json base = Encode(*this);
  json *slot = &base;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!slot->is_object() || !slot->contains(part))
      throw ConfigError("unknown config key '" + key + "'");
    slot = &(*slot)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (slot->is_object()) throw ConfigError("'" + key + "' names a section, not a value");
  Assign(*slot, value, key);
  *this = DecodeChecked(base);
}

void RunConfig::Validate() const {
  if (method != "cpp" && method != "kmeans")
    throw ConfigError("method must be cpp or kmeans, got '" + method + "'");
  if (train.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (train.max_epochs < 0) throw ConfigError("train.max_epochs must be >= 0");
  if (train.patience < 1) throw ConfigError("train.patience must be >= 1");
  if (train.learning_rate < 0.0) throw ConfigError("train.learning_rate must be >= 0");
  if (train.weight_decay < 0.0) throw ConfigError("train.weight_decay must be >= 0");
  if (train.warmup_steps < 0) throw ConfigError("train.warmup_steps must be >= 0");
  ValidateWeights(loss.weights);
  if (!(loss.tau > 0.0)) throw ConfigError("loss.tau must be positive");
  if (!(loss.eps > 0.0 && loss.eps < 0.5)) throw ConfigError("loss.eps must be in (0, 0.5)");
  if (encoder.dim < 1 || encoder.num_layers < 0 || encoder.ffn_dim < 1)
    throw ConfigError("encoder dimensions must be positive");
  if (encoder.dropout < 0.0 || encoder.dropout >= 1.0)
    throw ConfigError("encoder.dropout must be in [0, 1)");
  if (!(heads.logit_temperature > 0.0)) throw ConfigError("heads.logit_temperature must be > 0");
  if (heads.refresh_interval < 1) throw ConfigError("heads.refresh_interval must be >= 1");
  if (heads.projection_dim < 1) throw ConfigError("heads.projection_dim must be >= 1");
  if (meta.k < 1) throw ConfigError("meta.k must be >= 1");
  if (baseline.kmeans_max_iter < 1) throw ConfigError("baseline.kmeans_max_iter must be >= 1");
}

std::string RunConfig::Hash() const { return HexDigest(Fnv1a64(Encode(*this).dump())); }

}  // namespace gid
