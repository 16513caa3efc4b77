// core/src/checkpoint_io.cc

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

#include "checkpoint_io.h"

#include <fstream>
#include <sstream>

#include "gid/errors.h"

namespace gid::io {

json MatrixToJson(const ad::Matrix &m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

ad::Matrix MatrixFromJson(const json &j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto &data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw CheckpointError("matrix payload size mismatch");
  ad::Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++].get<double>();
  return m;
}

json EncoderConfigToJson(const EncoderConfig &c) {
  return json{{"backend", c.backend},       {"dim", c.dim},
              {"vocab_size", c.vocab_size}, {"num_layers", c.num_layers},
              {"ffn_dim", c.ffn_dim},       {"dropout", c.dropout},
              {"max_length", c.max_length}, {"seed", c.seed},
              {"freeze", FreezeModeName(c.freeze)}};
}

EncoderConfig EncoderConfigFromJson(const json &j) {
  EncoderConfig c;
  c.backend = j.at("backend").get<std::string>();
  c.dim = j.at("dim").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.num_layers = j.at("num_layers").get<int>();
  c.ffn_dim = j.at("ffn_dim").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.max_length = j.at("max_length").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.freeze = ParseFreezeMode(j.at("freeze").get<std::string>());
  return c;
}

json LabelSpaceToJson(const LabelSpace &ls) {
  return json{{"ind_labels", ls.ind_labels()},
              {"ood_labels", ls.ood_labels()},
              {"domain_of", ls.domain_of()}};
}

LabelSpace LabelSpaceFromJson(const json &j) {
  return LabelSpace(j.at("ind_labels").get<std::vector<std::string>>(),
                    j.at("ood_labels").get<std::vector<std::string>>(),
                    j.at("domain_of").get<std::map<std::string, std::string>>());
}

json MetaMapToJson(const MetaMap &meta) {
  json a = json::array();
  for (const auto &[label, r] : meta) a.push_back(json::parse(MetaRecordJsonLine(r)));
  return a;
}

MetaMap MetaMapFromJson(const json &j) {
  MetaMap meta;
  for (const auto &e : j) {
    MetaInfoRecord r;
    r.category = e.at("category").get<std::string>();
    r.kind = ParseMetaKind(e.at("kind").get<std::string>());
    r.k = e.at("k").get<int>();
    r.items = e.at("items").get<std::vector<std::string>>();
    r.template_hash = e.at("template_hash").get<std::string>();
    r.provenance =
        e.at("provenance") == "fixture" ? Provenance::kFixture : Provenance::kGenerated;
    meta[r.category] = std::move(r);
  }
  return meta;
}

json ParamsToJson(const std::vector<ad::Parameter *> &params) {
  json j = json::object();
  for (const ad::Parameter *p : params) j[p->name()] = MatrixToJson(p->value());
  return j;
}

void ParamsFromJson(const json &j, const std::vector<ad::Parameter *> &params) {
  for (ad::Parameter *p : params) {
    if (!j.contains(p->name())) throw CheckpointError("missing parameter " + p->name());
    ad::Matrix m = MatrixFromJson(j.at(p->name()));
    if (m.rows() != p->value().rows() || m.cols() != p->value().cols())
      throw CheckpointError("shape mismatch for parameter " + p->name());
    p->mutable_value() = std::move(m);
    p->ZeroGrad();
  }
}

void WriteJsonFile(const std::string &path, const json &j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path);
  out << j.dump() << "\n";
}

json ReadJsonFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error &e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

}  // namespace gid::io
