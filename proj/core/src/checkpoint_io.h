// core/src/checkpoint_io.h

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

#ifndef GID_SRC_CHECKPOINT_IO_H_
#define GID_SRC_CHECKPOINT_IO_H_

// JSON encoding shared by the checkpoint writers. Doubles are written in
// shortest round-trip form, so save -> load reproduces every value exactly.

#include <string>
#include <vector>

#include "gid/autodiff.h"
#include "gid/dataset.h"
#include "gid/encoder.h"
#include "gid/meta_knowledge.h"
#include "json.hpp"

namespace gid::io {

using nlohmann::json;

json MatrixToJson(const ad::Matrix &m);
ad::Matrix MatrixFromJson(const json &j);

json EncoderConfigToJson(const EncoderConfig &c);
EncoderConfig EncoderConfigFromJson(const json &j);

json LabelSpaceToJson(const LabelSpace &ls);
LabelSpace LabelSpaceFromJson(const json &j);

json MetaMapToJson(const MetaMap &meta);
MetaMap MetaMapFromJson(const json &j);

json ParamsToJson(const std::vector<ad::Parameter *> &params);
/// Every parameter must be present with a matching shape.
void ParamsFromJson(const json &j, const std::vector<ad::Parameter *> &params);

void WriteJsonFile(const std::string &path, const json &j);
json ReadJsonFile(const std::string &path);

}  // namespace gid::io

#endif  // GID_SRC_CHECKPOINT_IO_H_
