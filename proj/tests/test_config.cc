// tests/test_config.cc

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

#include "doctest.h"
#include "gid/errors.h"

TEST_CASE("json round-trip keeps the hash") {
  gid::RunConfig c;
  c.method = "kmeans";
  c.loss.weights.cl = 0.0;
  c.loss.cp_targets = gid::CpTargets::kOwn;
  c.encoder.freeze = gid::FreezeMode::kAllButLast;
  c.meta.kind = gid::MetaKind::kExamples;
  c.meta.k = 4;
  const auto back = gid::RunConfig::FromJson(c.ToJson());
  CHECK(back.ToJson() == c.ToJson());
  CHECK(back.Hash() == c.Hash());
  CHECK(back.loss.cp_targets == gid::CpTargets::kOwn);
  CHECK(gid::RunConfig().Hash() != c.Hash());
}

TEST_CASE("overrides") {
  gid::RunConfig c;
  c.ApplyOverride("loss.lambda_cl=0");
  CHECK(c.loss.weights.cl == 0.0);
  c.ApplyOverride("encoder.freeze=plm_all");
  CHECK(c.encoder.freeze == gid::FreezeMode::kAll);
  c.ApplyOverride("method=kmeans");
  CHECK(c.method == "kmeans");
  c.ApplyOverride("loss.cp_targets=own");
  CHECK(c.loss.cp_targets == gid::CpTargets::kOwn);
  c.ApplyOverride("train.learning_rate = 1e-3");
  CHECK(c.train.learning_rate == 1e-3);

  CHECK_THROWS_AS(c.ApplyOverride("loss.lambda_xx=1"), gid::ConfigError);
  CHECK_THROWS_AS(c.ApplyOverride("loss=1"), gid::ConfigError);
  CHECK_THROWS_AS(c.ApplyOverride("train.batch_size=big"), gid::ConfigError);
  CHECK_THROWS_AS(c.ApplyOverride("loss.lambda_cp=-1"), gid::ConfigError);
  CHECK_THROWS_AS(c.ApplyOverride("nokey"), gid::ConfigError);
  CHECK_THROWS_AS(c.ApplyOverride("method=dpl"), gid::ConfigError);
  CHECK_THROWS_AS(c.ApplyOverride("loss.cp_targets=mine"), gid::ConfigError);
}

TEST_CASE("validation") {
  gid::RunConfig c;
  CHECK_NOTHROW(c.Validate());
  c.train.patience = 0;
  CHECK_THROWS_AS(c.Validate(), gid::ConfigError);
  c = {};
  c.heads.logit_temperature = 0.0;
  CHECK_THROWS_AS(c.Validate(), gid::ConfigError);
}

TEST_CASE("config files patch the defaults") {
  const auto c = gid::RunConfig::FromJson(R"({"train": {"max_epochs": 3}})");
  CHECK(c.train.max_epochs == 3);
  CHECK(c.train.batch_size == 64);
  CHECK_THROWS_AS(gid::RunConfig::FromJson(R"({"train": {"epochs": 3}})"), gid::ConfigError);
  CHECK_THROWS_AS(gid::RunConfig::FromJson("[1, 2]"), gid::ConfigError);
  CHECK_THROWS_AS(gid::RunConfig::FromJson("{"), gid::ConfigError);
}

TEST_CASE("defaults") {
  const gid::RunConfig c;
  CHECK(c.train.batch_size == 64);
  CHECK(c.train.max_epochs == 25);
  CHECK(c.train.patience == 10);
  CHECK(c.train.learning_rate == 5e-5);
  CHECK(c.train.warmup_steps == 500);
  CHECK(c.loss.tau == 0.07);
  CHECK(c.heads.logit_temperature == 0.05);
  CHECK(c.heads.projection_dim == 256);
  CHECK(c.loss.cp_targets == gid::CpTargets::kOther);
}
