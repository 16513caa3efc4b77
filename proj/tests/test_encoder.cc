// tests/test_encoder.cc

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

#include "gid/encoder.h"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gid/errors.h"
#include "gid/synthetic.h"

namespace {

gid::EncoderConfig Small(double dropout = 0.1) {
  gid::EncoderConfig c;
  c.vocab_size = 100;
  c.dim = 16;
  c.dropout = dropout;
  return c;
}

class NoHead : public gid::Encoder {
 public:
  const gid::EncoderConfig &config() const override { return config_; }
  std::string mask_token() const override { return "<mask>"; }
  gid::ForwardResult Forward(const std::vector<std::string> &, std::uint64_t, bool) override {
    return {};
  }
  std::vector<gid::ad::Parameter *> parameters() override { return {}; }
  void SetFreeze(gid::FreezeMode) override {}
  std::unique_ptr<gid::Encoder> Clone() const override { return std::make_unique<NoHead>(); }

 private:
  gid::EncoderConfig config_;
};

}  // namespace

TEST_CASE("template") {
  CHECK(gid::ApplyTemplate("book a flight") ==
        "book a flight. In this sentence, the intent is about [MASK].");
  CHECK(gid::ApplyTemplate("book a flight.") ==
        "book a flight. In this sentence, the intent is about [MASK].");
  CHECK(gid::ApplyTemplate("is it late?") ==
        "is it late? In this sentence, the intent is about [MASK].");
  CHECK(gid::ApplyTemplate("x", "<mask>") == "x. In this sentence, the intent is about <mask>.");
}

TEST_CASE("dropout off is deterministic, dropout on gives distinct views") {
  gid::ToyEncoder enc(Small());
  const std::string t = enc.Template("where is my card");
  const auto a = enc.Encode({t}, 1, false), b = enc.Encode({t}, 2, false);
  CHECK(a[0].pooled == b[0].pooled);
  const auto v1 = enc.Encode({t}, 1, true), v2 = enc.Encode({t}, 2, true);
  CHECK(v1[0].pooled != v2[0].pooled);
  CHECK(enc.Encode({t}, 1, true)[0].pooled == v1[0].pooled);
}

TEST_CASE("batch of 64 keeps order and matches single encodes") {
  gid::ToyEncoder enc(Small());
  std::vector<std::string> texts;
  for (int i = 0; i < 64; ++i) texts.push_back(enc.Template("request number " + std::to_string(i)));
  const auto batch = enc.Encode(texts, 0, false);
  REQUIRE(batch.size() == 64);
  for (int i : {0, 17, 63}) {
    const auto one = enc.Encode({texts[i]}, 0, false);
    CHECK((batch[i].pooled - one[0].pooled).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(batch[i].mask_hidden.has_value());
  }
}

TEST_CASE("pooled vector is the mean of the final token states") {
  gid::ToyEncoder enc(Small());
  const std::vector<std::string> texts{enc.Template("a"), enc.Template("a much longer request text"),
                                       "no template here"};
  const auto fr = enc.Forward(texts, 9, true);
  REQUIRE(fr.token_counts.size() == 3);
  Eigen::Index at = 0;
  for (int b = 0; b < 3; ++b) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(16);
    for (int r = 0; r < fr.token_counts[b]; ++r) mean += fr.tokens.value().row(at + r);
    mean /= fr.token_counts[b];
    CHECK((fr.pooled.value().row(b) - mean).cwiseAbs().maxCoeff() < 1e-12);
    at += fr.token_counts[b];
  }
  CHECK(fr.mask_count == std::vector<int>{1, 1, 0});
  CHECK(fr.mask_hidden.value().row(2).isZero());
}

TEST_CASE("view noise is uncorrelated across inputs") {
  gid::ToyEncoder enc(Small());
  const std::vector<std::string> texts{enc.Template("refund my order"),
                                       enc.Template("change my pin")};
  std::vector<double> xs, ys;
  for (std::uint64_t s = 0; s < 150; ++s) {
    const auto a = enc.Encode(texts, 2 * s + 1, true), b = enc.Encode(texts, 2 * s + 2, true);
    const Eigen::VectorXd d0 = a[0].pooled - b[0].pooled, d1 = a[1].pooled - b[1].pooled;
    for (int i = 0; i < 16; ++i) {
      xs.push_back(d0(i));
      ys.push_back(d1(i));
    }
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  // Four standard errors of a null correlation.
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 4.0 / std::sqrt(n));
}

TEST_CASE("truncation never drops the mask placeholder") {
  gid::EncoderConfig c = Small(0.0);
  c.max_length = 24;
  gid::ToyEncoder enc(c);
  for (int words : {1, 10, 24, 100, 240}) {
    std::ostringstream os;
    for (int i = 0; i < words; ++i) os << "word" << i << ' ';
    const auto fr = enc.Forward({enc.Template(os.str())}, 0, false);
    CHECK(fr.mask_count[0] == 1);
    CHECK(fr.token_counts[0] <= 24);
  }
}

TEST_CASE("mlm head view") {
  gid::ToyEncoder enc(Small());
  const auto mlm = enc.mlm_head_view();
  CHECK(mlm.vocab_size() == 100);
  CHECK(mlm.dim() == 16);
  CHECK_FALSE(mlm.lookup("refund").empty());
  CHECK(mlm.lookup("reimbursement").size() >= 2);
  CHECK_THROWS_AS(NoHead().mlm_head_view(), gid::CapabilityError);
  CHECK_THROWS_AS(gid::MakeEncoder({.backend = "bert"}), gid::ConfigError);
}

TEST_CASE("freeze modes") {
  gid::ToyEncoder enc(Small());
  auto trainable = [&] {
    int n = 0;
    for (auto *p : enc.parameters()) n += p->trainable();
    return n;
  };
  const int all = static_cast<int>(enc.parameters().size());
  CHECK(trainable() == all);
  enc.SetFreeze(gid::FreezeMode::kAll);
  CHECK(trainable() == 0);
  enc.SetFreeze(gid::FreezeMode::kAllButLast);
  CHECK(trainable() > 0);
  CHECK(trainable() < all);
  for (auto m : {gid::FreezeMode::kNone, gid::FreezeMode::kAll, gid::FreezeMode::kAllButLast})
    CHECK(gid::ParseFreezeMode(gid::FreezeModeName(m)) == m);
}

TEST_CASE("desk task words get distinct token sequences") {
  gid::EncoderConfig c = gid::DeskRunConfig().encoder;
  gid::ToyEncoder enc(c);
  std::set<std::string> words;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto task = gid::MakeDeskTask(seed);
    for (const auto &u : task.corpus.records) {
      std::istringstream in(u.text);
      for (std::string w; in >> w;) words.insert(w);
    }
    for (const auto &r : task.meta)
      for (const auto &item : r.items) words.insert(item);
  }
  std::map<std::vector<int>, std::string> seen;
  for (const auto &w : words) {
    const auto ids = enc.Tokenize(w);
    const auto [it, fresh] = seen.emplace(ids, w);
    CHECK_MESSAGE(fresh, w << " collides with " << it->second);
  }
}
