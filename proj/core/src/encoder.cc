// core/src/encoder.cc

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

#include <cctype>
#include <cmath>

#include "gid/errors.h"
#include "gid/util.h"

namespace gid {

namespace {

std::string ReplaceMask(std::string_view tail, std::string_view mask) {
  std::string out(tail);
  auto pos = out.find("{mask}");
  if (pos != std::string::npos) out.replace(pos, 6, mask);
  return out;
}

bool IsWordByte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

ad::Matrix RandomMatrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols,
                        double scale) {
  Rng rng(seed);
  ad::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.Normal() * scale;
  return m;
}

// Identity plus small noise: token identity survives the value path, so the
// mask state starts out as a bag-of-words summary of its sentence.
ad::Matrix NearIdentity(std::uint64_t seed, Eigen::Index d, double scale) {
  return ad::Matrix::Identity(d, d) + RandomMatrix(seed, d, d, 0.1 * scale);
}

}  // namespace

std::string ApplyTemplate(std::string_view text, std::string_view mask_token) {
  std::string t = Trim(text);
  const std::string tail = ReplaceMask(kTemplateTail, mask_token);
  if (!t.empty() && (t.back() == '.' || t.back() == '!' || t.back() == '?'))
    return t + " " + tail;
  return t + ". " + tail;
}

std::string FreezeModeName(FreezeMode m) {
  switch (m) {
    case FreezeMode::kNone: return "none";
    case FreezeMode::kAll: return "plm_all";
    case FreezeMode::kAllButLast: return "plm_but_last";
  }
  return "?";
}

FreezeMode ParseFreezeMode(const std::string &name) {
  if (name == "none") return FreezeMode::kNone;
  if (name == "plm_all") return FreezeMode::kAll;
  if (name == "plm_but_last") return FreezeMode::kAllButLast;
  throw ConfigError("unknown freeze mode '" + name +
                    "' (expected none, plm_all or plm_but_last)");
}

std::vector<EncoderOutput> Encoder::Encode(const std::vector<std::string> &texts,
                                           std::uint64_t view_seed,
                                           bool dropout_active) {
  std::vector<EncoderOutput> out;
  if (texts.empty()) return out;
  ForwardResult fr = Forward(texts, view_seed, dropout_active);
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    EncoderOutput o;
    o.pooled = fr.pooled.value().row(static_cast<Eigen::Index>(i)).transpose();
    if (fr.mask_count[i] == 1)
      o.mask_hidden = fr.mask_hidden.value().row(static_cast<Eigen::Index>(i)).transpose();
    o.view = view_seed;
    out.push_back(std::move(o));
  }
  return out;
}

MlmHeadView Encoder::mlm_head_view() const {
  throw CapabilityError("encoder backend '" + config().backend +
                        "' exposes no MLM head; it cannot host the verbalizer");
}

std::unique_ptr<Encoder> MakeEncoder(const EncoderConfig &config) {
  if (config.backend == "toy") return std::make_unique<ToyEncoder>(config);
  throw ConfigError("unknown encoder backend '" + config.backend + "'");
}

ToyEncoder::ToyEncoder(EncoderConfig config) : config_(std::move(config)) {
  if (config_.dim <= 0 || config_.vocab_size <= kReserved || config_.num_layers <= 0 ||
      config_.ffn_dim <= 0 || config_.max_length < 4)
    throw ConfigError("invalid toy encoder dimensions");
  if (config_.dropout < 0.0 || config_.dropout >= 1.0)
    throw ConfigError("dropout must lie in [0, 1)");
  const int d = config_.dim, f = config_.ffn_dim;
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));

  // Row t depends only on (seed, t), so ids keep their vectors whatever the
  // vocabulary size.
  ad::Matrix emb(config_.vocab_size, d);
  for (int t = 0; t < config_.vocab_size; ++t)
    emb.row(t) = RandomMatrix(MixSeed(config_.seed, 0x1000000ULL + t), 1, d, sd);
  // Special tokens start neutral; the mask state is then driven by context.
  emb.topRows(kReserved).setZero();
  embedding_ = ad::Parameter("encoder.embedding", std::move(emb));

  for (int l = 0; l < config_.num_layers; ++l) {
    const std::string p = "encoder.layer" + std::to_string(l) + ".";
    auto seed = [&](int k) { return MixSeed(config_.seed, 100 * (l + 1) + k); };
    Layer layer{
        ad::Parameter(p + "wq", RandomMatrix(seed(0), d, d, sd)),
        ad::Parameter(p + "wk", RandomMatrix(seed(1), d, d, sd)),
        ad::Parameter(p + "wv", NearIdentity(seed(2), d, sd)),
        ad::Parameter(p + "wo", NearIdentity(seed(3), d, sd)),
        ad::Parameter(p + "ln1.gain", ad::Matrix::Ones(1, d)),
        ad::Parameter(p + "ln1.bias", ad::Matrix::Zero(1, d)),
        ad::Parameter(p + "w1", RandomMatrix(seed(4), d, f, sd)),
        ad::Parameter(p + "b1", ad::Matrix::Zero(1, f)),
        ad::Parameter(p + "w2", RandomMatrix(seed(5), f, d, 0.1 / std::sqrt(double(f)))),
        ad::Parameter(p + "b2", ad::Matrix::Zero(1, d)),
        ad::Parameter(p + "ln2.gain", ad::Matrix::Ones(1, d)),
        ad::Parameter(p + "ln2.bias", ad::Matrix::Zero(1, d)),
    };
    layers_.push_back(std::move(layer));
  }
  SetFreeze(config_.freeze);
}

int ToyEncoder::PieceId(std::string_view piece, bool continuation) const {
  std::string key = continuation ? "##" : "w:";
  key.append(piece);
  return kReserved +
         static_cast<int>(Fnv1a64(key) % static_cast<std::uint64_t>(config_.vocab_size - kReserved));
}

std::vector<int> ToyEncoder::Tokenize(std::string_view text) const {
  std::vector<int> ids;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '[' && text.size() - i >= 6) {
      std::string probe(text.substr(i, 6));
      for (auto &ch : probe) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (probe == "[MASK]") {
        ids.push_back(kMask);
        i += 6;
        continue;
      }
    }
    if (IsWordByte(c)) {
      std::string word;
      while (i < text.size() && IsWordByte(static_cast<unsigned char>(text[i])))
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i++]))));
      for (std::size_t at = 0; at < word.size(); at += kPieceChars)
        ids.push_back(PieceId(std::string_view(word).substr(at, kPieceChars), at > 0));
      continue;
    }
    std::string p = "p:";
    p.push_back(static_cast<char>(c));
    ids.push_back(PieceId(p, false));
    ++i;
  }
  return ids;
}

std::vector<int> ToyEncoder::TokenizeForModel(std::string_view text) const {
  const std::size_t budget = static_cast<std::size_t>(config_.max_length) - 2;
  const std::string tail = ReplaceMask(kTemplateTail, mask_token());
  std::vector<int> ids;
  if (text.size() >= tail.size() && text.substr(text.size() - tail.size()) == tail) {
    // Truncate the user text, never the template suffix.
    std::vector<int> user = Tokenize(text.substr(0, text.size() - tail.size()));
    std::vector<int> suffix = Tokenize(tail);
    if (suffix.size() >= budget) {
      ids.assign(suffix.end() - static_cast<std::ptrdiff_t>(budget), suffix.end());
    } else {
      std::size_t keep = std::min(user.size(), budget - suffix.size());
      ids.assign(user.begin(), user.begin() + static_cast<std::ptrdiff_t>(keep));
      ids.insert(ids.end(), suffix.begin(), suffix.end());
    }
  } else {
    ids = Tokenize(text);
    if (ids.size() > budget) ids.resize(budget);
  }
  ids.insert(ids.begin(), kCls);
  ids.push_back(kSep);
  return ids;
}

ForwardResult ToyEncoder::Forward(const std::vector<std::string> &texts,
                                  std::uint64_t view_seed, bool dropout_active) {
  if (texts.empty()) throw ShapeError("Forward: empty batch");
  const int d = config_.dim;
  std::vector<int> all_ids, seg, mask_rows;
  ForwardResult fr;
  for (const auto &t : texts) {
    std::vector<int> ids = TokenizeForModel(t);
    int masks = 0, pos = 0;
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (ids[j] == kMask) {
        ++masks;
        pos = static_cast<int>(j);
      }
    if (masks == 0 && t.find("[MASK]") != std::string::npos)
      throw EncodeError("mask placeholder lost to truncation in: " + t.substr(0, 60));
    mask_rows.push_back(static_cast<int>(all_ids.size()) + (masks == 1 ? pos : 0));
    fr.mask_count.push_back(masks);
    seg.push_back(static_cast<int>(ids.size()));
    all_ids.insert(all_ids.end(), ids.begin(), ids.end());
  }
  const Eigen::Index total = static_cast<Eigen::Index>(all_ids.size());
  const Eigen::Index batch = static_cast<Eigen::Index>(texts.size());

  std::uint64_t site = 0;
  const double p = config_.dropout;
  auto drop = [&](const ad::Var &x) {
    ++site;
    if (!dropout_active || p <= 0.0) return x;
    Rng rng(MixSeed(view_seed, site));
    ad::Matrix m(x.rows(), x.cols());
    const double keep = 1.0 / (1.0 - p);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.Uniform() < p ? 0.0 : keep;
    return ad::MaskMul(x, m);
  };

  ad::Var x = drop(ad::GatherRows(ad::Leaf(embedding_), all_ids));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto &L : layers_) {
    ad::Var q = ad::MatMul(x, ad::Leaf(L.wq));
    ad::Var k = ad::MatMul(x, ad::Leaf(L.wk));
    ad::Var v = ad::MatMul(x, ad::Leaf(L.wv));
    ad::Var att = ad::MatMul(ad::SegmentAttention(q, k, v, seg, scale), ad::Leaf(L.wo));
    x = ad::LayerNormRows(ad::Add(x, drop(att)), ad::Leaf(L.ln1_gain), ad::Leaf(L.ln1_bias));
    ad::Var h = ad::Tanh(ad::AddRow(ad::MatMul(x, ad::Leaf(L.w1)), ad::Leaf(L.b1)));
    ad::Var f = ad::AddRow(ad::MatMul(h, ad::Leaf(L.w2)), ad::Leaf(L.b2));
    x = ad::LayerNormRows(ad::Add(x, drop(f)), ad::Leaf(L.ln2_gain), ad::Leaf(L.ln2_bias));
  }

  ad::Matrix pool = ad::Matrix::Zero(batch, total);
  Eigen::Index at = 0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    pool.row(b).segment(at, seg[b]).setConstant(1.0 / seg[b]);
    at += seg[b];
  }
  fr.pooled = ad::MatMul(ad::Constant(std::move(pool)), x);
  fr.tokens = x;
  fr.token_counts = seg;

  ad::Matrix present(batch, d);
  for (Eigen::Index b = 0; b < batch; ++b)
    present.row(b).setConstant(fr.mask_count[b] == 1 ? 1.0 : 0.0);
  fr.mask_hidden = ad::MaskMul(ad::GatherRows(x, mask_rows), present);
  return fr;
}

MlmHeadView ToyEncoder::mlm_head_view() const {
  MlmHeadView view;
  view.weight = &embedding_.value();
  view.lookup = [this](std::string_view s) {
    std::vector<int> ids = Tokenize(s);
    if (ids.empty() && !Trim(s).empty()) ids.push_back(kUnk);
    return ids;
  };
  return view;
}

std::vector<ad::Parameter *> ToyEncoder::parameters() {
  std::vector<ad::Parameter *> out{&embedding_};
  for (auto &L : layers_)
    for (ad::Parameter *p : {&L.wq, &L.wk, &L.wv, &L.wo, &L.ln1_gain, &L.ln1_bias, &L.w1,
                             &L.b1, &L.w2, &L.b2, &L.ln2_gain, &L.ln2_bias})
      out.push_back(p);
  return out;
}

void ToyEncoder::SetFreeze(FreezeMode mode) {
  config_.freeze = mode;
  const std::string last = "encoder.layer" + std::to_string(config_.num_layers - 1) + ".";
  for (ad::Parameter *p : parameters()) {
    bool trainable = mode == FreezeMode::kNone ||
                     (mode == FreezeMode::kAllButLast && p->name().rfind(last, 0) == 0);
    p->set_trainable(trainable);
  }
}

std::unique_ptr<Encoder> ToyEncoder::Clone() const {
  return std::make_unique<ToyEncoder>(*this);
}

}  // namespace gid
