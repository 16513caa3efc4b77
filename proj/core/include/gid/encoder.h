// core/include/gid/encoder.h

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

#ifndef GID_ENCODER_H_
#define GID_ENCODER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gid/autodiff.h"

namespace gid {

/// Suffix appended to every utterance before encoding; `{mask}` is replaced
/// by the backend's placeholder.
inline constexpr std::string_view kTemplateTail =
    "In this sentence, the intent is about {mask}.";

/// "<text>. In this sentence, the intent is about [MASK]." No extra period is
/// inserted when the text already ends with terminal punctuation.
std::string ApplyTemplate(std::string_view text, std::string_view mask_token = "[MASK]");

enum class FreezeMode { kNone, kAll, kAllButLast };
std::string FreezeModeName(FreezeMode m);
/// "none", "plm_all", "plm_but_last".
FreezeMode ParseFreezeMode(const std::string &name);

struct EncoderConfig {
  std::string backend = "toy";
  int dim = 16;
  int vocab_size = 1000;
  int num_layers = 2;
  int ffn_dim = 32;
  double dropout = 0.1;
  int max_length = 128;
  std::uint64_t seed = 1234;
  FreezeMode freeze = FreezeMode::kNone;
};

struct EncoderOutput {
  Eigen::VectorXd pooled;
  /// Present iff the input held exactly one mask placeholder.
  std::optional<Eigen::VectorXd> mask_hidden;
  std::uint64_t view = 0;
};

/// Differentiable batch forward pass.
struct ForwardResult {
  ad::Var pooled;       // B x d, mean of final-layer token states
  ad::Var mask_hidden;  // B x d; rows without a unique mask hold zeros
  std::vector<int> mask_count;
  ad::Var tokens;                 // final-layer states of every input, concatenated
  std::vector<int> token_counts;  // rows of `tokens` per input
};

/// Read-only view of the MLM decoder. Row t is the d-dimensional output
/// weight of vocabulary token t.
struct MlmHeadView {
  const ad::Matrix *weight = nullptr;
  std::function<std::vector<int>(std::string_view)> lookup;

  Eigen::Index vocab_size() const { return weight->rows(); }
  Eigen::Index dim() const { return weight->cols(); }
};

class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual const EncoderConfig &config() const = 0;
  int dim() const { return config().dim; }
  int vocab_size() const { return config().vocab_size; }
  int max_length() const { return config().max_length; }
  virtual std::string mask_token() const = 0;

  std::string Template(std::string_view text) const {
    return ApplyTemplate(text, mask_token());
  }

  virtual ForwardResult Forward(const std::vector<std::string> &texts,
                                std::uint64_t view_seed, bool dropout_active) = 0;

  /// Value-only encode; order of outputs follows the input.
  std::vector<EncoderOutput> Encode(const std::vector<std::string> &texts,
                                    std::uint64_t view_seed, bool dropout_active);

  /// Throws CapabilityError for backends without a mask-prediction head.
  virtual MlmHeadView mlm_head_view() const;

  virtual std::vector<ad::Parameter *> parameters() = 0;
  virtual void SetFreeze(FreezeMode mode) = 0;
  virtual std::unique_ptr<Encoder> Clone() const = 0;
};

/// Backend registry; throws ConfigError for unknown names.
std::unique_ptr<Encoder> MakeEncoder(const EncoderConfig &config);

/// Small seeded transformer used for tests and desk-scale runs: hash-derived
/// token embeddings, post-LN self-attention layers and an MLM decoder tied to
/// the embedding table.
class ToyEncoder : public Encoder {
 public:
  explicit ToyEncoder(EncoderConfig config);

  const EncoderConfig &config() const override { return config_; }
  std::string mask_token() const override { return "[MASK]"; }

  ForwardResult Forward(const std::vector<std::string> &texts,
                        std::uint64_t view_seed, bool dropout_active) override;
  MlmHeadView mlm_head_view() const override;
  std::vector<ad::Parameter *> parameters() override;
  void SetFreeze(FreezeMode mode) override;
  std::unique_ptr<Encoder> Clone() const override;

  static constexpr int kPad = 0, kUnk = 1, kCls = 2, kSep = 3, kMask = 4;
  static constexpr int kReserved = 5;
  static constexpr std::size_t kPieceChars = 6;

  /// Word-piece ids of a surface string (no [CLS]/[SEP]).
  std::vector<int> Tokenize(std::string_view text) const;
  /// Full id sequence with [CLS]/[SEP] and the truncation policy applied.
  std::vector<int> TokenizeForModel(std::string_view text) const;

 private:
  struct Layer {
    ad::Parameter wq, wk, wv, wo, ln1_gain, ln1_bias, w1, b1, w2, b2, ln2_gain, ln2_bias;
  };

  int PieceId(std::string_view piece, bool continuation) const;

  EncoderConfig config_;
  ad::Parameter embedding_;
  std::vector<Layer> layers_;
};

}  // namespace gid

#endif  // GID_ENCODER_H_
