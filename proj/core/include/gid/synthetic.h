// core/include/gid/synthetic.h

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

#ifndef GID_SYNTHETIC_H_
#define GID_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "gid/config.h"
#include "gid/dataset.h"
#include "gid/meta_knowledge.h"

namespace gid {

/// 77 single-domain labels, `per_label` utterances each.
Corpus BankingShapedCorpus(std::uint64_t seed, int per_label = 4);

/// 150 labels over 10 domains (15 each), `per_label` utterances each.
Corpus ClincShapedCorpus(std::uint64_t seed, int per_label = 4);

/// Eight banking intents. Each utterance mixes cue words of its intent with
/// words of a randomly drawn speaking style and filler.
/// Styles are shared across intents, so they form a second, irrelevant
/// cluster structure.
struct DeskTask {
  Corpus corpus;
  /// Keyword records per intent (fixture provenance).
  std::vector<MetaInfoRecord> meta;
  /// OOD ratio giving 3 IND / 5 OOD intents.
  static constexpr double kOodRatio = 0.65;
};

struct DeskTaskOptions {
  int per_intent = 60;
  /// Cue words drawn per utterance, out of the intent's six.
  int cues_per_utterance = 3;
  /// How many of the six cues are published as meta keywords (1..6).
  int published_cues = 4;
  int style_words = 2;
  int filler_words = 3;
};

DeskTask MakeDeskTask(std::uint64_t seed, const DeskTaskOptions &options = {});

/// Run config sized for the desk task: a wider toy encoder, a short warmup
/// and keyword meta-information.
RunConfig DeskRunConfig();

}  // namespace gid

#endif  // GID_SYNTHETIC_H_
