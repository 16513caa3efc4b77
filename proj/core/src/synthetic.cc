// core/src/synthetic.cc

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

#include "gid/synthetic.h"

#include <array>
#include <string>

#include "gid/errors.h"
#include "gid/util.h"

namespace gid {

namespace {

const std::vector<std::string> kFiller = {"please", "my",    "the", "a",    "need",  "want",
                                         "help",   "with",  "is",  "there", "this", "today",
                                         "just",   "can",   "you", "about", "me"};

std::string Join(const std::vector<std::string> &words) {
  std::string out;
  for (const auto &w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Utterances for a shaped corpus: the label's own word plus filler.
std::vector<Utterance> ShapedRecords(const std::vector<std::string> &labels,
                                     const std::vector<std::string> &domains, int per_label,
                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Utterance> out;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    for (int i = 0; i < per_label; ++i) {
      std::vector<std::string> words{labels[l]};
      for (int f = 0; f < 4; ++f) words.push_back(kFiller[rng.Index(kFiller.size())]);
      rng.Shuffle(words);
      Utterance u;
      u.id = "u" + std::to_string(out.size());
      u.text = Join(words);
      u.label = labels[l];
      if (!domains.empty()) u.domain = domains[l];
      out.push_back(std::move(u));
    }
  }
  return out;
}

struct Intent {
  const char *name;
  std::array<const char *, 6> cues;  // published as meta keywords in this order
};

// Every word here maps to its own token id under the default toy vocabulary.
const std::array<Intent, 8> kIntents = {{
    {"card_arrival", {"card", "arrive", "parcel", "post", "mailed", "courier"}},
    {"exchange_rate", {"rate", "fx", "euros", "convert", "yen", "pounds"}},
    {"lost_card", {"lost", "stolen", "gone", "wallet", "vanish", "robbed"}},
    {"top_up_failed", {"topup", "failed", "reload", "credit", "bounce", "retry"}},
    {"pin_blocked", {"pin", "locked", "code", "digits", "passwd", "frozen"}},
    {"refund_request", {"refund", "return", "shop", "repay", "goods", "back"}},
    {"transfer_pending", {"wire", "stuck", "sent", "hold", "slow", "delay"}},
    {"balance_check", {"funds", "total", "sum", "left", "view", "check"}},
}};

const std::array<std::array<const char *, 4>, 5> kStyles = {{
    {"hey", "yo", "dude", "quick"},
    {"kindly", "sir", "dear", "madam"},
    {"urgent", "asap", "now", "hurry"},
    {"hmm", "maybe", "unsure", "guess"},
    {"ugh", "mad", "upset", "again"},
}};

}  // namespace

Corpus BankingShapedCorpus(std::uint64_t seed, int per_label) {
  std::vector<std::string> labels;
  for (int i = 0; i < 77; ++i) labels.push_back("intent" + std::to_string(i));
  return CorpusFromRecords(ShapedRecords(labels, {}, per_label, seed));
}

Corpus ClincShapedCorpus(std::uint64_t seed, int per_label) {
  std::vector<std::string> labels, domains;
  for (int d = 0; d < 10; ++d)
    for (int i = 0; i < 15; ++i) {
      labels.push_back("d" + std::to_string(d) + "_intent" + std::to_string(i));
      domains.push_back("domain" + std::to_string(d));
    }
  return CorpusFromRecords(ShapedRecords(labels, domains, per_label, seed));
}

DeskTask MakeDeskTask(std::uint64_t seed, const DeskTaskOptions &o) {
  if (o.per_intent < 1 || o.cues_per_utterance < 1 || o.cues_per_utterance > 6 ||
      o.published_cues < 1 || o.published_cues > 6 || o.style_words < 0 || o.style_words > 4 ||
      o.filler_words < 0)
    throw ConfigError("desk task options out of range");
  Rng rng(seed);
  std::vector<Utterance> records;
  DeskTask task;
  for (const auto &intent : kIntents) {
    for (int i = 0; i < o.per_intent; ++i) {
      std::vector<std::string> words;
      std::vector<std::size_t> cue{0, 1, 2, 3, 4, 5};
      rng.Shuffle(cue);
      for (int c = 0; c < o.cues_per_utterance; ++c)
        words.push_back(intent.cues[cue[static_cast<std::size_t>(c)]]);
      const auto &style = kStyles[rng.Index(kStyles.size())];
      std::vector<std::size_t> sw{0, 1, 2, 3};
      rng.Shuffle(sw);
      for (int w = 0; w < o.style_words; ++w) words.push_back(style[sw[static_cast<std::size_t>(w)]]);
      for (int f = 0; f < o.filler_words; ++f) words.push_back(kFiller[rng.Index(kFiller.size())]);
      rng.Shuffle(words);
      Utterance u;
      u.id = "desk" + std::to_string(records.size());
      u.text = Join(words);
      u.label = intent.name;
      records.push_back(std::move(u));
    }
    MetaInfoRecord r;
    r.category = intent.name;
    r.kind = MetaKind::kKeywords;
    r.k = o.published_cues;
    for (int c = 0; c < o.published_cues; ++c)
      r.items.emplace_back(intent.cues[static_cast<std::size_t>(c)]);
    r.provenance = Provenance::kFixture;
    task.meta.push_back(std::move(r));
  }
  task.corpus = CorpusFromRecords(std::move(records));
  return task;
}

RunConfig DeskRunConfig() {
  RunConfig c;
  c.encoder.dim = 64;
  c.encoder.ffn_dim = 128;
  c.train.learning_rate = 1e-3;
  c.train.warmup_steps = 10;
  c.meta.kind = MetaKind::kKeywords;
  c.meta.k = DeskTaskOptions{}.published_cues;
  return c;
}

}  // namespace gid
