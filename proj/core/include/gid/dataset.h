// core/include/gid/dataset.h

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

#ifndef GID_DATASET_H_
#define GID_DATASET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gid {

/// One intent utterance. `label` is empty for unlabeled records.
struct Utterance {
  std::string id;
  std::string text;
  std::optional<std::string> label;
  /// Optional domain tag (multi-domain corpora).
  std::optional<std::string> domain;
  /// Optional published split tag, "train" or "test".
  std::optional<std::string> split;
};

struct Corpus {
  std::vector<Utterance> records;
  /// Deduplicated, sorted label inventory.
  std::vector<std::string> labels;
  /// label -> domain, filled only when every record carries a domain.
  std::map<std::string, std::string> domain_of;

  std::vector<std::string> Domains() const;
};

enum class CorpusFormat { kJsonl, kCsv };
enum class Setup { kSD, kCD, kMD };

std::string SetupName(Setup s);
/// Accepts "sd"/"SD", "cd", "md"; throws ConfigError otherwise.
Setup ParseSetup(const std::string &name);
/// Picks the format from the file extension (.csv vs anything else).
CorpusFormat FormatForPath(const std::string &path);

/// Loads a corpus. jsonl records need "text" and "label" (optional "id",
/// "domain", "split"); csv needs a header with text,label columns.
Corpus LoadCorpus(const std::string &path, CorpusFormat format);
Corpus CorpusFromRecords(std::vector<Utterance> records);
/// Writes jsonl that LoadCorpus reads back.
void SaveCorpus(const Corpus &corpus, const std::string &path);

/// IND labels first, then OOD labels; each block sorted.
class LabelSpace {
 public:
  LabelSpace() = default;
  LabelSpace(std::vector<std::string> ind, std::vector<std::string> ood,
             std::map<std::string, std::string> domain_of = {});

  const std::vector<std::string> &ind_labels() const { return ind_; }
  const std::vector<std::string> &ood_labels() const { return ood_; }
  const std::map<std::string, std::string> &domain_of() const { return domain_of_; }
  std::size_t num_ind() const { return ind_.size(); }
  std::size_t num_ood() const { return ood_.size(); }
  std::size_t size() const { return ind_.size() + ood_.size(); }

  /// Joint index of a label, or -1.
  int IndexOf(const std::string &label) const;
  const std::string &NameOf(int index) const;
  bool IsInd(int index) const { return index >= 0 && index < static_cast<int>(ind_.size()); }
  /// Joint label order.
  std::vector<std::string> All() const;

 private:
  std::vector<std::string> ind_;
  std::vector<std::string> ood_;
  std::map<std::string, std::string> domain_of_;
  std::map<std::string, int> index_;
};

/// Gold labels of the unlabeled OOD training records. Only evaluation may
/// read these; the trainer never receives this type.
struct SealedLabels {
  std::map<std::string, std::string> labels;  // record id -> label
};

struct GidSplit {
  LabelSpace label_space;
  std::vector<Utterance> ind_train;
  std::vector<Utterance> ood_train;  // labels stripped
  std::vector<Utterance> dev;
  std::vector<Utterance> test;
  Setup setup = Setup::kSD;
  double ood_ratio = 0.0;
  std::uint64_t seed = 0;
};

struct SplitResult {
  GidSplit split;
  SealedLabels sealed;
};

/// Deterministic GID split. SD/MD partition by intent, CD by domain; the
/// OOD unit count is floor(ood_ratio * units).
SplitResult MakeSplit(const Corpus &corpus, Setup setup, double ood_ratio,
                      std::uint64_t seed);

/// Manifest JSON (canonical, byte-stable) and its hash.
std::string SplitManifestJson(const GidSplit &split);
std::string SplitHash(const GidSplit &split);
void SaveSplit(const GidSplit &split, const std::string &path);
GidSplit LoadSplit(const std::string &path);

std::string SealedJson(const SealedLabels &sealed, const std::string &split_hash);
void SaveSealed(const SealedLabels &sealed, const std::string &split_hash,
                const std::string &path);
SealedLabels LoadSealed(const std::string &path);

enum class Origin { kInd, kOod };

struct BatchElement {
  std::string id;
  std::string text;
  /// Joint label index; -1 where unknown (OOD training records).
  int label = -1;
  Origin origin = Origin::kInd;
};

using Batch = std::vector<BatchElement>;

enum class Partition { kIndTrain, kOodTrain, kMixed, kDev, kTest };

/// Single-consumer batch stream over one partition of a split. The mixed
/// partition interleaves IND and OOD records proportionally to their sizes.
class BatchIterator {
 public:
  BatchIterator(const GidSplit &split, Partition partition,
                std::size_t batch_size, std::optional<std::uint64_t> shuffle_seed);

  std::optional<Batch> Next();
  std::size_t num_batches() const;
  std::size_t num_elements() const { return elements_.size(); }

 private:
  std::vector<BatchElement> elements_;
  std::size_t batch_size_;
  std::size_t pos_ = 0;
};

/// All elements of a partition, unshuffled.
std::vector<BatchElement> PartitionElements(const GidSplit &split, Partition partition);

}  // namespace gid

#endif  // GID_DATASET_H_
