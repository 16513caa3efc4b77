// core/src/dataset.cc

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

#include "gid/dataset.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "gid/errors.h"
#include "gid/util.h"
#include "json.hpp"

namespace gid {

using nlohmann::json;

namespace {

std::string Lower(std::string s) {
  for (auto &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// RFC 4180 style: quoted fields may contain commas, doubled quotes and newlines.
std::vector<std::vector<std::string>> ParseCsv(const std::string &data) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (quoted) throw SchemaError("unterminated quoted field in csv");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string &path, const std::string &data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write " + path);
  out << data;
}

json RecordJson(const Utterance &u, bool with_label) {
  json j;
  j["id"] = u.id;
  j["text"] = u.text;
  if (with_label && u.label) j["label"] = *u.label;
  return j;
}

}  // namespace

std::vector<std::string> Corpus::Domains() const {
  std::set<std::string> d;
  for (const auto &[label, dom] : domain_of) d.insert(dom);
  return {d.begin(), d.end()};
}

std::string SetupName(Setup s) {
  switch (s) {
    case Setup::kSD: return "SD";
    case Setup::kCD: return "CD";
    case Setup::kMD: return "MD";
  }
  return "?";
}

Setup ParseSetup(const std::string &name) {
  std::string n = Lower(name);
  if (n == "sd") return Setup::kSD;
  if (n == "cd") return Setup::kCD;
  if (n == "md") return Setup::kMD;
  throw ConfigError("unknown setup '" + name + "' (expected sd, cd or md)");
}

CorpusFormat FormatForPath(const std::string &path) {
  auto dot = path.rfind('.');
  if (dot != std::string::npos && Lower(path.substr(dot)) == ".csv")
    return CorpusFormat::kCsv;
  return CorpusFormat::kJsonl;
}

Corpus CorpusFromRecords(std::vector<Utterance> records) {
  if (records.empty()) throw CorpusError("corpus is empty");
  Corpus c;
  std::set<std::string> ids, labels;
  std::size_t with_domain = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto &r = records[i];
    if (r.id.empty()) r.id = "r" + std::to_string(i);
    if (!ids.insert(r.id).second) throw CorpusError("duplicate record id '" + r.id + "'");
    if (Trim(r.text).empty()) throw SchemaError("record '" + r.id + "' has empty text");
    if (!r.label || r.label->empty())
      throw SchemaError("record '" + r.id + "' is missing field 'label'");
    labels.insert(*r.label);
    if (r.domain) {
      ++with_domain;
      auto [it, fresh] = c.domain_of.emplace(*r.label, *r.domain);
      if (!fresh && it->second != *r.domain)
        throw SchemaError("label '" + *r.label + "' appears in two domains");
    }
  }
  if (with_domain != 0 && with_domain != records.size())
    throw SchemaError("either every record or no record may carry a domain");
  c.labels.assign(labels.begin(), labels.end());
  c.records = std::move(records);
  return c;
}

void SaveCorpus(const Corpus &corpus, const std::string &path) {
  std::string out;
  for (const auto &u : corpus.records) {
    json j = RecordJson(u, true);
    if (u.domain) j["domain"] = *u.domain;
    if (u.split) j["split"] = *u.split;
    out += j.dump() + "\n";
  }
  WriteFile(path, out);
}

Corpus LoadCorpus(const std::string &path, CorpusFormat format) {
  const std::string data = ReadFile(path);
  std::vector<Utterance> records;
  if (format == CorpusFormat::kJsonl) {
    std::istringstream in(data);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (Trim(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error &e) {
        throw SchemaError("line " + std::to_string(lineno) + ": " + e.what());
      }
      const std::string where =
          j.contains("id") ? "record '" + j["id"].get<std::string>() + "'"
                           : "record at line " + std::to_string(lineno);
      for (const char *field : {"text", "label"})
        if (!j.contains(field) || !j[field].is_string())
          throw SchemaError(where + " is missing field '" + field + "'");
      Utterance u;
      if (j.contains("id")) u.id = j["id"].get<std::string>();
      u.text = j["text"].get<std::string>();
      u.label = j["label"].get<std::string>();
      if (j.contains("domain")) u.domain = j["domain"].get<std::string>();
      if (j.contains("split")) u.split = j["split"].get<std::string>();
      records.push_back(std::move(u));
    }
  } else {
    auto rows = ParseCsv(data);
    if (rows.empty()) throw CorpusError(path + " is empty");
    const auto &header = rows[0];
    auto col = [&](const std::string &name) -> int {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (Lower(Trim(header[i])) == name) return static_cast<int>(i);
      return -1;
    };
    int ti = col("text"), li = col("label"), ii = col("id"), di = col("domain"),
        si = col("split");
    if (ti < 0 || li < 0) throw SchemaError("csv header must name text and label columns");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto &row = rows[r];
      const std::string where = "record at csv row " + std::to_string(r + 1);
      auto get = [&](int i) -> std::optional<std::string> {
        if (i < 0 || i >= static_cast<int>(row.size())) return std::nullopt;
        return row[i];
      };
      auto text = get(ti), label = get(li);
      if (!text) throw SchemaError(where + " is missing field 'text'");
      if (!label) throw SchemaError(where + " is missing field 'label'");
      Utterance u;
      if (auto id = get(ii)) u.id = *id;
      u.text = *text;
      u.label = *label;
      if (auto d = get(di)) u.domain = *d;
      if (auto s = get(si); s && !s->empty()) u.split = *s;
      records.push_back(std::move(u));
    }
  }
  if (records.empty()) throw CorpusError(path + " contains no records");
  return CorpusFromRecords(std::move(records));
}

LabelSpace::LabelSpace(std::vector<std::string> ind, std::vector<std::string> ood,
                       std::map<std::string, std::string> domain_of)
    : ind_(std::move(ind)), ood_(std::move(ood)), domain_of_(std::move(domain_of)) {
  if (ind_.empty()) throw ConfigError("label space needs at least one IND label");
  if (ood_.empty()) throw ConfigError("label space needs at least one OOD label");
  int i = 0;
  for (const auto &l : ind_) index_[l] = i++;
  for (const auto &l : ood_) {
    if (index_.count(l)) throw ConfigError("label '" + l + "' is both IND and OOD");
    index_[l] = i++;
  }
}

int LabelSpace::IndexOf(const std::string &label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

const std::string &LabelSpace::NameOf(int index) const {
  if (index < 0 || index >= static_cast<int>(size()))
    throw ShapeError("label index " + std::to_string(index) + " out of range");
  return index < static_cast<int>(ind_.size()) ? ind_[index] : ood_[index - ind_.size()];
}

std::vector<std::string> LabelSpace::All() const {
  std::vector<std::string> all = ind_;
  all.insert(all.end(), ood_.begin(), ood_.end());
  return all;
}

SplitResult MakeSplit(const Corpus &corpus, Setup setup, double ood_ratio,
                      std::uint64_t seed) {
  if (!(ood_ratio > 0.0 && ood_ratio < 1.0))
    throw ConfigError("ood_ratio must lie in (0, 1)");
  const auto domains = corpus.Domains();
  if (setup == Setup::kSD && domains.size() > 1)
    throw ConfigError("SD setup requires a single-domain corpus");
  if (setup != Setup::kSD && domains.size() < 2)
    throw ConfigError(SetupName(setup) + " setup requires a multi-domain corpus");

  Rng rng(MixSeed(seed, Fnv1a64("gid-split")));
  std::set<std::string> ood_set;
  if (setup == Setup::kCD) {
    const std::size_t k = FloorRatio(ood_ratio, domains.size());
    if (k == 0 || k == domains.size())
      throw ConfigError("ood_ratio " + std::to_string(ood_ratio) + " leaves no " +
                        (k == 0 ? "OOD" : "IND") + " domain");
    auto order = domains;
    rng.Shuffle(order);
    std::set<std::string> ood_domains(order.begin(), order.begin() + k);
    for (const auto &[label, dom] : corpus.domain_of)
      if (ood_domains.count(dom)) ood_set.insert(label);
  } else {
    const std::size_t k = FloorRatio(ood_ratio, corpus.labels.size());
    if (k == 0 || k == corpus.labels.size())
      throw ConfigError("ood_ratio " + std::to_string(ood_ratio) + " leaves no " +
                        (k == 0 ? "OOD" : "IND") + " label");
    auto order = corpus.labels;
    rng.Shuffle(order);
    ood_set.insert(order.begin(), order.begin() + k);
  }
  std::vector<std::string> ind, ood;
  for (const auto &l : corpus.labels) (ood_set.count(l) ? ood : ind).push_back(l);

  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    by_label[*corpus.records[i].label].push_back(i);

  // Stratified holdout: per label, shuffle and take floor(frac * n), at least
  // one when the label has two or more candidates.
  auto holdout = [&rng](std::vector<std::size_t> idx, double frac,
                        std::set<std::size_t> &out) {
    if (idx.size() < 2) return;
    rng.Shuffle(idx);
    std::size_t n = std::max<std::size_t>(1, FloorRatio(frac, idx.size()));
    out.insert(idx.begin(), idx.begin() + n);
  };

  const bool published_test = std::any_of(
      corpus.records.begin(), corpus.records.end(),
      [](const Utterance &u) { return u.split && Lower(*u.split) == "test"; });
  std::set<std::size_t> test_idx, dev_idx;
  for (const auto &[label, idx] : by_label) {
    if (published_test) {
      for (auto i : idx)
        if (corpus.records[i].split && Lower(*corpus.records[i].split) == "test")
          test_idx.insert(i);
    } else {
      holdout(idx, 0.2, test_idx);
    }
  }
  for (const auto &label : ind) {
    std::vector<std::size_t> remaining;
    for (auto i : by_label[label])
      if (!test_idx.count(i)) remaining.push_back(i);
    holdout(remaining, 0.1, dev_idx);
  }

  SplitResult result;
  GidSplit &s = result.split;
  s.label_space = LabelSpace(ind, ood, corpus.domain_of);
  s.setup = setup;
  s.ood_ratio = ood_ratio;
  s.seed = seed;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const Utterance &r = corpus.records[i];
    Utterance u{r.id, r.text, r.label, std::nullopt, std::nullopt};
    if (test_idx.count(i)) {
      s.test.push_back(std::move(u));
    } else if (ood_set.count(*r.label)) {
      result.sealed.labels[r.id] = *r.label;
      u.label.reset();
      s.ood_train.push_back(std::move(u));
    } else if (dev_idx.count(i)) {
      s.dev.push_back(std::move(u));
    } else {
      s.ind_train.push_back(std::move(u));
    }
  }
  return result;
}

std::string SplitManifestJson(const GidSplit &split) {
  json j;
  j["format"] = "gid-split/1";
  j["setup"] = SetupName(split.setup);
  j["ood_ratio"] = split.ood_ratio;
  j["seed"] = split.seed;
  j["label_space"]["ind_labels"] = split.label_space.ind_labels();
  j["label_space"]["ood_labels"] = split.label_space.ood_labels();
  j["label_space"]["domain_of"] = split.label_space.domain_of();
  auto dump = [](const std::vector<Utterance> &v, bool labels) {
    json a = json::array();
    for (const auto &u : v) a.push_back(RecordJson(u, labels));
    return a;
  };
  j["partitions"]["ind_train"] = dump(split.ind_train, true);
  j["partitions"]["ood_train"] = dump(split.ood_train, false);
  j["partitions"]["dev"] = dump(split.dev, true);
  j["partitions"]["test"] = dump(split.test, true);
  return j.dump(1) + "\n";
}

std::string SplitHash(const GidSplit &split) {
  return HexDigest(Fnv1a64(SplitManifestJson(split)));
}

void SaveSplit(const GidSplit &split, const std::string &path) {
  WriteFile(path, SplitManifestJson(split));
}

GidSplit LoadSplit(const std::string &path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error &e) {
    throw SchemaError(path + ": " + e.what());
  }
  try {
    if (j.at("format") != "gid-split/1") throw SchemaError(path + ": unknown format");
    GidSplit s;
    s.setup = ParseSetup(j.at("setup").get<std::string>());
    s.ood_ratio = j.at("ood_ratio").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto &ls = j.at("label_space");
    s.label_space = LabelSpace(ls.at("ind_labels").get<std::vector<std::string>>(),
                               ls.at("ood_labels").get<std::vector<std::string>>(),
                               ls.at("domain_of").get<std::map<std::string, std::string>>());
    auto load = [&](const char *name, bool labelled) {
      std::vector<Utterance> v;
      for (const auto &r : j.at("partitions").at(name)) {
        Utterance u;
        u.id = r.at("id").get<std::string>();
        u.text = r.at("text").get<std::string>();
        if (labelled) {
          u.label = r.at("label").get<std::string>();
          if (s.label_space.IndexOf(*u.label) < 0)
            throw SchemaError("record '" + u.id + "' has label outside the label space");
        } else if (r.contains("label")) {
          throw SchemaError("ood_train record '" + u.id + "' carries a label");
        }
        v.push_back(std::move(u));
      }
      return v;
    };
    s.ind_train = load("ind_train", true);
    s.ood_train = load("ood_train", false);
    s.dev = load("dev", true);
    s.test = load("test", true);
    return s;
  } catch (const json::exception &e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string SealedJson(const SealedLabels &sealed, const std::string &split_hash) {
  json j;
  j["format"] = "gid-sealed/1";
  j["split_hash"] = split_hash;
  j["labels"] = sealed.labels;
  return j.dump(1) + "\n";
}

void SaveSealed(const SealedLabels &sealed, const std::string &split_hash,
                const std::string &path) {
  WriteFile(path, SealedJson(sealed, split_hash));
}

SealedLabels LoadSealed(const std::string &path) {
  try {
    json j = json::parse(ReadFile(path));
    if (j.at("format") != "gid-sealed/1") throw SchemaError(path + ": unknown format");
    SealedLabels s;
    s.labels = j.at("labels").get<std::map<std::string, std::string>>();
    return s;
  } catch (const json::exception &e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::vector<BatchElement> PartitionElements(const GidSplit &split, Partition partition) {
  const auto &ls = split.label_space;
  auto labelled = [&](const std::vector<Utterance> &v) {
    std::vector<BatchElement> out;
    for (const auto &u : v) {
      int idx = ls.IndexOf(*u.label);
      out.push_back({u.id, u.text, idx, ls.IsInd(idx) ? Origin::kInd : Origin::kOod});
    }
    return out;
  };
  auto unlabelled = [&](const std::vector<Utterance> &v) {
    std::vector<BatchElement> out;
    for (const auto &u : v) out.push_back({u.id, u.text, -1, Origin::kOod});
    return out;
  };
  switch (partition) {
    case Partition::kIndTrain: return labelled(split.ind_train);
    case Partition::kOodTrain: return unlabelled(split.ood_train);
    case Partition::kDev: return labelled(split.dev);
    case Partition::kTest: return labelled(split.test);
    case Partition::kMixed: {
      auto a = labelled(split.ind_train);
      auto b = unlabelled(split.ood_train);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
  }
  return {};
}

BatchIterator::BatchIterator(const GidSplit &split, Partition partition,
                             std::size_t batch_size,
                             std::optional<std::uint64_t> shuffle_seed)
    : batch_size_(batch_size) {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (partition != Partition::kMixed) {
    elements_ = PartitionElements(split, partition);
    if (shuffle_seed) Rng(*shuffle_seed).Shuffle(elements_);
  } else {
    auto a = PartitionElements(split, Partition::kIndTrain);
    auto b = PartitionElements(split, Partition::kOodTrain);
    if (shuffle_seed) {
      Rng rng(*shuffle_seed);
      rng.Shuffle(a);
      rng.Shuffle(b);
    }
    // Proportional interleave: take from the source whose consumed fraction
    // (at the midpoint of the next item) is smaller.
    const std::size_t na = a.size(), nb = b.size();
    std::size_t ia = 0, ib = 0;
    while (ia < na || ib < nb) {
      bool take_a = ib >= nb || (ia < na && (2 * ia + 1) * nb <= (2 * ib + 1) * na);
      elements_.push_back(take_a ? std::move(a[ia++]) : std::move(b[ib++]));
    }
  }
  if (elements_.empty()) throw IterationError("partition is empty");
}

std::optional<Batch> BatchIterator::Next() {
  if (pos_ >= elements_.size()) return std::nullopt;
  std::size_t end = std::min(elements_.size(), pos_ + batch_size_);
  Batch b(elements_.begin() + pos_, elements_.begin() + end);
  pos_ = end;
  return b;
}

std::size_t BatchIterator::num_batches() const {
  return (elements_.size() + batch_size_ - 1) / batch_size_;
}

}  // namespace gid
