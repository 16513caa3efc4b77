// tests/test_dataset.cc

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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "gid/errors.h"
#include "gid/synthetic.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("gid_dataset_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string File(const std::string &name, const std::string &content) const {
    const auto p = (path / name).string();
    std::ofstream(p) << content;
    return p;
  }
};

gid::Corpus Numbered(int n, int labels) {
  std::vector<gid::Utterance> rs;
  for (int i = 0; i < n; ++i)
    rs.push_back({"r" + std::to_string(i), "text " + std::to_string(i),
                  "l" + std::to_string(i % labels), std::nullopt, std::nullopt});
  return gid::CorpusFromRecords(rs);
}

std::set<std::string> LabelsOf(const std::vector<gid::Utterance> &us) {
  std::set<std::string> out;
  for (const auto &u : us)
    if (u.label) out.insert(*u.label);
  return out;
}

}  // namespace

TEST_CASE("loading corpora") {
  TempDir dir;
  SUBCASE("one jsonl record") {
    const auto c = gid::LoadCorpus(dir.File("one.jsonl", R"({"text":"hi","label":"greet"})" "\n"),
                                   gid::CorpusFormat::kJsonl);
    CHECK(c.records.size() == 1);
    CHECK(c.labels == std::vector<std::string>{"greet"});
  }
  SUBCASE("csv with a header") {
    const auto p = dir.File("c.csv", "text,label\n\"hello, there\",greet\nbye,leave\n");
    CHECK(gid::FormatForPath(p) == gid::CorpusFormat::kCsv);
    const auto c = gid::LoadCorpus(p, gid::CorpusFormat::kCsv);
    REQUIRE(c.records.size() == 2);
    CHECK(c.records[0].text == "hello, there");
    CHECK(c.labels == std::vector<std::string>{"greet", "leave"});
  }
  SUBCASE("missing label is a schema error") {
    CHECK_THROWS_AS(gid::LoadCorpus(dir.File("bad.jsonl", R"({"text":"hi"})" "\n"),
                                    gid::CorpusFormat::kJsonl),
                    gid::SchemaError);
  }
  SUBCASE("empty file is a corpus error") {
    CHECK_THROWS_AS(gid::LoadCorpus(dir.File("empty.jsonl", ""), gid::CorpusFormat::kJsonl),
                    gid::CorpusError);
  }
  SUBCASE("save then load keeps every field") {
    const auto c = gid::ClincShapedCorpus(2, 1);
    const auto p = (dir.path / "rt.jsonl").string();
    gid::SaveCorpus(c, p);
    const auto back = gid::LoadCorpus(p, gid::CorpusFormat::kJsonl);
    REQUIRE(back.records.size() == c.records.size());
    for (std::size_t i = 0; i < c.records.size(); ++i) {
      CHECK(back.records[i].id == c.records[i].id);
      CHECK(back.records[i].text == c.records[i].text);
      CHECK(back.records[i].label == c.records[i].label);
      CHECK(back.records[i].domain == c.records[i].domain);
    }
    CHECK(back.domain_of == c.domain_of);
  }
}

TEST_CASE("shaped corpora have the published inventories") {
  CHECK(gid::BankingShapedCorpus(1).labels.size() == 77);
  const auto clinc = gid::ClincShapedCorpus(1);
  CHECK(clinc.labels.size() == 150);
  CHECK(clinc.Domains().size() == 10);
}

TEST_CASE("split label counts") {
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    const auto b = gid::MakeSplit(gid::BankingShapedCorpus(seed), gid::Setup::kSD, 0.6, seed);
    CHECK(b.split.label_space.num_ood() == 46);
    CHECK(b.split.label_space.num_ind() == 31);
    const auto clinc = gid::ClincShapedCorpus(seed);
    const auto cd = gid::MakeSplit(clinc, gid::Setup::kCD, 0.6, seed);
    std::set<std::string> ood_domains, ind_domains;
    for (const auto &l : cd.split.label_space.ood_labels()) ood_domains.insert(clinc.domain_of.at(l));
    for (const auto &l : cd.split.label_space.ind_labels()) ind_domains.insert(clinc.domain_of.at(l));
    CHECK(ood_domains.size() == 6);
    CHECK(ind_domains.size() == 4);
  }
}

TEST_CASE("ratios that empty a side are configuration errors") {
  const auto c = Numbered(20, 4);
  CHECK_THROWS_AS(gid::MakeSplit(c, gid::Setup::kSD, 0.1, 1), gid::ConfigError);
  CHECK_THROWS_AS(gid::MakeSplit(c, gid::Setup::kSD, 1.0, 1), gid::ConfigError);
  CHECK_THROWS_AS(gid::ParseSetup("xd"), gid::ConfigError);
}

TEST_CASE("split invariants hold over seeds and setups") {
  const auto banking = gid::BankingShapedCorpus(3);
  const auto clinc = gid::ClincShapedCorpus(3);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (auto [corpus, setup] : {std::pair{&banking, gid::Setup::kSD},
                                 std::pair{&clinc, gid::Setup::kMD},
                                 std::pair{&clinc, gid::Setup::kCD}}) {
      const auto r = gid::MakeSplit(*corpus, setup, 0.8, seed);
      const auto &ls = r.split.label_space;
      std::set<std::string> ind(ls.ind_labels().begin(), ls.ind_labels().end());
      std::set<std::string> ood(ls.ood_labels().begin(), ls.ood_labels().end());
      for (const auto &l : ind) CHECK(ood.count(l) == 0);

      std::set<std::string> all = ind;
      all.insert(ood.begin(), ood.end());
      CHECK(all == std::set<std::string>(corpus->labels.begin(), corpus->labels.end()));

      for (const auto &u : r.split.ood_train) {
        CHECK_FALSE(u.label.has_value());
        REQUIRE(r.sealed.labels.count(u.id) == 1);
        CHECK(ood.count(r.sealed.labels.at(u.id)) == 1);
      }
      for (const auto &l : LabelsOf(r.split.ind_train)) CHECK(ind.count(l) == 1);
      for (const auto &l : LabelsOf(r.split.dev)) CHECK(ind.count(l) == 1);
      CHECK(LabelsOf(r.split.test) == all);
    }
  }
}

TEST_CASE("split files and the sealed sidecar round-trip") {
  TempDir dir;
  const auto r = gid::MakeSplit(gid::BankingShapedCorpus(4), gid::Setup::kSD, 0.6, 4);
  const auto split_path = (dir.path / "split.json").string();
  const auto sealed_path = (dir.path / "sealed.json").string();
  gid::SaveSplit(r.split, split_path);
  gid::SaveSealed(r.sealed, gid::SplitHash(r.split), sealed_path);

  std::ifstream in(split_path);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text == gid::SplitManifestJson(r.split));
  const auto back = gid::LoadSplit(split_path);
  CHECK(gid::SplitHash(back) == gid::SplitHash(r.split));
  CHECK(gid::LoadSealed(sealed_path).labels == r.sealed.labels);
}

TEST_CASE("batches") {
  const auto r = gid::MakeSplit(Numbered(400, 8), gid::Setup::kSD, 0.5, 1);
  SUBCASE("130 elements in batches of 64") {
    gid::GidSplit s = r.split;
    s.ind_train.resize(130, s.ind_train.front());
    gid::BatchIterator it(s, gid::Partition::kIndTrain, 64, std::nullopt);
    std::vector<std::size_t> sizes;
    while (auto b = it.Next()) sizes.push_back(b->size());
    CHECK(sizes == std::vector<std::size_t>{64, 64, 2});
    CHECK(it.num_batches() == 3);
  }
  SUBCASE("mixed batches carry both origins") {
    gid::BatchIterator it(r.split, gid::Partition::kMixed, 16, 5);
    std::set<gid::Origin> seen;
    while (auto b = it.Next())
      for (const auto &e : *b) {
        seen.insert(e.origin);
        if (e.origin == gid::Origin::kOod) CHECK(e.label == -1);
        else CHECK(r.split.label_space.IsInd(e.label));
      }
    CHECK(seen.size() == 2);
  }
  SUBCASE("same shuffle seed gives the same order") {
    auto order = [&](std::uint64_t seed) {
      gid::BatchIterator it(r.split, gid::Partition::kMixed, 16, seed);
      std::vector<std::string> ids;
      while (auto b = it.Next())
        for (const auto &e : *b) ids.push_back(e.id);
      return ids;
    };
    CHECK(order(3) == order(3));
    CHECK(order(3) != order(4));
  }
  SUBCASE("empty partitions are iteration errors") {
    gid::GidSplit s = r.split;
    s.ood_train.clear();
    CHECK_THROWS_AS(gid::BatchIterator(s, gid::Partition::kOodTrain, 8, std::nullopt),
                    gid::IterationError);
  }
}
