// tools/cli.cc

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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gid/config.h"
#include "gid/dataset.h"
#include "gid/errors.h"
#include "gid/evaluation.h"
#include "gid/meta_knowledge.h"
#include "gid/synthetic.h"
#include "gid/trainer.h"
#include "json.hpp"

namespace gid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void WriteText(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write " + path.string());
  out << text;
}

std::string ReadText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool IsBuiltinCorpus(const std::string &name) {
  return name == "banking" || name == "clinc" || name == "desk";
}

// Built-in corpora by name; anything else is a file path.
Corpus ResolveCorpus(const std::string &name, std::uint64_t seed, int per_label) {
  if (name == "banking") return BankingShapedCorpus(seed, per_label);
  if (name == "clinc") return ClincShapedCorpus(seed, per_label);
  if (name == "desk") {
    DeskTaskOptions o;
    o.per_intent = per_label;
    return MakeDeskTask(seed, o).corpus;
  }
  return LoadCorpus(name, FormatForPath(name));
}

MetaMap LoadMeta(const std::string &meta_path, const std::vector<std::string> &fixtures,
                 const LabelSpace &labels, const MetaConfig &mc) {
  if (!meta_path.empty() && !fs::exists(meta_path))
    throw FixtureError("cannot open " + meta_path + " (create it with `gid genmeta`)");
  MetaStore store(meta_path);
  for (const auto &f : fixtures) store.AddFixture(f);
  return store.Lookup(labels.All(), mc.kind, mc.k);
}

struct RunInputs {
  std::string split;
  std::string meta;
  std::vector<std::string> fixtures;
  std::string config;
  std::vector<std::string> sets;
  std::string method;
  std::string freeze;
  std::optional<std::uint64_t> seed;
};

void AddRunInputs(CLI::App *cmd, RunInputs &in) {
  cmd->add_option("--split", in.split, "split manifest written by `gid split`")->required();
  cmd->add_option("--meta", in.meta, "meta cache written by `gid genmeta`");
  cmd->add_option("--fixture", in.fixtures, "meta fixture file (repeatable)");
  cmd->add_option("--config", in.config, "run config JSON");
  cmd->add_option("--set", in.sets, "config override section.key=value (repeatable)");
  cmd->add_option("--method", in.method, "cpp or kmeans");
  cmd->add_option("--freeze", in.freeze, "none, plm_all or plm_but_last");
  cmd->add_option("--seed", in.seed, "train.seed");
}

// Flag shorthands first, then --set, so explicit assignments win.
std::vector<std::string> OverrideList(const RunInputs &in) {
  std::vector<std::string> o;
  if (!in.method.empty()) o.push_back("method=" + in.method);
  if (!in.freeze.empty()) o.push_back("encoder.freeze=" + in.freeze);
  if (in.seed) o.push_back("train.seed=" + std::to_string(*in.seed));
  o.insert(o.end(), in.sets.begin(), in.sets.end());
  return o;
}

RunConfig BaseConfig(const RunInputs &in) {
  return in.config.empty() ? RunConfig{} : RunConfig::FromFile(in.config);
}

struct RunOutcome {
  EvalReport report;
  RunManifest manifest;
};

RunOutcome RunOne(const GidSplit &split, const RunInputs &in, RunConfig config,
                  const std::vector<std::string> &overrides, const fs::path &dir) {
  for (const auto &o : overrides) config.ApplyOverride(o);
  config.Validate();
  const MetaMap meta = LoadMeta(in.meta, in.fixtures, split.label_space, config.meta);
  RunResult result = Run(split, meta, config, overrides);
  fs::create_directories(dir);
  result.model->Save((dir / "checkpoint.json").string());
  result.manifest.Save((dir / "manifest.json").string());
  EvalReport report = EvaluateModel(*result.model, split);
  WriteText(dir / "report.json", report.ToJson());
  WriteText(dir / "report.txt", FormatTable({report}));
  return {std::move(report), std::move(result.manifest)};
}

struct Variant {
  std::string name;
  std::vector<std::string> overrides;
};

std::vector<Variant> Preset(const std::string &name) {
  if (name == "loss")
    return {{"w/o dc", {"loss.lambda_dc=0"}},
            {"w/o pc", {"loss.lambda_pc=0"}},
            {"w/o cp", {"loss.lambda_cp=0"}},
            {"w/o cl", {"loss.lambda_cl=0"}}};
  if (name == "meta") {
    std::vector<Variant> v{{"name", {"meta.kind=name", "meta.k=1"}},
                           {"paraphrase", {"meta.kind=paraphrase", "meta.k=1"}},
                           {"keywords", {"meta.kind=keywords", "meta.k=5"}}};
    for (int k = 1; k <= 5; ++k)
      v.push_back({std::to_string(k) + " examples",
                   {"meta.kind=examples", "meta.k=" + std::to_string(k)}});
    return v;
  }
  if (name == "freeze")
    return {{"no freeze", {"encoder.freeze=none"}},
            {"freeze all", {"encoder.freeze=plm_all"}},
            {"freeze all but last", {"encoder.freeze=plm_but_last"}}};
  throw ConfigError("unknown preset '" + name + "' (expected loss, meta or freeze)");
}

// "a=1,b=2" -> {"a=1", "b=2"}; the variant is named after the whole entry.
Variant ParseSweepEntry(const std::string &entry) {
  Variant v{entry, {}};
  std::stringstream ss(entry);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) v.overrides.push_back(part);
  if (v.overrides.empty()) throw ConfigError("empty sweep entry");
  return v;
}

std::string DirName(std::size_t index, const std::string &name) {
  std::string s = std::to_string(index) + "_";
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
}

int ClassToExit(ErrorClass c) {
  switch (c) {
    case ErrorClass::kUsage: return kUsage;
    case ErrorClass::kData: return kData;
    case ErrorClass::kTraining: return kTraining;
  }
  return kTraining;
}

}  // namespace

int Main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Generalized intent discovery with prototype prompting", "gid"};
  app.require_subcommand(1);

  // synth
  std::string synth_corpus, synth_out, synth_meta_out, synth_config_out;
  std::uint64_t synth_seed = 1;
  std::optional<int> synth_per_label;
  auto *synth = app.add_subcommand("synth", "write a synthetic corpus as jsonl");
  synth->add_option("--corpus", synth_corpus, "desk, banking or clinc")
      ->required()
      ->check(CLI::IsMember({"desk", "banking", "clinc"}));
  synth->add_option("--seed", synth_seed);
  synth->add_option("--per-label", synth_per_label);
  synth->add_option("--out", synth_out, "corpus jsonl")->required();
  synth->add_option("--meta-out", synth_meta_out, "keyword fixture (desk only)");
  synth->add_option("--config-out", synth_config_out, "desk-scale run config (desk only)");

  // split
  std::string split_corpus, split_setup = "sd", split_out;
  double split_ratio = 0.6;
  std::uint64_t split_seed = 0, split_corpus_seed = 1;
  std::optional<int> split_per_label;
  auto *split = app.add_subcommand("split", "make a GID split");
  split->add_option("--corpus", split_corpus, "corpus file, or desk/banking/clinc")->required();
  split->add_option("--setup", split_setup, "sd, cd or md");
  split->add_option("--ood-ratio", split_ratio);
  split->add_option("--seed", split_seed);
  split->add_option("--corpus-seed", split_corpus_seed, "seed of a built-in corpus");
  split->add_option("--per-label", split_per_label, "utterances per label, built-in corpus");
  split->add_option("--out", split_out, "output directory")->required();

  // genmeta
  std::string gm_split, gm_kind = "name", gm_out;
  int gm_k = 1;
  std::vector<std::string> gm_fixtures;
  auto *genmeta = app.add_subcommand("genmeta", "resolve meta-information for every label");
  genmeta->add_option("--split", gm_split)->required();
  genmeta->add_option("--kind", gm_kind, "name, paraphrase, keywords or examples");
  genmeta->add_option("--k", gm_k);
  genmeta->add_option("--fixture", gm_fixtures, "fixture file (repeatable); disables the network");
  genmeta->add_option("--out", gm_out, "meta cache, appended to")->required();

  // run
  RunInputs run_in;
  std::string run_out;
  auto *run = app.add_subcommand("run", "pretrain + discover (or the kmeans pipeline), then evaluate");
  AddRunInputs(run, run_in);
  run->add_option("--out", run_out, "output directory")->required();

  // eval
  std::string ev_ckpt, ev_split, ev_out;
  auto *eval = app.add_subcommand("eval", "evaluate a checkpoint on a split's test set");
  eval->add_option("--checkpoint", ev_ckpt)->required();
  eval->add_option("--split", ev_split)->required();
  eval->add_option("--out", ev_out, "report json");

  // ablate
  RunInputs ab_in;
  std::string ab_out;
  std::vector<std::string> ab_sweep, ab_presets;
  std::string ab_sweep_file;
  auto *ablate = app.add_subcommand("ablate", "one run per configuration, merged table");
  AddRunInputs(ablate, ab_in);
  ablate->add_option("--sweep", ab_sweep, "comma-separated overrides for one configuration");
  ablate->add_option("--sweep-file", ab_sweep_file, "one --sweep entry per line");
  ablate->add_option("--preset", ab_presets, "loss, meta or freeze");
  ablate->add_option("--out", ab_out, "output directory")->required();

  // report
  std::vector<std::string> rep_in;
  std::string rep_out;
  bool rep_sort = false;
  auto *report = app.add_subcommand("report", "render report json files as one table");
  report->add_option("reports", rep_in, "report json files")->required();
  report->add_flag("--sort", rep_sort, "sort by ALL accuracy");
  report->add_option("--out", rep_out, "write the table here too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) {
      const bool desk = synth_corpus == "desk";
      if (!desk && (!synth_meta_out.empty() || !synth_config_out.empty()))
        throw ConfigError("--meta-out and --config-out apply to the desk corpus only");
      if (desk) {
        DeskTaskOptions o;
        if (synth_per_label) o.per_intent = *synth_per_label;
        DeskTask t = MakeDeskTask(synth_seed, o);
        SaveCorpus(t.corpus, synth_out);
        if (!synth_meta_out.empty()) {
          std::string lines;
          for (const auto &r : t.meta) lines += MetaRecordJsonLine(r);
          WriteText(synth_meta_out, lines);
        }
        if (!synth_config_out.empty()) WriteText(synth_config_out, DeskRunConfig().ToJson());
        out << "desk corpus: " << t.corpus.records.size() << " utterances, "
            << t.corpus.labels.size() << " intents\n";
      } else {
        const Corpus c = ResolveCorpus(synth_corpus, synth_seed, synth_per_label.value_or(4));
        SaveCorpus(c, synth_out);
        out << synth_corpus << " corpus: " << c.records.size() << " utterances, "
            << c.labels.size() << " labels\n";
      }
      return kOk;
    }

    if (*split) {
      const Setup setup = ParseSetup(split_setup);
      if (!IsBuiltinCorpus(split_corpus) && split_per_label)
        throw ConfigError("--per-label applies to built-in corpora only");
      const Corpus corpus = ResolveCorpus(split_corpus, split_corpus_seed,
                                          split_per_label.value_or(split_corpus == "desk" ? 60 : 4));
      SplitResult r = MakeSplit(corpus, setup, split_ratio, split_seed);
      const fs::path dir(split_out);
      fs::create_directories(dir);
      SaveSplit(r.split, (dir / "split.json").string());
      const std::string hash = SplitHash(r.split);
      SaveSealed(r.sealed, hash, (dir / "sealed.json").string());
      out << "setup " << SetupName(setup) << ", OOD ratio " << split_ratio << ", seed "
          << split_seed << "\n"
          << "IND labels: " << r.split.label_space.num_ind() << "\n"
          << "OOD labels: " << r.split.label_space.num_ood() << "\n"
          << "ind_train " << r.split.ind_train.size() << ", ood_train "
          << r.split.ood_train.size() << ", dev " << r.split.dev.size() << ", test "
          << r.split.test.size() << "\n"
          << "split hash: " << hash << "\n";
      return kOk;
    }

    if (*genmeta) {
      const GidSplit s = LoadSplit(gm_split);
      const MetaKind kind = ParseMetaKind(gm_kind);
      const std::vector<std::string> labels = s.label_space.All();
      MetaStore store(gm_out);
      for (const auto &f : gm_fixtures) store.AddFixture(f);
      MetaMap resolved;
      try {
        resolved = store.Lookup(labels, kind, gm_k);
      } catch (const CoverageError &) {
        // Fixture mode never touches the network.
        std::unique_ptr<GenerationProvider> provider;
        if (gm_fixtures.empty())
          provider = std::make_unique<ChatCompletionProvider>(ChatCompletionProvider::FromEnvironment());
        resolved = store.Generate(labels, kind, gm_k, PromptTemplateSpec::Default(), provider.get());
      }
      // Fixture-resolved records are copied so that later runs need only the cache.
      std::string lines;
      for (const auto &[label, r] : resolved)
        if (r.provenance == Provenance::kFixture) lines += MetaRecordJsonLine(r);
      if (!lines.empty()) {
        std::ofstream app_out(gm_out, std::ios::app);
        if (!app_out) throw FixtureError("cannot append to " + gm_out);
        app_out << lines;
      }
      out << resolved.size() << " " << MetaKindName(kind) << " records (k=" << gm_k << "), "
          << store.provider_calls() << " provider calls\n"
          << "meta hash: " << MetaMapHash(resolved) << "\n";
      return kOk;
    }

    if (*run) {
      const GidSplit s = LoadSplit(run_in.split);
      RunOutcome r = RunOne(s, run_in, BaseConfig(run_in), OverrideList(run_in), run_out);
      for (const auto &w : r.manifest.warnings) err << "warning: " << w << "\n";
      out << FormatTable({r.report});
      return kOk;
    }

    if (*eval) {
      const GidSplit s = LoadSplit(ev_split);
      auto model = LoadModel(ev_ckpt);
      EvalReport r = EvaluateModel(*model, s);
      if (!ev_out.empty()) WriteText(ev_out, r.ToJson());
      out << FormatTable({r});
      return kOk;
    }

    if (*ablate) {
      std::vector<Variant> variants;
      for (const auto &p : ab_presets)
        for (auto &v : Preset(p)) variants.push_back(std::move(v));
      for (const auto &e : ab_sweep) variants.push_back(ParseSweepEntry(e));
      if (!ab_sweep_file.empty()) {
        std::stringstream ss(ReadText(ab_sweep_file));
        std::string line;
        while (std::getline(ss, line))
          if (!line.empty() && line[0] != '#') variants.push_back(ParseSweepEntry(line));
      }
      if (variants.empty())
        throw ConfigError("empty sweep: pass --preset, --sweep or --sweep-file");

      const GidSplit s = LoadSplit(ab_in.split);
      const RunConfig base = BaseConfig(ab_in);
      const std::vector<std::string> common = OverrideList(ab_in);
      std::vector<EvalReport> reports;
      json summary = json::array();
      int failures = 0;
      for (std::size_t i = 0; i < variants.size(); ++i) {
        const Variant &v = variants[i];
        std::vector<std::string> overrides = common;
        overrides.insert(overrides.end(), v.overrides.begin(), v.overrides.end());
        const fs::path dir = fs::path(ab_out) / DirName(i, v.name);
        try {
          RunOutcome r = RunOne(s, ab_in, base, overrides, dir);
          r.report.method = v.name;
          reports.push_back(r.report);
          summary.push_back({{"name", v.name}, {"overrides", v.overrides}, {"dir", dir.string()},
                             {"report", json::parse(r.report.ToJson())}});
          out << "[" << i + 1 << "/" << variants.size() << "] " << v.name << ": ALL ACC "
              << Percent(r.report.all_acc) << "\n";
        } catch (const Error &e) {
          ++failures;
          WriteText(dir / "error.txt", std::string(e.what()) + "\n");
          summary.push_back({{"name", v.name}, {"overrides", v.overrides}, {"dir", dir.string()},
                             {"error", e.what()}});
          err << "[" << i + 1 << "/" << variants.size() << "] " << v.name << " failed: "
              << e.what() << "\n";
        }
      }
      std::stable_sort(reports.begin(), reports.end(),
                       [](const EvalReport &a, const EvalReport &b) { return a.all_acc > b.all_acc; });
      const std::string table = FormatTable(reports);
      WriteText(fs::path(ab_out) / "ablation.txt", table);
      WriteText(fs::path(ab_out) / "ablation.json", summary.dump(2));
      out << table;
      return failures == 0 ? kOk : kTraining;
    }

    if (*report) {
      std::vector<EvalReport> reports;
      for (const auto &p : rep_in) reports.push_back(EvalReport::FromJson(ReadText(p)));
      if (rep_sort)
        std::stable_sort(reports.begin(), reports.end(),
                         [](const EvalReport &a, const EvalReport &b) { return a.all_acc > b.all_acc; });
      const std::string table = FormatTable(reports);
      if (!rep_out.empty()) WriteText(rep_out, table);
      out << table;
      return kOk;
    }
  } catch (const Error &e) {
    err << "gid: " << e.what() << "\n";
    return ClassToExit(e.error_class());
  } catch (const fs::filesystem_error &e) {
    err << "gid: " << e.what() << "\n";
    return kData;
  } catch (const std::exception &e) {
    err << "gid: internal error: " << e.what() << "\n";
    return kTraining;
  }
  return kUsage;
}

}  // namespace gid::cli
