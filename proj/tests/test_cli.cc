// tests/test_cli.cc

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

#include <stdlib.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gid");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = gid::cli::Main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::string Line(const std::string &text, const std::string &prefix) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l.rfind(prefix, 0) == 0) return l;
  return "";
}

struct Workspace {
  fs::path dir = fs::temp_directory_path() / ("gid_cli_" + std::to_string(::getpid()));
  Workspace() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator/(const std::string &name) const { return (dir / name).string(); }
};

// Desk corpus, fixture, config and a split, small enough for quick runs.
struct Desk : Workspace {
  Desk() {
    REQUIRE(Cli({"synth", "--corpus", "desk", "--per-label", "12", "--seed", "2", "--out",
                 *this / "desk.jsonl", "--meta-out", *this / "fx.jsonl", "--config-out",
                 *this / "cfg.json"})
                .code == 0);
    REQUIRE(Cli({"split", "--corpus", *this / "desk.jsonl", "--setup", "sd", "--ood-ratio",
                 "0.65", "--seed", "2", "--out", *this / "split"})
                .code == 0);
  }
  std::vector<std::string> Tiny() const {
    return {"--config", *this / "cfg.json", "--set", "train.max_epochs=1", "--set",
            "encoder.dim=16", "--set", "encoder.ffn_dim=32", "--set", "heads.projection_dim=16"};
  }
};

class Env {
 public:
  Env(const char *name, const char *value) : name_(name) {
    if (const char *old = std::getenv(name)) saved_ = old;
    if (value) ::setenv(name, value, 1);
    else ::unsetenv(name);
  }
  ~Env() {
    if (saved_) ::setenv(name_, saved_->c_str(), 1);
    else ::unsetenv(name_);
  }

 private:
  const char *name_;
  std::optional<std::string> saved_;
};

}  // namespace

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(Cli({}).code == 2);
  CHECK(Cli({"--help"}).code == 0);
  CHECK(Cli({"frobnicate"}).code == 2);
  Workspace ws;
  CHECK(Cli({"split", "--corpus", "banking", "--setup", "xd", "--out", ws / "s"}).code == 2);
}

TEST_CASE("split of the banking-shaped corpus") {
  Workspace ws;
  const auto a = Cli({"split", "--corpus", "banking", "--setup", "sd", "--ood-ratio", "0.6",
                      "--seed", "7", "--out", ws / "a"});
  REQUIRE(a.code == 0);
  CHECK(a.out.find("IND labels: 31\n") != std::string::npos);
  CHECK(a.out.find("OOD labels: 46\n") != std::string::npos);
  const auto b = Cli({"split", "--corpus", "banking", "--setup", "sd", "--ood-ratio", "0.6",
                      "--seed", "7", "--out", ws / "b"});
  CHECK(Line(a.out, "split hash") == Line(b.out, "split hash"));
  CHECK(Slurp(ws / "a/split.json") == Slurp(ws / "b/split.json"));
  CHECK(Slurp(ws / "a/sealed.json") == Slurp(ws / "b/sealed.json"));
  CHECK(Slurp(ws / "a/split.json").find("\"label\"") != std::string::npos);
  const json j = json::parse(Slurp(ws / "a/split.json"));
  for (const auto &r : j.at("partitions").at("ood_train")) CHECK_FALSE(r.contains("label"));
}

TEST_CASE("missing inputs are data errors") {
  Workspace ws;
  CHECK(Cli({"run", "--split", ws / "none.json", "--out", ws / "r"}).code == 3);
  CHECK(Cli({"split", "--corpus", ws / "none.jsonl", "--setup", "sd", "--ood-ratio", "0.6",
             "--out", ws / "s"})
            .code == 3);
}

TEST_CASE("genmeta") {
  Desk d;
  SUBCASE("fixture mode makes no provider calls") {
    Env url("GID_PROVIDER_URL", nullptr);
    const auto r = Cli({"genmeta", "--split", d / "split/split.json", "--kind", "keywords", "--k",
                        "4", "--fixture", d / "fx.jsonl", "--out", d / "meta.jsonl"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("8 keywords records (k=4), 0 provider calls") != std::string::npos);
  }
  SUBCASE("missing credentials without a fixture") {
    Env url("GID_PROVIDER_URL", nullptr);
    const auto r = Cli({"genmeta", "--split", d / "split/split.json", "--kind", "keywords", "--k",
                        "3", "--out", d / "meta.jsonl"});
    CHECK(r.code == 3);
    CHECK(r.err.find("--fixture") != std::string::npos);
  }
  SUBCASE("examples from a provider, k items per category") {
    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request &, httplib::Response &res) {
      const std::string text = "1. first\n2. second\n3. third\n4. fourth\n";
      res.set_content(json{{"choices", {{{"message", {{"content", text}}}}}}}.dump(),
                      "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    Result r;
    {
      Env u("GID_PROVIDER_URL", url.c_str());
      Env k("GID_PROVIDER_KEY", "test");
      r = Cli({"genmeta", "--split", d / "split/split.json", "--kind", "examples", "--k", "4",
               "--out", d / "meta.jsonl"});
    }
    server.stop();
    t.join();
    REQUIRE(r.code == 0);
    std::istringstream lines(Slurp(d / "meta.jsonl"));
    int n = 0;
    for (std::string l; std::getline(lines, l); ++n)
      CHECK(json::parse(l).at("items").size() == 4);
    CHECK(n == 8);
  }
}

TEST_CASE("run, eval, report and ablate") {
  Desk d;
  auto with = [&](std::vector<std::string> head) {
    auto tiny = d.Tiny();
    head.insert(head.end(), tiny.begin(), tiny.end());
    return head;
  };
  const auto run = Cli(with({"run", "--split", d / "split/split.json", "--fixture",
                             d / "fx.jsonl", "--out", d / "r1"}));
  REQUIRE(run.code == 0);
  for (const char *f : {"checkpoint.json", "manifest.json", "report.json", "report.txt"})
    CHECK(fs::exists(d.dir / "r1" / f));

  const auto ev = Cli({"eval", "--checkpoint", d / "r1/checkpoint.json", "--split",
                       d / "split/split.json", "--out", d / "eval.json"});
  CHECK(ev.code == 0);
  CHECK(ev.out == Slurp(d / "r1/report.txt"));
  CHECK(Slurp(d / "eval.json") == Slurp(d / "r1/report.json"));

  const auto km = Cli(with({"run", "--split", d / "split/split.json", "--fixture",
                            d / "fx.jsonl", "--method", "kmeans", "--out", d / "r2"}));
  CHECK(km.code == 0);
  CHECK(json::parse(Slurp(d / "r2/manifest.json")).at("method") == "kmeans");

  const auto rep = Cli({"report", d / "r1/report.json", d / "r2/report.json", "--sort"});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("kmeans") != std::string::npos);

  const auto ab = Cli(with({"ablate", "--split", d / "split/split.json", "--fixture",
                            d / "fx.jsonl", "--preset", "loss", "--out", d / "ab"}));
  CHECK(ab.code == 0);
  CHECK(json::parse(Slurp(d / "ab/ablation.json")).size() == 4);
  CHECK(fs::exists(d.dir / "ab/ablation.txt"));

  CHECK(Cli(with({"ablate", "--split", d / "split/split.json", "--fixture", d / "fx.jsonl",
                  "--out", d / "ab2"}))
            .code == 2);
  CHECK(Cli(with({"run", "--split", d / "split/split.json", "--fixture", d / "fx.jsonl",
                  "--set", "loss.lambda_cl=-1", "--out", d / "r3"}))
            .code == 2);
}

TEST_CASE("divergent training exits 4") {
  Desk d;
  auto args = d.Tiny();
  args.insert(args.begin(), {"run", "--split", d / "split/split.json", "--fixture",
                             d / "fx.jsonl", "--out", d / "bad"});
  args.insert(args.end(), {"--set", "train.learning_rate=1e200", "--set", "train.warmup_steps=0"});
  const auto r = Cli(args);
  CHECK(r.code == 4);
}
