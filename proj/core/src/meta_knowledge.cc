// core/src/meta_knowledge.cc

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

#include "gid/meta_knowledge.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "gid/errors.h"
#include "gid/util.h"
#include "httplib.h"
#include "json.hpp"

namespace gid {

using nlohmann::json;

std::string MetaKindName(MetaKind k) {
  switch (k) {
    case MetaKind::kName: return "name";
    case MetaKind::kParaphrase: return "paraphrase";
    case MetaKind::kKeywords: return "keywords";
    case MetaKind::kExamples: return "examples";
  }
  return "?";
}

MetaKind ParseMetaKind(const std::string &name) {
  if (name == "name") return MetaKind::kName;
  if (name == "paraphrase") return MetaKind::kParaphrase;
  if (name == "keywords") return MetaKind::kKeywords;
  if (name == "examples") return MetaKind::kExamples;
  throw ConfigError("unknown meta kind '" + name +
                    "' (expected name, paraphrase, keywords or examples)");
}

std::string NormalizeCategoryName(const std::string &category) {
  std::string out = category;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

void ValidateRecord(const MetaInfoRecord &r) {
  if (r.category.empty()) throw FixtureError("record without category");
  if (r.items.empty()) throw FixtureError("record '" + r.category + "' has no items");
  for (const auto &item : r.items)
    if (Trim(item).empty())
      throw FixtureError("record '" + r.category + "' has an empty item");
  if (r.kind == MetaKind::kName &&
      (r.items.size() != 1 || r.items[0] != NormalizeCategoryName(r.category)))
    throw FixtureError("name record '" + r.category + "' must hold the normalised name");
}

namespace {

void CheckKindK(MetaKind kind, int k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if ((kind == MetaKind::kName || kind == MetaKind::kParaphrase) && k != 1)
    throw ConfigError(MetaKindName(kind) + " meta-information takes k = 1");
  if (kind == MetaKind::kExamples && k > 5)
    throw ConfigError("examples meta-information supports 1 <= k <= 5");
}

json RecordToJson(const MetaInfoRecord &r) {
  json j;
  j["category"] = r.category;
  j["kind"] = MetaKindName(r.kind);
  j["k"] = r.k;
  j["items"] = r.items;
  j["template_hash"] = r.template_hash;
  j["provenance"] = r.provenance == Provenance::kFixture ? "fixture" : "generated";
  return j;
}

MetaInfoRecord RecordFromJson(const json &j) {
  MetaInfoRecord r;
  r.category = j.at("category").get<std::string>();
  r.kind = ParseMetaKind(j.at("kind").get<std::string>());
  r.items = j.at("items").get<std::vector<std::string>>();
  r.k = j.contains("k") ? j.at("k").get<int>() : static_cast<int>(r.items.size());
  if (j.contains("template_hash")) r.template_hash = j.at("template_hash").get<std::string>();
  if (j.contains("provenance") && j.at("provenance") == "fixture")
    r.provenance = Provenance::kFixture;
  return r;
}

std::vector<MetaInfoRecord> ReadRecordLines(const std::string &path, bool fixture) {
  std::ifstream in(path);
  if (!in) {
    if (fixture) throw FixtureError("cannot open " + path);
    return {};
  }
  std::vector<MetaInfoRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      MetaInfoRecord r = RecordFromJson(json::parse(line));
      if (static_cast<std::size_t>(r.k) != r.items.size())
        throw FixtureError("record '" + r.category + "' declares k=" + std::to_string(r.k) +
                           " but holds " + std::to_string(r.items.size()) + " items");
      ValidateRecord(r);
      if (fixture) r.provenance = Provenance::kFixture;
      out.push_back(std::move(r));
    } catch (const json::exception &e) {
      throw FixtureError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ConfigError &e) {
      throw FixtureError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string StripListMarker(const std::string &line, bool *marked) {
  std::size_t i = 0;
  *marked = false;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
    *marked = true;
    return Trim(line.substr(i + 1));
  }
  if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    *marked = true;
    return Trim(line.substr(1));
  }
  if (line.rfind("\xe2\x80\xa2", 0) == 0) {  // U+2022 bullet
    *marked = true;
    return Trim(line.substr(3));
  }
  return line;
}

std::string StripDecoration(std::string s) {
  auto strip_pair = [&](char a, char b) {
    if (s.size() >= 2 && s.front() == a && s.back() == b) s = Trim(s.substr(1, s.size() - 2));
  };
  strip_pair('"', '"');
  strip_pair('\'', '\'');
  strip_pair('*', '*');
  while (!s.empty() && (s.back() == ',' || s.back() == ';')) s.pop_back();
  return Trim(s);
}

}  // namespace

std::vector<std::string> ParseNumberedList(const std::string &text) {
  std::vector<std::string> marked, plain;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = Trim(raw);
    if (line.empty()) continue;
    bool is_marked = false;
    std::string item = StripDecoration(StripListMarker(line, &is_marked));
    if (item.empty()) continue;
    (is_marked ? marked : plain).push_back(std::move(item));
  }
  return marked.empty() ? plain : marked;
}

PromptTemplateSpec PromptTemplateSpec::Default() {
  PromptTemplateSpec t;
  t.role_definition =
      "You are a linguist who writes concise, accurate descriptions of user "
      "intents for a task-oriented dialogue system.";
  t.dataset_background =
      "The dataset contains short user queries sent to a customer-service "
      "assistant. Each query belongs to exactly one intent category.";
  t.task_description =
      "For the intent category \"{category}\", produce {k} {kind} that "
      "characterise it and distinguish it from other intents.";
  t.io_format =
      "Answer with a numbered list of exactly {k} lines formatted as "
      "'<number>. <item>' and nothing else.";
  return t;
}

std::string PromptTemplateSpec::RenderUser(const std::string &category, MetaKind kind,
                                           int k) const {
  for (const std::string *part :
       {&role_definition, &dataset_background, &task_description, &io_format})
    if (Trim(*part).empty()) throw ConfigError("prompt template has an empty part");
  std::string kind_text;
  switch (kind) {
    case MetaKind::kName: kind_text = "label names"; break;
    case MetaKind::kParaphrase: kind_text = "one-sentence paraphrase(s) of the intent"; break;
    case MetaKind::kKeywords: kind_text = "keywords or short key phrases"; break;
    case MetaKind::kExamples: kind_text = "example user utterances"; break;
  }
  std::string out = dataset_background + "\n" + task_description + "\n" + io_format;
  auto sub = [&](const std::string &key, const std::string &value) {
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size()))
      out.replace(pos, key.size(), value);
  };
  sub("{category}", NormalizeCategoryName(category));
  sub("{kind}", kind_text);
  sub("{k}", std::to_string(k));
  return out;
}

std::string PromptTemplateSpec::Hash() const {
  std::string all = role_definition + '\x1f' + dataset_background + '\x1f' +
                    task_description + '\x1f' + io_format;
  return HexDigest(Fnv1a64(all));
}

ChatCompletionProvider::Options ChatCompletionProvider::FromEnvironment() {
  Options o;
  const char *url = std::getenv("GID_PROVIDER_URL");
  const char *key = std::getenv("GID_PROVIDER_KEY");
  const char *model = std::getenv("GID_PROVIDER_MODEL");
  if (url == nullptr || *url == '\0')
    throw GenerationError(
        "GID_PROVIDER_URL is not set; point it at an OpenAI-compatible "
        "/chat/completions endpoint, or pass --fixture to work offline");
  if (key == nullptr || *key == '\0')
    throw GenerationError(
        "GID_PROVIDER_KEY is not set; export the provider credential, or pass "
        "--fixture to work offline");
  o.endpoint = url;
  o.api_key = key;
  o.model = model != nullptr ? model : "deepseek-chat";
  return o;
}

ChatCompletionProvider::ChatCompletionProvider(Options options)
    : options_(std::move(options)) {
  auto scheme = options_.endpoint.find("://");
  if (scheme == std::string::npos)
    throw ConfigError("provider endpoint must be an absolute URL: " + options_.endpoint);
  auto slash = options_.endpoint.find('/', scheme + 3);
  scheme_host_ = options_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : options_.endpoint.substr(slash);
}

std::string ChatCompletionProvider::Complete(const std::string &system_prompt,
                                             const std::string &user_prompt) {
  httplib::Client client(scheme_host_);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  json body;
  body["model"] = options_.model;
  body["temperature"] = 0;
  body["messages"] = json::array({{{"role", "system"}, {"content", system_prompt}},
                                  {{"role", "user"}, {"content", user_prompt}}});
  httplib::Headers headers{{"Authorization", "Bearer " + options_.api_key}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res)
    throw GenerationError("request to " + scheme_host_ + " failed: " +
                          httplib::to_string(res.error()));
  if (res->status != 200)
    throw GenerationError("provider returned HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception &) {
    throw ParseError("unexpected completion payload", res->body);
  }
}

std::vector<MetaInfoRecord> LoadFixture(const std::string &path) {
  auto records = ReadRecordLines(path, /*fixture=*/true);
  if (records.empty()) throw FixtureError(path + " holds no records");
  return records;
}

MetaStore::MetaStore(std::string cache_path) : cache_path_(std::move(cache_path)) {
  if (!cache_path_.empty()) cache_ = ReadRecordLines(cache_path_, /*fixture=*/false);
}

void MetaStore::AddFixture(const std::string &path) { AddFixtureRecords(LoadFixture(path)); }

void MetaStore::AddFixtureRecords(const std::vector<MetaInfoRecord> &records) {
  std::lock_guard<std::mutex> lock(mu_);
  for (auto r : records) {
    ValidateRecord(r);
    r.provenance = Provenance::kFixture;
    fixture_.push_back(std::move(r));
  }
}

void MetaStore::AppendToCache(const MetaInfoRecord &r) {
  std::lock_guard<std::mutex> lock(mu_);
  cache_.push_back(r);
  if (cache_path_.empty()) return;
  std::ofstream out(cache_path_, std::ios::app);
  if (!out) throw GenerationError("cannot append to meta cache " + cache_path_);
  out << MetaRecordJsonLine(r);
}

MetaMap MetaStore::Generate(const std::vector<std::string> &labels, MetaKind kind, int k,
                            const PromptTemplateSpec &tmpl, GenerationProvider *provider,
                            const GenerationOptions &options) {
  CheckKindK(kind, k);
  const std::string thash = tmpl.Hash();
  MetaMap result;
  std::vector<std::string> missing;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto &label : labels) {
      auto match = [&](const MetaInfoRecord &r, bool need_hash) {
        return r.category == label && r.kind == kind && r.k == k &&
               (!need_hash || r.template_hash == thash);
      };
      auto f = std::find_if(fixture_.rbegin(), fixture_.rend(),
                            [&](const auto &r) { return match(r, false); });
      if (f != fixture_.rend()) {
        result[label] = *f;
        continue;
      }
      auto c = std::find_if(cache_.rbegin(), cache_.rend(),
                            [&](const auto &r) { return match(r, kind != MetaKind::kName); });
      if (c != cache_.rend()) {
        result[label] = *c;
        continue;
      }
      missing.push_back(label);
    }
  }

  std::vector<std::string> to_generate;
  for (const auto &label : missing) {
    if (kind == MetaKind::kName) {
      MetaInfoRecord r{label, kind, 1, {NormalizeCategoryName(label)}, thash,
                       Provenance::kGenerated};
      AppendToCache(r);
      result[label] = std::move(r);
    } else {
      to_generate.push_back(label);
    }
  }
  if (to_generate.empty()) return result;

  if (provider == nullptr) {
    std::string list;
    for (const auto &l : to_generate) list += (list.empty() ? "" : ", ") + l;
    throw GenerationError("no provider available and no cached meta-information for: " +
                          list + " (set GID_PROVIDER_URL/GID_PROVIDER_KEY or pass a fixture)");
  }

  // Rate limiter shared by the workers.
  std::mutex rate_mu;
  auto next_slot = std::chrono::steady_clock::now();
  auto call = [&](const std::string &user) {
    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, options.max_attempts); ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(options.initial_backoff * (1 << (attempt - 1)));
      {
        std::unique_lock<std::mutex> lock(rate_mu);
        auto now = std::chrono::steady_clock::now();
        auto start = std::max(now, next_slot);
        next_slot = start + options.min_interval;
        lock.unlock();
        std::this_thread::sleep_until(start);
      }
      try {
        {
          std::lock_guard<std::mutex> lock(mu_);
          ++provider_calls_;
        }
        return provider->Complete(tmpl.role_definition, user);
      } catch (const std::exception &e) {
        last_error = e.what();
      }
    }
    throw GenerationError(last_error);
  };

  std::mutex out_mu;
  std::vector<std::string> failed, parse_failed;
  std::string first_raw;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < to_generate.size(); i = next++) {
      const std::string &label = to_generate[i];
      const std::string user = tmpl.RenderUser(label, kind, k);
      try {
        std::string raw;
        bool ok = false;
        MetaInfoRecord r{label, kind, k, {}, thash, Provenance::kGenerated};
        for (int pass = 0; pass < 2 && !ok; ++pass) {
          raw = call(pass == 0 ? user
                               : user + "\nReminder: reply with exactly " + std::to_string(k) +
                                     " numbered lines ('1. ...') and no other text.");
          auto items = ParseNumberedList(raw);
          if (items.size() >= static_cast<std::size_t>(k)) {
            r.items.assign(items.begin(), items.begin() + k);
            ok = true;
          }
        }
        if (!ok) {
          std::lock_guard<std::mutex> lock(out_mu);
          parse_failed.push_back(label);
          if (first_raw.empty()) first_raw = raw;
          continue;
        }
        AppendToCache(r);
        std::lock_guard<std::mutex> lock(out_mu);
        result[label] = std::move(r);
      } catch (const Error &) {
        std::lock_guard<std::mutex> lock(out_mu);
        failed.push_back(label);
      }
    }
  };
  const int n_threads = std::clamp<int>(options.max_concurrency, 1,
                                        static_cast<int>(to_generate.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();

  auto join = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    std::string s;
    for (const auto &x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
  };
  if (!failed.empty()) {
    auto all = failed;
    all.insert(all.end(), parse_failed.begin(), parse_failed.end());
    throw GenerationError("provider failed after retries for: " + join(all));
  }
  if (!parse_failed.empty())
    throw ParseError("unparseable provider output for: " + join(parse_failed), first_raw);
  return result;
}

MetaMap MetaStore::Lookup(const std::vector<std::string> &labels, MetaKind kind,
                          int k) const {
  std::lock_guard<std::mutex> lock(mu_);
  MetaMap result;
  std::vector<std::string> missing;
  for (const auto &label : labels) {
    auto match = [&](const MetaInfoRecord &r) {
      return r.category == label && r.kind == kind && r.k == k;
    };
    auto f = std::find_if(fixture_.rbegin(), fixture_.rend(), match);
    if (f != fixture_.rend()) {
      result[label] = *f;
      continue;
    }
    auto c = std::find_if(cache_.rbegin(), cache_.rend(), match);
    if (c != cache_.rend()) {
      result[label] = *c;
      continue;
    }
    if (kind == MetaKind::kName && k == 1) {
      result[label] = MetaInfoRecord{label, kind, 1, {NormalizeCategoryName(label)}, "",
                                     Provenance::kGenerated};
      continue;
    }
    missing.push_back(label);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto &l : missing) list += (list.empty() ? "" : ", ") + l;
    throw CoverageError("no " + MetaKindName(kind) + " meta-information (k=" +
                        std::to_string(k) + ") for: " + list);
  }
  return result;
}

std::string MetaRecordJsonLine(const MetaInfoRecord &r) { return RecordToJson(r).dump() + "\n"; }

std::string MetaMapHash(const MetaMap &meta) {
  std::string all;
  for (const auto &[label, r] : meta) {
    json j = RecordToJson(r);
    j.erase("provenance");
    all += j.dump() + "\n";
  }
  return HexDigest(Fnv1a64(all));
}

}  // namespace gid
