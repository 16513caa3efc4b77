// core/include/gid/meta_knowledge.h

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

#ifndef GID_META_KNOWLEDGE_H_
#define GID_META_KNOWLEDGE_H_

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace gid {

enum class MetaKind { kName, kParaphrase, kKeywords, kExamples };
enum class Provenance { kGenerated, kFixture };

std::string MetaKindName(MetaKind k);
MetaKind ParseMetaKind(const std::string &name);

/// Per-category knowledge used to build prototypes and verbalizer label words.
struct MetaInfoRecord {
  std::string category;
  MetaKind kind = MetaKind::kName;
  int k = 1;
  std::vector<std::string> items;
  std::string template_hash;
  Provenance provenance = Provenance::kGenerated;
};

using MetaMap = std::map<std::string, MetaInfoRecord>;

/// Throws FixtureError if the record breaks its invariants.
void ValidateRecord(const MetaInfoRecord &r);

/// "card_arrival" -> "card arrival".
std::string NormalizeCategoryName(const std::string &category);

/// The four parts of a generation request.
struct PromptTemplateSpec {
  std::string role_definition;
  std::string dataset_background;
  std::string task_description;
  std::string io_format;

  static PromptTemplateSpec Default();
  /// Substitutes {category}, {kind} and {k}; ConfigError if a part is empty.
  std::string RenderUser(const std::string &category, MetaKind kind, int k) const;
  std::string Hash() const;
};

/// Generic chat-completion service.
class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;
  virtual std::string Complete(const std::string &system_prompt,
                               const std::string &user_prompt) = 0;
};

/// OpenAI-compatible /chat/completions endpoint over HTTP(S).
class ChatCompletionProvider : public GenerationProvider {
 public:
  struct Options {
    std::string endpoint;  // full URL of the completions route
    std::string api_key;
    std::string model;
    int timeout_seconds = 60;
  };

  /// Reads GID_PROVIDER_URL, GID_PROVIDER_KEY and GID_PROVIDER_MODEL.
  /// Throws GenerationError with a remediation hint when unset.
  static Options FromEnvironment();

  explicit ChatCompletionProvider(Options options);
  std::string Complete(const std::string &system_prompt,
                       const std::string &user_prompt) override;

 private:
  Options options_;
  std::string scheme_host_;
  std::string path_;
};

struct GenerationOptions {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  int max_concurrency = 4;
  /// Minimum spacing between request starts.
  std::chrono::milliseconds min_interval{0};
};

/// Splits a numbered/bulleted list into items. Lines without a list marker
/// are ignored when at least one marked line exists.
std::vector<std::string> ParseNumberedList(const std::string &text);

/// Records read from a fixture file; ValidateRecord is applied to each.
std::vector<MetaInfoRecord> LoadFixture(const std::string &path);

/// Fixture records, the on-disk cache and the generation path behind one
/// lookup. Precedence: fixture, then cache, then provider.
class MetaStore {
 public:
  /// An empty path disables persistence.
  explicit MetaStore(std::string cache_path = "");

  void AddFixture(const std::string &path);
  void AddFixtureRecords(const std::vector<MetaInfoRecord> &records);

  MetaMap Generate(const std::vector<std::string> &labels, MetaKind kind, int k,
                   const PromptTemplateSpec &tmpl, GenerationProvider *provider,
                   const GenerationOptions &options = {});

  /// Reads fixture/cache only; CoverageError lists uncovered labels.
  MetaMap Lookup(const std::vector<std::string> &labels, MetaKind kind, int k) const;

  std::size_t provider_calls() const { return provider_calls_; }

 private:
  void AppendToCache(const MetaInfoRecord &r);

  std::string cache_path_;
  std::vector<MetaInfoRecord> fixture_;
  std::vector<MetaInfoRecord> cache_;
  std::size_t provider_calls_ = 0;
  mutable std::mutex mu_;
};

/// One JSON object per record, as written to cache and fixture files.
std::string MetaRecordJsonLine(const MetaInfoRecord &r);
std::string MetaMapHash(const MetaMap &meta);

}  // namespace gid

#endif  // GID_META_KNOWLEDGE_H_
