// tests/acceptance.cc

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

// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>

#include "criteria.h"

int main(int argc, char **argv) {
  const std::pair<const char *, std::function<criteria::Result()>> checks[] = {
      {"loss oracle suite", [] { return criteria::LossOracles(); }},
      {"gradient checks", [] { return criteria::GradientChecks(); }},
      {"verbalizer initialization exactness", [] { return criteria::VerbalizerExactness(); }},
      {"split determinism and ratio law", [] { return criteria::SplitRatioLaw(); }},
      {"metric equivalence", [] { return criteria::MetricEquivalence(); }},
      {"desk end-to-end CPP vs kmeans", [] { return criteria::DeskEndToEnd(); }},
      {"ablation direction", [] { return criteria::AblationDirection(); }},
      {"label hygiene", [] { return criteria::LabelHygiene(); }},
  };
  // Optional argument: a single criterion number.
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (int i = 0; i < 8; ++i) {
    if (only && only != i + 1) continue;
    criteria::Result r;
    try {
      r = checks[i].second();
    } catch (const std::exception &e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("%s %d %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, checks[i].first, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
