// tools/cli.h

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

#ifndef GID_TOOLS_CLI_H_
#define GID_TOOLS_CLI_H_

#include <iosfwd>

namespace gid::cli {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kTraining = 4 };

/// Entry point of the `gid` tool. Commands: synth, split, genmeta, run, eval,
/// ablate, report.
int Main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace gid::cli

#endif  // GID_TOOLS_CLI_H_
