// core/include/gid/errors.h

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

#ifndef GID_ERRORS_H_
#define GID_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gid {

/// Broad failure class; the CLI maps it onto its exit codes.
enum class ErrorClass { kUsage, kData, kTraining };

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string &what)
      : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

#define GID_DECLARE_ERROR(Name, Class, prefix)                  \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string &what)                      \
        : Error(ErrorClass::Class, std::string(prefix) + what) {} \
  };

GID_DECLARE_ERROR(ConfigError, kUsage, "configuration error: ")
GID_DECLARE_ERROR(SchemaError, kData, "schema error: ")
GID_DECLARE_ERROR(CorpusError, kData, "corpus error: ")
GID_DECLARE_ERROR(IterationError, kData, "iteration error: ")
GID_DECLARE_ERROR(FixtureError, kData, "fixture error: ")
GID_DECLARE_ERROR(GenerationError, kData, "generation error: ")
GID_DECLARE_ERROR(EncodeError, kData, "encode error: ")
GID_DECLARE_ERROR(CapabilityError, kData, "capability error: ")
GID_DECLARE_ERROR(CoverageError, kData, "coverage error: ")
GID_DECLARE_ERROR(VerbalizerError, kData, "verbalizer error: ")
GID_DECLARE_ERROR(ShapeError, kData, "shape error: ")
GID_DECLARE_ERROR(EvaluationError, kData, "evaluation error: ")
GID_DECLARE_ERROR(CheckpointError, kData, "checkpoint error: ")
GID_DECLARE_ERROR(TrainingError, kTraining, "training error: ")

#undef GID_DECLARE_ERROR

/// Provider output that could not be parsed; keeps the raw payload.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::string raw)
      : Error(ErrorClass::kData, "parse error: " + what), raw_(std::move(raw)) {}
  const std::string &raw_payload() const { return raw_; }

 private:
  std::string raw_;
};

}  // namespace gid

#endif  // GID_ERRORS_H_
