/* Copyright 2026 The NpuPlan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef NPUPLAN_TYPES_H_
#define NPUPLAN_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace npuplan {

using Bytes = std::int64_t;

// Dense index of a layer inside its NetworkGraph.
enum class LayerId : std::int32_t {};

inline constexpr LayerId kNoLayer = static_cast<LayerId>(-1);

constexpr std::int32_t index(LayerId id) { return static_cast<std::int32_t>(id); }
constexpr LayerId layer_id(std::int32_t i) { return static_cast<LayerId>(i); }

struct TensorShape {
  int h = 0;
  int w = 0;
  int c = 0;
  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

// Error classes; each maps to a distinct process exit code in the CLI.
enum class ErrorCode {
  kUsage,
  kFile,
  kParse,
  kSchema,
  kCycle,
  kShape,
  kComparison,
};

const char* error_tag(ErrorCode code);
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Cycle errors also carry the offending cycle, in edge order.
class CycleError : public Error {
 public:
  CycleError(const std::string& what, std::vector<std::string> cycle)
      : Error(ErrorCode::kCycle, what), cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

enum class Severity { kInfo, kWarning };

// Non-fatal findings. `code` is stable and meant to be matched by tools.
struct Diagnostic {
  Severity severity = Severity::kWarning;
  std::string code;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace npuplan

#endif  // NPUPLAN_TYPES_H_
