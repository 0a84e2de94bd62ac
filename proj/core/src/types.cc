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

#include "npuplan/types.h"

namespace npuplan {

const char* error_tag(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return "E-USAGE";
    case ErrorCode::kFile:
      return "E-FILE";
    case ErrorCode::kParse:
      return "E-PARSE";
    case ErrorCode::kSchema:
      return "E-SCHEMA";
    case ErrorCode::kCycle:
      return "E-CYCLE";
    case ErrorCode::kShape:
      return "E-SHAPE";
    case ErrorCode::kComparison:
      return "E-COMPARE";
  }
  return "E-UNKNOWN";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return 2;
    case ErrorCode::kFile:
      return 3;
    case ErrorCode::kParse:
      return 4;
    case ErrorCode::kSchema:
      return 5;
    case ErrorCode::kCycle:
      return 6;
    case ErrorCode::kShape:
      return 7;
    case ErrorCode::kComparison:
      return 8;
  }
  return 1;
}

}  // namespace npuplan
