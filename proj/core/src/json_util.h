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

// Internal helpers shared by the document readers.

#ifndef NPUPLAN_SRC_JSON_UTIL_H_
#define NPUPLAN_SRC_JSON_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "npuplan/types.h"

namespace npuplan::internal {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Parses text, mapping syntax errors to Error{kParse} with line/column.
Json parse_json_document(std::string_view text, std::string_view what);

std::string read_text_file(const std::filesystem::path& path);

[[noreturn]] void field_error(const std::string& path, const std::string& msg);

// Integer field accessors; path is used in error messages only.
long long get_int(const Json& obj, const std::string& key,
                  const std::string& path);
int get_positive_int(const Json& obj, const std::string& key,
                     const std::string& path);

}  // namespace npuplan::internal

#endif  // NPUPLAN_SRC_JSON_UTIL_H_
