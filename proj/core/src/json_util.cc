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

#include "json_util.h"

#include <fstream>
#include <limits>
#include <sstream>

namespace npuplan::internal {

Json parse_json_document(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    if (byte > text.size()) byte = text.size();
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << what << ": line " << line << ", column " << column
        << ": malformed document";
    throw Error(ErrorCode::kParse, msg.str());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFile, "cannot read '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorCode::kFile, "error reading '" + path.string() + "'");
  }
  return buf.str();
}

void field_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kParse, "field " + path + ": " + msg);
}

long long get_int(const Json& obj, const std::string& key,
                  const std::string& path) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) field_error(path + "." + key, "expected integer");
  return v.get<long long>();
}

int get_positive_int(const Json& obj, const std::string& key,
                     const std::string& path) {
  long long v = get_int(obj, key, path);
  if (v <= 0 || v > std::numeric_limits<int>::max()) {
    field_error(path + "." + key, "expected positive integer");
  }
  return static_cast<int>(v);
}

}  // namespace npuplan::internal
