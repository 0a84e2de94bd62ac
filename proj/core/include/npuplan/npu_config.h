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

#ifndef NPUPLAN_NPU_CONFIG_H_
#define NPUPLAN_NPU_CONFIG_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "npuplan/types.h"

namespace npuplan {

enum class CostTerm {
  kIfmFull,
  kIfmPartial,
  kOfmFull,
  kOfmPartial,
  kWmPartial,
  kWPartial,
};
inline constexpr int kNumCostTerms = 6;

const char* to_string(CostTerm term);

// Replaces a computed cost term, either for every layer or per layer name.
struct CostOverride {
  std::optional<Bytes> all;
  std::map<std::string, Bytes> per_layer;
  bool empty() const { return !all && per_layer.empty(); }
};

// Rows held by the streaming input buffer.
enum class IfmBand {
  // kernel_h rows.
  kKernelRows,
  // The input rows feeding one row of output patches:
  // (patch_h - 1) * stride_h + kernel_h.
  kPatchRows,
};

struct NpuConfig {
  Bytes on_chip_bytes = 1048576;
  int element_bytes = 1;
  int maa_count = 16;
  int mac_count = 1024;
  int ifm_chunks = 4;
  int patch_h = 4;
  int patch_w = 4;
  int accum_bytes = 4;
  int double_buffer = 2;
  int alignment_bytes = 1;

  // Feature-map layout: spatial dims are stored padded up to these
  // multiples. 4x4 matches the MAA output patch; 1x1 is a dense layout.
  int layout_tile_h = 4;
  int layout_tile_w = 4;

  IfmBand ifm_band = IfmBand::kPatchRows;
  // Weight slices are staged through this many buffers.
  int weight_buffers = 1;
  // Each MAA stages its own input window next to its accumulators.
  bool window_staging = true;

  std::array<CostOverride, kNumCostTerms> overrides;

  // Textbook formulas on a dense layout: IFM bands of kernel_h rows,
  // double-buffered weights and accumulator-only working memory.
  static NpuConfig plain();

  // Throws Error{kSchema} on non-positive fields.
  void validate() const;
  // True when mac_count matches maa_count * patch area * ifm_chunks.
  bool mac_consistent() const;
};

Bytes align_up(Bytes bytes, int alignment);
int round_up(int value, int multiple);

// Bytes of a feature map stored with the configured layout and alignment.
Bytes tensor_bytes(const TensorShape& shape, const NpuConfig& cfg);

// Accepts the fields above as JSON; missing fields keep their defaults.
NpuConfig parse_npu_config(std::string_view text);
NpuConfig load_npu_config(const std::filesystem::path& path);
std::string npu_config_json(const NpuConfig& cfg);

}  // namespace npuplan

#endif  // NPUPLAN_NPU_CONFIG_H_
