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

#ifndef NPUPLAN_MEM_MODEL_H_
#define NPUPLAN_MEM_MODEL_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "npuplan/graph.h"
#include "npuplan/module_detect.h"
#include "npuplan/npu_config.h"

namespace npuplan {

struct CostComponents {
  Bytes ifm_full = 0;
  Bytes ifm_partial = 0;
  Bytes ofm_full = 0;
  Bytes ofm_partial = 0;
  Bytes wm_partial = 0;
  Bytes w_partial = 0;

  Bytes term(CostTerm t) const;
};

// Per-layer on-chip footprint terms. Overrides in cfg win over the model.
CostComponents cost_components(const LayerNode& layer, const NpuConfig& cfg);

enum class RegionRole { kMifm, kMofm, kOfm, kIfm, kWm, kW };
const char* to_string(RegionRole role);

struct RegionAssignment {
  int region_id = 0;
  RegionRole role = RegionRole::kOfm;
  // MIFM nesting depth; 0 for other roles.
  int depth = 0;
  // Layer whose output tensor (or whose working set) the region holds.
  LayerId layer = kNoLayer;
  Bytes offset = 0;
  Bytes size = 0;
  // Inclusive op-sequence indices.
  int live_from = 0;
  int live_to = 0;

  Bytes end() const { return offset + size; }
};

// Thrown when reserved regions alone exceed on-chip capacity.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MifmEntry {
  int depth = 1;
  // Start layer of the depth-`depth` module; its output is the MIFM.
  LayerId source = kNoLayer;
  Bytes size = 0;
  // Relative to the base of the MIFM stack.
  Bytes offset = 0;
};

// MIFM regions live while `layer` runs, depth 1 first, stacked from the
// base. Throws CapacityError when the stack exceeds cfg.on_chip_bytes.
std::vector<MifmEntry> calc_mifm_mem(const ModuleDescriptor& module,
                                     const NetworkGraph& graph, LayerId layer,
                                     const NpuConfig& cfg);

struct MofmOccupancy {
  // Bytes of the MOFM region already holding earlier branch outputs.
  Bytes size = 0;
  // Where this branch's output lands inside the MOFM region.
  Bytes offset = 0;
};

// `position` is 0-based in processing order (branch_order).
MofmOccupancy calc_mofm_occupied(const ModuleDescriptor& module,
                                 const NetworkGraph& graph, int position,
                                 const NpuConfig& cfg);

// Same rule on raw output sizes given in processing order.
MofmOccupancy mofm_occupancy(const std::vector<Bytes>& outputs,
                             MergeKind kind, int position);

}  // namespace npuplan

#endif  // NPUPLAN_MEM_MODEL_H_
