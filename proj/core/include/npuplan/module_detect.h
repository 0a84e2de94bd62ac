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

#ifndef NPUPLAN_MODULE_DETECT_H_
#define NPUPLAN_MODULE_DETECT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npuplan/graph.h"
#include "npuplan/npu_config.h"
#include "npuplan/types.h"

namespace npuplan {

struct SkipLimits {
  // An edge is a long skip when some other path between its endpoints has
  // more interior layers than this.
  int max_span_layers = 8;
  // Also sever skips whose source tensor alone does not fit on chip.
  bool capacity_check = true;
};

// The network with long skip-connections removed. Severed edges are fed
// from off-chip memory at their destination.
struct EffectiveGraph {
  NetworkGraph base;
  std::vector<Edge> severed_edges;
  std::vector<LayerId> off_chip_sources;  // sorted, unique
  std::vector<std::vector<LayerId>> preds;
  std::vector<std::vector<LayerId>> succs;

  bool is_off_chip_source(LayerId id) const;
};

// Wraps a graph without severing anything.
EffectiveGraph make_effective(const NetworkGraph& graph);

EffectiveGraph strip_long_skips(const NetworkGraph& graph,
                                const SkipLimits& limits,
                                const NpuConfig& cfg,
                                Diagnostics* diags = nullptr);

enum class MergeKind { kConcatenation, kElementwiseAdd };
const char* to_string(MergeKind kind);

struct Branch {
  // Layers of this branch at the module's own depth, in execution order.
  // Empty for an identity shortcut.
  std::vector<LayerId> layers;
  // When >= 0 the branch ends in sub_modules[sub_module], whose start layer
  // is layers.back() and whose merge feeds this module's merge directly.
  int sub_module = -1;

  bool is_identity() const { return layers.empty(); }
};

struct ModuleDescriptor {
  int module_index = 0;
  std::string name;
  LayerId start = kNoLayer;
  LayerId merge = kNoLayer;
  MergeKind merge_kind = MergeKind::kConcatenation;
  // 1 for top-level modules.
  int depth = 1;
  // Branch b is terminated by the b-th predecessor of the merge layer.
  std::vector<Branch> branches;
  // Processing order as indices into `branches`; identity until reordered.
  std::vector<int> branch_order;
  std::vector<ModuleDescriptor> sub_modules;
  // Nesting depth of every layer inside the module, nested merges included.
  std::map<LayerId, int> depth_map;

  TensorShape input_shape;
  TensorShape output_shape;
  std::vector<TensorShape> branch_output_shapes;
};

// Every layer of branch b, nested modules and their merges included, in
// original (unreordered) order.
std::vector<LayerId> branch_layers(const ModuleDescriptor& m, int b);
// All interior layers (excluding start and merge).
std::vector<LayerId> module_layers(const ModuleDescriptor& m);
// Interior layers that are not merges.
int non_merge_layer_count(const ModuleDescriptor& m, const NetworkGraph& g);
int max_depth(const ModuleDescriptor& m);

// Nearest common dominator of the merge layer's effective predecessors,
// or nullopt when some predecessor is unreachable from the input.
std::optional<LayerId> search_start_layer(const EffectiveGraph& eff,
                                          LayerId merge);

struct ExtractResult {
  std::optional<ModuleDescriptor> module;
  // Set when module is empty: stable diagnostic code and explanation.
  std::string code;
  std::string reason;
};

// Builds the descriptor for the region between start and merge, recursing
// into nested modules that end a branch.
ExtractResult extract_module_params(const EffectiveGraph& eff, LayerId start,
                                    LayerId merge);

// Top-level modules in topological order of their merge layers. Merges that
// do not form a valid module are reported in diags and left untouched.
std::vector<ModuleDescriptor> detect_modules(const EffectiveGraph& eff,
                                             Diagnostics* diags = nullptr);

}  // namespace npuplan

#endif  // NPUPLAN_MODULE_DETECT_H_
