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

#ifndef NPUPLAN_BRANCH_PLANNER_H_
#define NPUPLAN_BRANCH_PLANNER_H_

#include <optional>
#include <string>
#include <vector>

#include "npuplan/graph.h"
#include "npuplan/mem_model.h"
#include "npuplan/module_detect.h"
#include "npuplan/npu_config.h"

namespace npuplan {

// kNaive bypasses planning: every layer reads and writes off-chip.
enum class ProcessingOption { kI, kII, kNaive };
const char* to_string(ProcessingOption option);

enum class ForceOption { kAuto, kI, kII, kNaive };
std::optional<ForceOption> parse_force_option(const std::string& text);

enum class SpillDirection { kRead, kWrite };

// One off-chip feature-map transfer.
struct Spill {
  int op = 0;
  // Producer of the transferred tensor.
  LayerId tensor = kNoLayer;
  RegionRole role = RegionRole::kOfm;
  SpillDirection direction = SpillDirection::kWrite;
  Bytes bytes = 0;
};

struct LayerRecord {
  LayerId layer = kNoLayer;
  // 1-based position on the (flattened) branch.
  int k = 0;
  int depth = 1;
  int op = 0;
  Bytes size_req = 0;
  Bytes size_avail = 0;
  bool fwd = false;
  std::vector<Spill> spills;
};

struct BranchPlan {
  // Index into ModuleDescriptor::branches.
  int branch = 0;
  // 0-based position in processing order.
  int position = 0;
  std::vector<LayerRecord> layers;
};

enum class MifmSource { kOnChipForwarded, kOffChip };
enum class MofmSink { kForwardedToNext, kOffChip };
const char* to_string(MifmSource s);
const char* to_string(MofmSink s);

enum class PlanStatus {
  kPlanned,
  kForcedNaive,
  // Reserved regions exceed capacity.
  kCapacityFallback,
  // Even a fully streamed layer does not fit.
  kUnschedulableFallback,
  // Forced option I cannot keep a branch output on chip.
  kOptionIFallback,
  // The plan would move more bytes than the naive schedule.
  kNoGainFallback,
};
const char* to_string(PlanStatus s);

struct Op {
  int index = 0;
  LayerId layer = kNoLayer;
  bool is_merge = false;
  // Top-level branch index, -1 for the module's own merge.
  int branch = -1;
  int depth = 1;
};

struct AllocationPlan {
  int module_index = 0;
  std::string module_name;
  ProcessingOption option = ProcessingOption::kI;
  PlanStatus status = PlanStatus::kPlanned;
  std::string status_detail;
  std::vector<int> branch_order;
  std::vector<BranchPlan> branches;
  std::vector<RegionAssignment> regions;
  std::vector<Op> ops;
  MifmSource mifm_source = MifmSource::kOffChip;
  MofmSink mofm_sink = MofmSink::kOffChip;
  // MIFM loads and MOFM stores at the module boundary.
  std::vector<Spill> boundary_spills;
  // The MIFM stack grows down from the top of memory when set, which lets a
  // forwarded MOFM become the next module's MIFM in place.
  bool mifm_at_top = false;

  bool fallback() const { return option == ProcessingOption::kNaive; }
  std::vector<Spill> all_spills() const;
  Bytes spill_bytes() const;
};

// ifm_full + ofm_full + wm_partial + w_partial of one layer.
Bytes calc_size_req_mem(const LayerNode& layer, const NpuConfig& cfg);
// Largest per-layer value over branch b, nested layers included; 0 for an
// identity branch.
Bytes calc_size_req_mem(const ModuleDescriptor& module,
                        const NetworkGraph& graph, int b,
                        const NpuConfig& cfg);

// Stable descending sort of branch indices by size.
std::vector<int> reorder_by_size(const std::vector<Bytes>& size_req);

// Sorts the branches of module and of every nested module; stores the order
// in branch_order and returns the top-level permutation.
std::vector<int> reorder_branches(ModuleDescriptor& module,
                                  const NetworkGraph& graph,
                                  const NpuConfig& cfg);

// Ops in processing order: branches in branch_order, nested modules
// expanded in place, each merge after its branches.
std::vector<Op> generate_op_sequence(const ModuleDescriptor& module);

// I when every layer fits with MIFM and MOFM reserved; II otherwise.
ProcessingOption choose_processing_option(const ModuleDescriptor& module,
                                          const NetworkGraph& graph,
                                          const NpuConfig& cfg);

// The branch at `position` of branch_order under the given option.
// Returns nullopt when the option cannot be scheduled.
std::optional<BranchPlan> br_process(const ModuleDescriptor& module,
                                     const NetworkGraph& graph, int position,
                                     ProcessingOption option,
                                     const NpuConfig& cfg);

struct PlanContext {
  MifmSource mifm_source = MifmSource::kOffChip;
  // Record a load of the MIFM when it comes from off chip.
  bool count_mifm_read = false;
  bool mifm_at_top = false;
  ForceOption force = ForceOption::kAuto;
};

// Plans one module. The MOFM sink is left off-chip; plan_network links
// consecutive modules. Fallbacks are reported through status, never thrown.
AllocationPlan build_allocation_plan(const ModuleDescriptor& module,
                                     const NetworkGraph& graph,
                                     const NpuConfig& cfg,
                                     const PlanContext& ctx);

struct NetworkPlanOptions {
  ForceOption force = ForceOption::kAuto;
  // Count boundary transfers to and from layers outside all modules.
  bool whole_network = false;
};

struct NetworkPlan {
  std::vector<ModuleDescriptor> modules;  // reordered
  std::vector<AllocationPlan> plans;
  Diagnostics diagnostics;
};

NetworkPlan plan_network(const NetworkGraph& graph,
                         std::vector<ModuleDescriptor> modules,
                         const NpuConfig& cfg,
                         const NetworkPlanOptions& options);

// Naive FM bytes of a module: one IFM read and one OFM write per non-merge
// layer.
Bytes naive_fm_bytes(const ModuleDescriptor& module, const NetworkGraph& graph,
                     const NpuConfig& cfg);

}  // namespace npuplan

#endif  // NPUPLAN_BRANCH_PLANNER_H_
