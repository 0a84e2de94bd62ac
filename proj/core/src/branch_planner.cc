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

#include "npuplan/branch_planner.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace npuplan {

namespace {

enum class Side { kAny, kLo, kHi };

Side opposite(Side s) { return s == Side::kLo ? Side::kHi : Side::kLo; }

// Where a branch's final output goes.
struct Dest {
  bool on_chip = false;
  RegionRole role = RegionRole::kMofm;
  int live_to = 0;
  // Elementwise-add branch after the first under option II: the partial sum
  // is read back, accumulated and written again.
  bool read_modify_write = false;
  LayerId sum_tensor = kNoLayer;
};

class UnschedulableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptionIError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int count_ops(const ModuleDescriptor& m) {
  int n = 1;
  for (const Branch& br : m.branches) {
    n += static_cast<int>(br.layers.size());
    if (br.sub_module >= 0) n += count_ops(m.sub_modules[br.sub_module]);
  }
  return n;
}

void append_ops(const ModuleDescriptor& m, int top_branch,
                std::vector<Op>* ops) {
  for (int b : m.branch_order) {
    const Branch& br = m.branches[b];
    int tb = top_branch < 0 ? b : top_branch;
    for (LayerId l : br.layers) {
      Op op;
      op.layer = l;
      op.branch = tb;
      op.depth = m.depth;
      ops->push_back(op);
    }
    if (br.sub_module >= 0) {
      append_ops(m.sub_modules[br.sub_module], tb, ops);
    }
  }
  Op merge;
  merge.layer = m.merge;
  merge.is_merge = true;
  merge.branch = top_branch;
  merge.depth = m.depth;
  ops->push_back(merge);
}

// Walks a module in op order, deciding forwarding per layer (with a
// one-step backtrack) and placing regions in a two-ended layout: reserved
// MIFMs grow up from `lo`, branch outputs grow down from `hi`, and each
// layer's working set sits in the gap between them.
class Engine {
 public:
  Engine(const ModuleDescriptor& top, const NetworkGraph& g,
         const NpuConfig& cfg, ProcessingOption option)
      : top_(top), g_(g), cfg_(cfg), option_(option) {}

  void run() {
    ops_ = generate_op_sequence(top_);
    const int last = static_cast<int>(ops_.size()) - 1;
    const Bytes mifm = tensor_bytes(top_.input_shape, cfg_);
    if (mifm > cfg_.on_chip_bytes) {
      throw CapacityError("MIFM of " + std::to_string(mifm) +
                          " B exceeds on-chip capacity");
    }
    lo_ = mifm;
    hi_ = cfg_.on_chip_bytes;
    add_region(RegionRole::kMifm, 1, top_.start, 0, mifm, 0, last);
    Dest dest;
    if (option_ == ProcessingOption::kI) {
      dest.on_chip = true;
      dest.role = RegionRole::kMofm;
      dest.live_to = last;
    }
    process_module(top_, dest, /*top_level=*/true);
  }

  std::vector<RegionAssignment> regions;
  std::vector<BranchPlan> branches;
  bool all_forwarded = true;

 private:
  void add_region(RegionRole role, int depth, LayerId layer, Bytes offset,
                  Bytes size, int from, int to) {
    RegionAssignment r;
    r.region_id = static_cast<int>(regions.size());
    r.role = role;
    r.depth = depth;
    r.layer = layer;
    r.offset = offset;
    r.size = size;
    r.live_from = from;
    r.live_to = to;
    regions.push_back(r);
  }

  Bytes out_bytes(LayerId l) const {
    return tensor_bytes(g_.layer(l).out_shape(), cfg_);
  }

  int take_op(LayerId expect) {
    const Op& op = ops_.at(next_op_);
    if (op.layer != expect) throw std::logic_error("op sequence mismatch");
    return next_op_++;
  }

  void process_module(const ModuleDescriptor& m, const Dest& dest,
                      bool top_level) {
    const int merge_op = next_op_ + count_ops(m) - 1;
    for (std::size_t pos = 0; pos < m.branch_order.size(); ++pos) {
      const int b = m.branch_order[pos];
      const Branch& br = m.branches[b];
      if (br.is_identity()) continue;
      if (top_level) {
        branches.push_back({});
        branches.back().branch = b;
        branches.back().position = static_cast<int>(pos);
        cur_ = &branches.back();
        k_ = 0;
      }

      Dest d = dest;
      if (m.merge_kind == MergeKind::kElementwiseAdd && pos > 0) {
        if (d.on_chip) {
          // Second operand waits next to the running sum until the merge.
          d.role = RegionRole::kOfm;
          d.live_to = merge_op;
        } else {
          d.read_modify_write = true;
          d.sum_tensor = m.merge;
        }
      }
      // A pending add operand is consumed by the merge; its space returns.
      const Bytes hi_before = hi_;
      const bool nested = br.sub_module >= 0;
      process_chain(br.layers, m.depth, nested, d);
      if (!nested) {
        if (d.role == RegionRole::kOfm) hi_ = hi_before;
        continue;
      }

      const ModuleDescriptor& sub = m.sub_modules[br.sub_module];
      const LayerId s = br.layers.back();
      const Bytes size = out_bytes(s);
      if (sub_mifm_region_ < 0) {
        // The start layer streamed its output; load it back once.
        const int first = next_op_;
        add_region(RegionRole::kMifm, sub.depth, s, lo_, size, first, first);
        sub_mifm_region_ = static_cast<int>(regions.size()) - 1;
        Spill sp;
        sp.op = first;
        sp.tensor = s;
        sp.role = RegionRole::kMifm;
        sp.direction = SpillDirection::kRead;
        sp.bytes = size;
        pending_reload_ = sp;
      }
      const int mifm_region = sub_mifm_region_;
      sub_mifm_region_ = -1;
      lo_ += size;
      if (lo_ > hi_) {
        throw CapacityError("nested MIFM stack exceeds free on-chip memory");
      }
      process_module(sub, d, /*top_level=*/false);
      regions[mifm_region].live_to = next_op_ - 1;
      lo_ -= size;
      if (d.role == RegionRole::kOfm) hi_ = hi_before;
    }
    take_op(m.merge);
  }

  void process_chain(const std::vector<LayerId>& layers, int depth,
                     bool ends_in_sub, const Dest& dest) {
    const int n = static_cast<int>(layers.size());
    const Bytes avail = hi_ - lo_;
    std::vector<CostComponents> c(n);
    for (int k = 0; k < n; ++k) c[k] = cost_components(g_.layer(layers[k]), cfg_);

    std::vector<char> keep(n, 0), in_full(n, 0);
    std::vector<Bytes> req(n, 0);
    for (int k = 0; k < n; ++k) {
      const bool final = k == n - 1 && !ends_in_sub;
      const bool must_keep = final && dest.on_chip;
      const bool streamed = final && !dest.on_chip;
      in_full[k] = k > 0 && keep[k - 1];
      bool fits = false;
      for (int attempt = 0; attempt < 2; ++attempt) {
        Bytes in = in_full[k] ? std::max(c[k].ifm_full, c[k - 1].ofm_full)
                              : c[k].ifm_partial;
        Bytes out = streamed ? c[k].ofm_partial : c[k].ofm_full;
        req[k] = in + out + c[k].wm_partial + c[k].w_partial;
        keep[k] = !streamed && req[k] <= avail;
        fits = keep[k] || (!must_keep &&
                           in + c[k].ofm_partial + c[k].wm_partial +
                                   c[k].w_partial <=
                               avail);
        if (fits || !in_full[k]) break;
        // Spill the producer instead and stream the input back in.
        keep[k - 1] = 0;
        in_full[k] = 0;
      }
      if (!fits) {
        const std::string& name = g_.layer(layers[k]).name;
        if (must_keep) {
          throw OptionIError("output of '" + name + "' does not fit on chip");
        }
        throw UnschedulableError("layer '" + name +
                                 "' does not fit even when streamed");
      }
    }

    // Side of the gap each kept output must land on so that every consumer
    // finds its input at one end and its own output at the other.
    std::vector<Side> need(n, Side::kAny);
    if (!ends_in_sub && dest.on_chip) need[n - 1] = Side::kHi;
    if (ends_in_sub && keep[n - 1]) need[n - 1] = Side::kLo;
    for (int k = n - 2; k >= 0; --k) {
      if (keep[k]) need[k] = need[k + 1] == Side::kLo ? Side::kHi : Side::kLo;
    }

    int prev_region = -1;
    Side prev_side = Side::kAny;
    for (int k = 0; k < n; ++k) {
      const LayerId l = layers[k];
      const int t = take_op(l);
      const bool final = k == n - 1 && !ends_in_sub;
      const bool sub_start = k == n - 1 && ends_in_sub;
      LayerRecord rec;
      rec.layer = l;
      rec.k = ++k_;
      rec.depth = depth;
      rec.op = t;
      rec.size_req = req[k];
      rec.size_avail = avail;
      rec.fwd = keep[k];
      if (!keep[k]) all_forwarded = false;

      Side ofm_side, ifm_side;
      Bytes in_size;
      if (in_full[k]) {
        ifm_side = prev_side;
        ofm_side = opposite(ifm_side);
        in_size = regions[prev_region].size;
        regions[prev_region].live_to = t;
        if (need[k] != Side::kAny && need[k] != ofm_side) {
          throw std::logic_error("forwarding side conflict");
        }
      } else {
        ofm_side = need[k] == Side::kAny ? Side::kHi : need[k];
        ifm_side = opposite(ofm_side);
        in_size = c[k].ifm_partial;
      }
      const Bytes out_size = keep[k] ? c[k].ofm_full : c[k].ofm_partial;
      const Bytes w = c[k].w_partial, wm = c[k].wm_partial;
      if (in_size + w + wm + out_size > hi_ - lo_) {
        throw std::logic_error("placement exceeds gap");
      }
      // Input end of the gap: input, then weights, then working memory.
      Bytes in_off, w_off, wm_off, out_off;
      if (ifm_side == Side::kLo) {
        in_off = lo_;
        w_off = in_off + in_size;
        wm_off = w_off + w;
        out_off = hi_ - out_size;
      } else {
        in_off = hi_ - in_size;
        w_off = in_off - w;
        wm_off = w_off - wm;
        out_off = lo_;
      }
      if (!in_full[k]) {
        add_region(RegionRole::kIfm, 0, l, in_off, in_size, t, t);
      }
      if (w > 0) add_region(RegionRole::kW, 0, l, w_off, w, t, t);
      if (wm > 0) add_region(RegionRole::kWm, 0, l, wm_off, wm, t, t);

      if (final && dest.on_chip) {
        add_region(dest.role, 0, l, out_off, out_size, t, dest.live_to);
      } else if (sub_start && keep[k]) {
        add_region(RegionRole::kMifm, depth + 1, l, out_off, out_size, t, t);
        sub_mifm_region_ = static_cast<int>(regions.size()) - 1;
      } else {
        add_region(RegionRole::kOfm, 0, l, out_off, out_size, t, t);
      }
      prev_region = static_cast<int>(regions.size()) - 1;
      prev_side = ofm_side;

      if (pending_reload_) {
        rec.spills.push_back(*pending_reload_);
        pending_reload_.reset();
      }
      if (k > 0 && !in_full[k]) {
        Spill sp;
        sp.op = t;
        sp.tensor = layers[k - 1];
        sp.role = RegionRole::kIfm;
        sp.direction = SpillDirection::kRead;
        sp.bytes = out_bytes(layers[k - 1]);
        rec.spills.push_back(sp);
      }
      if (final && dest.read_modify_write) {
        Spill sp;
        sp.op = t;
        sp.tensor = dest.sum_tensor;
        sp.role = RegionRole::kMofm;
        sp.direction = SpillDirection::kRead;
        sp.bytes = out_bytes(l);
        rec.spills.push_back(sp);
      }
      if (!keep[k]) {
        Spill sp;
        sp.op = t;
        sp.tensor = l;
        sp.role = RegionRole::kOfm;
        sp.direction = SpillDirection::kWrite;
        sp.bytes = out_bytes(l);
        rec.spills.push_back(sp);
      }
      cur_->layers.push_back(std::move(rec));
    }
    if (!ends_in_sub && dest.on_chip) hi_ -= regions[prev_region].size;
  }

  const ModuleDescriptor& top_;
  const NetworkGraph& g_;
  const NpuConfig& cfg_;
  ProcessingOption option_;
  std::vector<Op> ops_;
  int next_op_ = 0;
  Bytes lo_ = 0;
  Bytes hi_ = 0;
  BranchPlan* cur_ = nullptr;
  int k_ = 0;
  int sub_mifm_region_ = -1;
  std::optional<Spill> pending_reload_;
};

struct EngineResult {
  std::vector<RegionAssignment> regions;
  std::vector<BranchPlan> branches;
  bool all_forwarded = false;
};

EngineResult run_engine(const ModuleDescriptor& m, const NetworkGraph& g,
                        const NpuConfig& cfg, ProcessingOption option) {
  Engine e(m, g, cfg, option);
  e.run();
  return {std::move(e.regions), std::move(e.branches), e.all_forwarded};
}

Bytes sum_spills(const std::vector<Spill>& spills) {
  Bytes total = 0;
  for (const Spill& s : spills) total += s.bytes;
  return total;
}

void mirror(AllocationPlan* plan, Bytes on_chip) {
  for (RegionAssignment& r : plan->regions) {
    r.offset = on_chip - r.offset - r.size;
  }
}

}  // namespace

const char* to_string(ProcessingOption option) {
  switch (option) {
    case ProcessingOption::kI:
      return "I";
    case ProcessingOption::kII:
      return "II";
    case ProcessingOption::kNaive:
      return "naive";
  }
  return "?";
}

std::optional<ForceOption> parse_force_option(const std::string& text) {
  if (text == "auto") return ForceOption::kAuto;
  if (text == "I") return ForceOption::kI;
  if (text == "II") return ForceOption::kII;
  if (text == "naive") return ForceOption::kNaive;
  return std::nullopt;
}

const char* to_string(MifmSource s) {
  return s == MifmSource::kOnChipForwarded ? "on-chip-forwarded" : "off-chip";
}

const char* to_string(MofmSink s) {
  return s == MofmSink::kForwardedToNext ? "forwarded-to-next" : "off-chip";
}

const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::kPlanned:
      return "planned";
    case PlanStatus::kForcedNaive:
      return "forced-naive";
    case PlanStatus::kCapacityFallback:
      return "capacity-fallback";
    case PlanStatus::kUnschedulableFallback:
      return "unschedulable-fallback";
    case PlanStatus::kOptionIFallback:
      return "option-i-fallback";
    case PlanStatus::kNoGainFallback:
      return "no-gain-fallback";
  }
  return "?";
}

std::vector<Spill> AllocationPlan::all_spills() const {
  std::vector<Spill> out;
  for (const BranchPlan& bp : branches) {
    for (const LayerRecord& r : bp.layers) {
      out.insert(out.end(), r.spills.begin(), r.spills.end());
    }
  }
  out.insert(out.end(), boundary_spills.begin(), boundary_spills.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Spill& a, const Spill& b) { return a.op < b.op; });
  return out;
}

Bytes AllocationPlan::spill_bytes() const { return sum_spills(all_spills()); }

Bytes calc_size_req_mem(const LayerNode& layer, const NpuConfig& cfg) {
  CostComponents c = cost_components(layer, cfg);
  return c.ifm_full + c.ofm_full + c.wm_partial + c.w_partial;
}

Bytes calc_size_req_mem(const ModuleDescriptor& module,
                        const NetworkGraph& graph, int b,
                        const NpuConfig& cfg) {
  Bytes best = 0;
  for (LayerId l : branch_layers(module, b)) {
    const LayerNode& node = graph.layer(l);
    if (is_merge(node.kind)) continue;
    best = std::max(best, calc_size_req_mem(node, cfg));
  }
  return best;
}

std::vector<int> reorder_by_size(const std::vector<Bytes>& size_req) {
  std::vector<int> order(size_req.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return size_req[a] > size_req[b];
  });
  return order;
}

std::vector<int> reorder_branches(ModuleDescriptor& module,
                                  const NetworkGraph& graph,
                                  const NpuConfig& cfg) {
  for (ModuleDescriptor& sub : module.sub_modules) {
    reorder_branches(sub, graph, cfg);
  }
  std::vector<Bytes> sizes;
  for (std::size_t b = 0; b < module.branches.size(); ++b) {
    sizes.push_back(
        calc_size_req_mem(module, graph, static_cast<int>(b), cfg));
  }
  module.branch_order = reorder_by_size(sizes);
  return module.branch_order;
}

std::vector<Op> generate_op_sequence(const ModuleDescriptor& module) {
  std::vector<Op> ops;
  append_ops(module, -1, &ops);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    ops[i].index = static_cast<int>(i);
  }
  return ops;
}

ProcessingOption choose_processing_option(const ModuleDescriptor& module,
                                          const NetworkGraph& graph,
                                          const NpuConfig& cfg) {
  try {
    if (run_engine(module, graph, cfg, ProcessingOption::kI).all_forwarded) {
      return ProcessingOption::kI;
    }
  } catch (const std::runtime_error&) {
  }
  return ProcessingOption::kII;
}

std::optional<BranchPlan> br_process(const ModuleDescriptor& module,
                                     const NetworkGraph& graph, int position,
                                     ProcessingOption option,
                                     const NpuConfig& cfg) {
  try {
    EngineResult r = run_engine(module, graph, cfg, option);
    for (BranchPlan& bp : r.branches) {
      if (bp.position == position) return std::move(bp);
    }
    return BranchPlan{module.branch_order.at(position), position, {}};
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

Bytes naive_fm_bytes(const ModuleDescriptor& module, const NetworkGraph& graph,
                     const NpuConfig& cfg) {
  Bytes total = 0;
  for (LayerId l : module_layers(module)) {
    const LayerNode& node = graph.layer(l);
    if (is_merge(node.kind)) continue;
    total += tensor_bytes(node.in_shape(), cfg) +
             tensor_bytes(node.out_shape(), cfg);
  }
  return total;
}

AllocationPlan build_allocation_plan(const ModuleDescriptor& module,
                                     const NetworkGraph& graph,
                                     const NpuConfig& cfg,
                                     const PlanContext& ctx) {
  AllocationPlan plan;
  plan.module_index = module.module_index;
  plan.module_name = module.name;
  plan.branch_order = module.branch_order;
  plan.ops = generate_op_sequence(module);
  plan.mifm_source = ctx.mifm_source;
  plan.mofm_sink = MofmSink::kOffChip;
  plan.mifm_at_top = ctx.mifm_at_top;

  auto fall_back = [&](PlanStatus status, const std::string& detail) {
    plan.option = ProcessingOption::kNaive;
    plan.status = status;
    plan.status_detail = detail;
    plan.branches.clear();
    plan.regions.clear();
    plan.mifm_source = MifmSource::kOffChip;
    return plan;
  };
  if (ctx.force == ForceOption::kNaive) {
    return fall_back(PlanStatus::kForcedNaive, "");
  }

  EngineResult result;
  try {
    if (ctx.force == ForceOption::kAuto) {
      bool chose_i = false;
      try {
        result = run_engine(module, graph, cfg, ProcessingOption::kI);
        chose_i = result.all_forwarded;
      } catch (const OptionIError&) {
      } catch (const UnschedulableError&) {
      }
      plan.option = chose_i ? ProcessingOption::kI : ProcessingOption::kII;
      if (!chose_i) {
        result = run_engine(module, graph, cfg, ProcessingOption::kII);
      }
    } else {
      plan.option = ctx.force == ForceOption::kI ? ProcessingOption::kI
                                                 : ProcessingOption::kII;
      result = run_engine(module, graph, cfg, plan.option);
    }
  } catch (const CapacityError& e) {
    return fall_back(PlanStatus::kCapacityFallback, e.what());
  } catch (const UnschedulableError& e) {
    return fall_back(PlanStatus::kUnschedulableFallback, e.what());
  } catch (const OptionIError& e) {
    return fall_back(PlanStatus::kOptionIFallback, e.what());
  }

  plan.regions = std::move(result.regions);
  plan.branches = std::move(result.branches);
  if (ctx.count_mifm_read && ctx.mifm_source == MifmSource::kOffChip) {
    Spill sp;
    sp.op = 0;
    sp.tensor = module.start;
    sp.role = RegionRole::kMifm;
    sp.direction = SpillDirection::kRead;
    sp.bytes = tensor_bytes(module.input_shape, cfg);
    plan.boundary_spills.push_back(sp);
  }
  const Bytes naive = naive_fm_bytes(module, graph, cfg);
  if (plan.spill_bytes() > naive) {
    return fall_back(PlanStatus::kNoGainFallback,
                     std::to_string(plan.spill_bytes()) +
                         " B of spills exceed the naive " +
                         std::to_string(naive) + " B");
  }
  if (plan.mifm_at_top) mirror(&plan, cfg.on_chip_bytes);
  return plan;
}

NetworkPlan plan_network(const NetworkGraph& graph,
                         std::vector<ModuleDescriptor> modules,
                         const NpuConfig& cfg,
                         const NetworkPlanOptions& options) {
  NetworkPlan out;
  for (ModuleDescriptor& m : modules) reorder_branches(m, graph, cfg);

  const std::size_t n = modules.size();
  // chained[i]: module i consumes module i-1's merge output directly.
  std::vector<char> chained(n, 0), exclusive(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    chained[i] = modules[i].start == modules[i - 1].merge;
    if (!chained[i]) continue;
    auto inside = module_layers(modules[i]);
    std::set<LayerId> layers(inside.begin(), inside.end());
    layers.insert(modules[i].merge);
    exclusive[i] = 1;
    for (LayerId s : graph.succs[index(modules[i].start)]) {
      if (!layers.count(s)) exclusive[i] = 0;
    }
  }

  // First pass: options and per-module plans. Forwarding only changes
  // boundary transfers and address orientation, not the arithmetic.
  for (std::size_t i = 0; i < n; ++i) {
    PlanContext ctx;
    ctx.force = options.force;
    out.plans.push_back(build_allocation_plan(modules[i], graph, cfg, ctx));
  }

  bool prev_top = false;
  for (std::size_t i = 0; i < n; ++i) {
    AllocationPlan& plan = out.plans[i];
    const bool forwarded =
        i > 0 && chained[i] && exclusive[i] &&
        out.plans[i - 1].option == ProcessingOption::kI &&
        plan.option != ProcessingOption::kNaive;
    if (forwarded) out.plans[i - 1].mofm_sink = MofmSink::kForwardedToNext;
    if (plan.fallback()) {
      prev_top = false;
      continue;
    }
    plan.mifm_source =
        forwarded ? MifmSource::kOnChipForwarded : MifmSource::kOffChip;
    plan.mifm_at_top = forwarded ? !prev_top : false;
    if (plan.mifm_at_top) mirror(&plan, cfg.on_chip_bytes);
    prev_top = plan.mifm_at_top;
    if (!forwarded && (options.whole_network || chained[i])) {
      Spill sp;
      sp.op = 0;
      sp.tensor = modules[i].start;
      sp.role = RegionRole::kMifm;
      sp.direction = SpillDirection::kRead;
      sp.bytes = tensor_bytes(modules[i].input_shape, cfg);
      plan.boundary_spills.push_back(sp);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    AllocationPlan& plan = out.plans[i];
    if (plan.option != ProcessingOption::kI ||
        plan.mofm_sink == MofmSink::kForwardedToNext) {
      continue;
    }
    const bool consumer_is_module = i + 1 < n && chained[i + 1];
    if (options.whole_network || consumer_is_module) {
      Spill sp;
      sp.op = static_cast<int>(plan.ops.size()) - 1;
      sp.tensor = modules[i].merge;
      sp.role = RegionRole::kMofm;
      sp.direction = SpillDirection::kWrite;
      sp.bytes = tensor_bytes(modules[i].output_shape, cfg);
      plan.boundary_spills.push_back(sp);
    }
  }

  for (const AllocationPlan& plan : out.plans) {
    if (plan.status == PlanStatus::kPlanned ||
        plan.status == PlanStatus::kForcedNaive) {
      continue;
    }
    out.diagnostics.push_back(
        {Severity::kWarning,
         plan.status == PlanStatus::kCapacityFallback       ? "W-PLAN-CAPACITY"
         : plan.status == PlanStatus::kUnschedulableFallback ? "W-PLAN-UNSCHEDULABLE"
         : plan.status == PlanStatus::kOptionIFallback       ? "W-PLAN-OPTION-I"
                                                             : "W-PLAN-NO-GAIN",
         "module '" + plan.module_name + "' processed naively: " +
             plan.status_detail});
  }
  out.modules = std::move(modules);
  return out;
}

}  // namespace npuplan
