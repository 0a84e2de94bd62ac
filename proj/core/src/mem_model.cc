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

#include "npuplan/mem_model.h"

#include <algorithm>

namespace npuplan {

namespace {

// Modules enclosing `layer`, outermost first. Empty when not inside.
bool enclosing_path(const ModuleDescriptor& m, LayerId layer,
                    std::vector<const ModuleDescriptor*>* path) {
  path->push_back(&m);
  for (const Branch& br : m.branches) {
    if (std::find(br.layers.begin(), br.layers.end(), layer) !=
        br.layers.end()) {
      return true;
    }
    if (br.sub_module >= 0) {
      const ModuleDescriptor& sub = m.sub_modules[br.sub_module];
      if (sub.merge == layer) {
        path->push_back(&sub);
        return true;
      }
      if (enclosing_path(sub, layer, path)) return true;
    }
  }
  path->pop_back();
  return false;
}

}  // namespace

Bytes CostComponents::term(CostTerm t) const {
  switch (t) {
    case CostTerm::kIfmFull:
      return ifm_full;
    case CostTerm::kIfmPartial:
      return ifm_partial;
    case CostTerm::kOfmFull:
      return ofm_full;
    case CostTerm::kOfmPartial:
      return ofm_partial;
    case CostTerm::kWmPartial:
      return wm_partial;
    case CostTerm::kWPartial:
      return w_partial;
  }
  return 0;
}

const char* to_string(RegionRole role) {
  switch (role) {
    case RegionRole::kMifm:
      return "MIFM";
    case RegionRole::kMofm:
      return "MOFM";
    case RegionRole::kOfm:
      return "OFM";
    case RegionRole::kIfm:
      return "IFM";
    case RegionRole::kWm:
      return "WM";
    case RegionRole::kW:
      return "W";
  }
  return "?";
}

CostComponents cost_components(const LayerNode& l, const NpuConfig& cfg) {
  const Bytes eb = cfg.element_bytes;
  const Bytes db = cfg.double_buffer;
  const int in_w = round_up(l.in_w, cfg.layout_tile_w);
  const int out_w = round_up(l.out_w, cfg.layout_tile_w);

  // Fully-connected layers are a window over the whole input.
  int kh = l.kernel_h, kw = l.kernel_w, sh = l.stride_h, sw = l.stride_w;
  if (l.kind == LayerKind::kFullyConnected) {
    kh = l.in_h;
    kw = l.in_w;
    sh = sw = 1;
  }
  const bool computes = has_weights(l.kind) || is_pooling(l.kind);

  CostComponents c;
  c.ifm_full = tensor_bytes(l.in_shape(), cfg);
  c.ofm_full = tensor_bytes(l.out_shape(), cfg);

  const int band_rows = cfg.ifm_band == IfmBand::kKernelRows
                            ? kh
                            : (cfg.patch_h - 1) * sh + kh;
  Bytes ifm_band = Bytes{band_rows} * in_w * l.in_channels * eb * db;
  c.ifm_partial = std::min(align_up(ifm_band, cfg.alignment_bytes), c.ifm_full);
  Bytes ofm_band = Bytes{cfg.patch_h} * out_w * l.out_channels * eb * db;
  c.ofm_partial = std::min(align_up(ofm_band, cfg.alignment_bytes), c.ofm_full);

  if (has_weights(l.kind)) {
    Bytes slice = Bytes{kh} * kw * l.in_channels *
                  std::min(l.out_channels, cfg.maa_count) * eb;
    c.w_partial = align_up(slice * cfg.weight_buffers, cfg.alignment_bytes);
  }
  if (computes) {
    Bytes wm = Bytes{cfg.maa_count} * cfg.patch_h * cfg.patch_w *
               cfg.accum_bytes * db;
    if (cfg.window_staging && has_weights(l.kind)) {
      Bytes win_h = std::min((cfg.patch_h - 1) * sh + kh, l.in_h + 2 * l.pad_h);
      Bytes win_w = std::min((cfg.patch_w - 1) * sw + kw, l.in_w + 2 * l.pad_w);
      wm += Bytes{cfg.maa_count} * win_h * win_w * l.in_channels * eb;
    }
    c.wm_partial = align_up(wm, cfg.alignment_bytes);
  }

  for (int t = 0; t < kNumCostTerms; ++t) {
    const CostOverride& o = cfg.overrides[t];
    if (o.empty()) continue;
    auto it = o.per_layer.find(l.name);
    std::optional<Bytes> v =
        it != o.per_layer.end() ? std::optional<Bytes>(it->second) : o.all;
    if (!v) continue;
    switch (static_cast<CostTerm>(t)) {
      case CostTerm::kIfmFull:
        c.ifm_full = *v;
        break;
      case CostTerm::kIfmPartial:
        c.ifm_partial = *v;
        break;
      case CostTerm::kOfmFull:
        c.ofm_full = *v;
        break;
      case CostTerm::kOfmPartial:
        c.ofm_partial = *v;
        break;
      case CostTerm::kWmPartial:
        c.wm_partial = *v;
        break;
      case CostTerm::kWPartial:
        c.w_partial = *v;
        break;
    }
  }
  c.ifm_partial = std::min(c.ifm_partial, c.ifm_full);
  c.ofm_partial = std::min(c.ofm_partial, c.ofm_full);
  return c;
}

std::vector<MifmEntry> calc_mifm_mem(const ModuleDescriptor& module,
                                     const NetworkGraph& graph, LayerId layer,
                                     const NpuConfig& cfg) {
  std::vector<const ModuleDescriptor*> path;
  if (!enclosing_path(module, layer, &path)) return {};
  std::vector<MifmEntry> out;
  Bytes offset = 0;
  for (const ModuleDescriptor* m : path) {
    MifmEntry e;
    e.depth = m->depth;
    e.source = m->start;
    e.size = tensor_bytes(graph.layer(m->start).out_shape(), cfg);
    e.offset = offset;
    offset += e.size;
    out.push_back(e);
  }
  if (offset > cfg.on_chip_bytes) {
    throw CapacityError("MIFM stack of " + std::to_string(offset) +
                        " B exceeds on-chip capacity of " +
                        std::to_string(cfg.on_chip_bytes) + " B");
  }
  return out;
}

MofmOccupancy mofm_occupancy(const std::vector<Bytes>& outputs,
                             MergeKind kind, int position) {
  MofmOccupancy occ;
  if (position <= 0) return occ;
  if (kind == MergeKind::kElementwiseAdd) {
    // The region holds the running sum from the first branch on.
    occ.size = outputs.empty() ? 0 : outputs.front();
    occ.offset = 0;
    return occ;
  }
  for (int i = 0; i < position && i < static_cast<int>(outputs.size()); ++i) {
    occ.size += outputs[i];
  }
  occ.offset = occ.size;
  return occ;
}

MofmOccupancy calc_mofm_occupied(const ModuleDescriptor& module,
                                 const NetworkGraph& graph, int position,
                                 const NpuConfig& cfg) {
  (void)graph;
  std::vector<Bytes> outputs;
  for (int b : module.branch_order) {
    outputs.push_back(tensor_bytes(module.branch_output_shapes[b], cfg));
  }
  return mofm_occupancy(outputs, module.merge_kind, position);
}

}  // namespace npuplan
