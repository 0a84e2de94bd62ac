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

#include "npuplan/module_detect.h"

#include <algorithm>
#include <set>

namespace npuplan {

namespace {

// Immediate dominators over the effective graph, rooted at the input layer.
// Unreachable layers get kNoLayer.
struct Dominators {
  std::vector<LayerId> idom;
  std::vector<int> pos;  // topological position

  bool reachable(LayerId id) const { return idom[index(id)] != kNoLayer; }

  LayerId intersect(LayerId a, LayerId b) const {
    while (a != b) {
      while (pos[index(a)] > pos[index(b)]) a = idom[index(a)];
      while (pos[index(b)] > pos[index(a)]) b = idom[index(b)];
    }
    return a;
  }
};

Dominators compute_dominators(const EffectiveGraph& eff) {
  const NetworkGraph& g = eff.base;
  Dominators d;
  d.idom.assign(g.size(), kNoLayer);
  d.pos.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.topo_order.size(); ++i) {
    d.pos[index(g.topo_order[i])] = static_cast<int>(i);
  }
  for (LayerId v : g.topo_order) {
    if (g.layer(v).kind == LayerKind::kInput) {
      d.idom[index(v)] = v;
      continue;
    }
    LayerId acc = kNoLayer;
    for (LayerId p : eff.preds[index(v)]) {
      if (!d.reachable(p)) continue;
      acc = acc == kNoLayer ? p : d.intersect(acc, p);
    }
    d.idom[index(v)] = acc;
  }
  return d;
}

std::optional<LayerId> common_dominator(const EffectiveGraph& eff,
                                        const Dominators& dom,
                                        LayerId merge) {
  LayerId acc = kNoLayer;
  for (LayerId p : eff.preds[index(merge)]) {
    if (!dom.reachable(p)) return std::nullopt;
    acc = acc == kNoLayer ? p : dom.intersect(acc, p);
  }
  if (acc == kNoLayer) return std::nullopt;
  return acc;
}

std::string module_name(const LayerNode& merge) {
  auto slash = merge.name.rfind('/');
  if (slash == std::string::npos || slash == 0) return merge.name;
  return merge.name.substr(0, slash);
}

ExtractResult fail(std::string code, std::string reason) {
  ExtractResult r;
  r.code = std::move(code);
  r.reason = std::move(reason);
  return r;
}

ExtractResult extract(const EffectiveGraph& eff, const Dominators& dom,
                      LayerId start, LayerId merge, int depth) {
  const NetworkGraph& g = eff.base;
  const LayerNode& ml = g.layer(merge);
  const auto& mpreds = eff.preds[index(merge)];
  if (!is_merge(ml.kind)) {
    return fail("W-DETECT-NOT-MERGE", "'" + ml.name + "' is not a merge layer");
  }
  if (mpreds.size() < 2) {
    return fail("W-DETECT-NOT-MERGE",
                "'" + ml.name + "' has fewer than 2 effective inputs");
  }
  if (ml.kind == LayerKind::kElementwiseAdd && mpreds.size() != 2) {
    return fail("W-DETECT-ADD-ARITY",
                "elementwise-add '" + ml.name + "' has " +
                    std::to_string(mpreds.size()) + " inputs (2 supported)");
  }
  if (eff.is_off_chip_source(merge)) {
    return fail("W-DETECT-OFFCHIP",
                "'" + ml.name + "' has an input fed from off-chip");
  }

  // Interior = reachable from start and co-reachable to merge.
  const std::size_t n = g.size();
  std::vector<char> fwd(n, 0), bwd(n, 0);
  std::vector<LayerId> work = {start};
  fwd[index(start)] = 1;
  while (!work.empty()) {
    LayerId v = work.back();
    work.pop_back();
    if (v == merge) continue;
    for (LayerId s : eff.succs[index(v)]) {
      if (!fwd[index(s)]) {
        fwd[index(s)] = 1;
        work.push_back(s);
      }
    }
  }
  work = {merge};
  bwd[index(merge)] = 1;
  while (!work.empty()) {
    LayerId v = work.back();
    work.pop_back();
    if (v == start) continue;
    for (LayerId p : eff.preds[index(v)]) {
      if (!bwd[index(p)]) {
        bwd[index(p)] = 1;
        work.push_back(p);
      }
    }
  }
  std::set<LayerId> interior;
  for (std::size_t i = 0; i < n; ++i) {
    LayerId id = layer_id(static_cast<int>(i));
    if (fwd[i] && bwd[i] && id != start && id != merge) interior.insert(id);
  }
  auto inside_or = [&](LayerId v, LayerId edge_end) {
    return v == edge_end || interior.count(v) > 0;
  };
  for (LayerId v : interior) {
    const std::string& vn = g.layer(v).name;
    if (eff.is_off_chip_source(v)) {
      return fail("W-DETECT-OFFCHIP",
                  "'" + vn + "' inside the module is fed from off-chip");
    }
    for (LayerId p : eff.preds[index(v)]) {
      if (!inside_or(p, start)) {
        return fail("W-DETECT-ESCAPE", "'" + vn + "' has input '" +
                                           g.layer(p).name +
                                           "' from outside the module");
      }
    }
    for (LayerId s : eff.succs[index(v)]) {
      if (!inside_or(s, merge)) {
        return fail("W-DETECT-ESCAPE", "'" + vn + "' feeds '" +
                                           g.layer(s).name +
                                           "' outside the module");
      }
    }
  }

  ModuleDescriptor m;
  m.name = module_name(ml);
  m.start = start;
  m.merge = merge;
  m.merge_kind = ml.kind == LayerKind::kConcatenation
                     ? MergeKind::kConcatenation
                     : MergeKind::kElementwiseAdd;
  m.depth = depth;
  m.input_shape = g.layer(start).out_shape();
  m.output_shape = ml.out_shape();

  std::set<LayerId> claimed;
  auto claim = [&](LayerId v) { return claimed.insert(v).second; };

  for (LayerId p : mpreds) {
    Branch br;
    m.branch_output_shapes.push_back(g.layer(p).out_shape());
    if (p == start) {
      if (m.merge_kind != MergeKind::kElementwiseAdd) {
        return fail("W-DETECT-CONCAT-IDENTITY",
                    "'" + ml.name + "' concatenates its own start layer '" +
                        g.layer(start).name + "'");
      }
      m.branches.push_back(std::move(br));
      continue;
    }
    LayerId cur = p;
    if (is_merge(g.layer(p).kind)) {
      auto inner_start = common_dominator(eff, dom, p);
      if (!inner_start) {
        return fail("W-DETECT-NESTED", "nested merge '" + g.layer(p).name +
                                           "' has no common dominator");
      }
      if (*inner_start == start) {
        return fail("W-DETECT-SHARED-START",
                    "nested merge '" + g.layer(p).name +
                        "' starts at the enclosing module's start layer");
      }
      ExtractResult inner = extract(eff, dom, *inner_start, p, depth + 1);
      if (!inner.module) {
        return fail("W-DETECT-NESTED", "nested merge '" + g.layer(p).name +
                                           "': " + inner.reason);
      }
      for (LayerId v : module_layers(*inner.module)) {
        if (!claim(v)) {
          return fail("W-DETECT-SHARED-LAYER",
                      "'" + g.layer(v).name + "' is shared between branches");
        }
      }
      claim(p);
      br.sub_module = static_cast<int>(m.sub_modules.size());
      m.sub_modules.push_back(std::move(*inner.module));
      cur = *inner_start;
    }
    std::vector<LayerId> chain;
    while (true) {
      const LayerNode& cl = g.layer(cur);
      if (!interior.count(cur)) {
        return fail("W-DETECT-ESCAPE",
                    "'" + cl.name + "' is outside the module region");
      }
      if (is_merge(cl.kind)) {
        return fail("W-DETECT-MID-NESTING",
                    "merge '" + cl.name +
                        "' sits in the middle of a branch of '" + ml.name +
                        "'");
      }
      if (!claim(cur)) {
        return fail("W-DETECT-SHARED-LAYER",
                    "'" + cl.name + "' is shared between branches");
      }
      chain.push_back(cur);
      const auto& cp = eff.preds[index(cur)];
      if (cp.size() != 1) {
        return fail("W-DETECT-ESCAPE",
                    "'" + cl.name + "' does not have a single input");
      }
      if (cp.front() == start) break;
      cur = cp.front();
    }
    std::reverse(chain.begin(), chain.end());
    br.layers = std::move(chain);
    m.branches.push_back(std::move(br));
  }
  if (claimed != interior) {
    for (LayerId v : interior) {
      if (!claimed.count(v)) {
        return fail("W-DETECT-SHARED-LAYER",
                    "'" + g.layer(v).name +
                        "' reconverges outside the merge layer");
      }
    }
  }

  m.branch_order.resize(m.branches.size());
  for (std::size_t b = 0; b < m.branches.size(); ++b) {
    m.branch_order[b] = static_cast<int>(b);
    for (LayerId v : m.branches[b].layers) m.depth_map[v] = depth;
    if (m.branches[b].sub_module >= 0) {
      const ModuleDescriptor& sub = m.sub_modules[m.branches[b].sub_module];
      m.depth_map.insert(sub.depth_map.begin(), sub.depth_map.end());
      m.depth_map[sub.merge] = depth + 1;
    }
  }
  ExtractResult ok;
  ok.module = std::move(m);
  return ok;
}

void renumber(ModuleDescriptor& m, int index) {
  m.module_index = index;
  for (std::size_t i = 0; i < m.sub_modules.size(); ++i) {
    renumber(m.sub_modules[i], static_cast<int>(i));
  }
}

}  // namespace

const char* to_string(MergeKind kind) {
  return kind == MergeKind::kConcatenation ? "concatenation"
                                           : "elementwise-add";
}

bool EffectiveGraph::is_off_chip_source(LayerId id) const {
  return std::binary_search(off_chip_sources.begin(), off_chip_sources.end(),
                            id);
}

EffectiveGraph make_effective(const NetworkGraph& graph) {
  EffectiveGraph eff;
  eff.base = graph;
  if (eff.base.preds.size() != eff.base.size()) eff.base.rebuild();
  eff.preds = eff.base.preds;
  eff.succs = eff.base.succs;
  return eff;
}

EffectiveGraph strip_long_skips(const NetworkGraph& graph,
                                const SkipLimits& limits,
                                const NpuConfig& cfg, Diagnostics* diags) {
  EffectiveGraph eff = make_effective(graph);
  const NetworkGraph& g = eff.base;
  const std::size_t n = g.size();
  std::vector<int> pos(n, 0);
  for (std::size_t i = 0; i < g.topo_order.size(); ++i) {
    pos[index(g.topo_order[i])] = static_cast<int>(i);
  }
  std::set<std::pair<int, int>> severed;
  std::vector<int> longest(n);
  for (LayerId u : g.topo_order) {
    if (g.succs[index(u)].empty()) continue;
    // longest[x]: most edges on any path u ~> x, -1 when unreachable.
    std::fill(longest.begin(), longest.end(), -1);
    longest[index(u)] = 0;
    for (std::size_t i = pos[index(u)]; i < g.topo_order.size(); ++i) {
      LayerId x = g.topo_order[i];
      if (longest[index(x)] < 0) continue;
      for (LayerId s : g.succs[index(x)]) {
        longest[index(s)] = std::max(longest[index(s)], longest[index(x)] + 1);
      }
    }
    const Bytes skip_bytes = tensor_bytes(g.layer(u).out_shape(), cfg);
    for (LayerId v : g.succs[index(u)]) {
      // Interior layers of the longest alternative path u ~> p -> v.
      int span = -1;
      for (LayerId p : g.preds[index(v)]) {
        if (p != u) span = std::max(span, longest[index(p)]);
      }
      if (span < 1) continue;
      bool too_long = span > limits.max_span_layers;
      bool too_big = limits.capacity_check && skip_bytes > cfg.on_chip_bytes;
      if (!too_long && !too_big) continue;
      severed.emplace(index(u), index(v));
      eff.severed_edges.push_back({u, v});
      eff.off_chip_sources.push_back(v);
      if (diags) {
        std::string why =
            too_long ? "spans " + std::to_string(span) + " layers (limit " +
                           std::to_string(limits.max_span_layers) + ")"
                     : "source tensor of " + std::to_string(skip_bytes) +
                           " B exceeds on-chip capacity";
        diags->push_back({Severity::kWarning, "W-SKIP-SEVERED",
                          "edge '" + g.layer(u).name + "' -> '" +
                              g.layer(v).name + "' severed: " + why});
      }
    }
  }
  std::sort(eff.off_chip_sources.begin(), eff.off_chip_sources.end());
  eff.off_chip_sources.erase(
      std::unique(eff.off_chip_sources.begin(), eff.off_chip_sources.end()),
      eff.off_chip_sources.end());
  for (auto& list : eff.preds) list.clear();
  for (auto& list : eff.succs) list.clear();
  for (const Edge& e : g.edges) {
    if (severed.count({index(e.src), index(e.dst)})) continue;
    eff.succs[index(e.src)].push_back(e.dst);
    eff.preds[index(e.dst)].push_back(e.src);
  }
  return eff;
}

std::vector<LayerId> branch_layers(const ModuleDescriptor& m, int b) {
  const Branch& br = m.branches[b];
  std::vector<LayerId> out = br.layers;
  if (br.sub_module >= 0) {
    const ModuleDescriptor& sub = m.sub_modules[br.sub_module];
    for (std::size_t i = 0; i < sub.branches.size(); ++i) {
      auto inner = branch_layers(sub, static_cast<int>(i));
      out.insert(out.end(), inner.begin(), inner.end());
    }
    out.push_back(sub.merge);
  }
  return out;
}

std::vector<LayerId> module_layers(const ModuleDescriptor& m) {
  std::vector<LayerId> out;
  for (std::size_t b = 0; b < m.branches.size(); ++b) {
    auto layers = branch_layers(m, static_cast<int>(b));
    out.insert(out.end(), layers.begin(), layers.end());
  }
  return out;
}

int non_merge_layer_count(const ModuleDescriptor& m, const NetworkGraph& g) {
  int count = 0;
  for (LayerId v : module_layers(m)) {
    if (!is_merge(g.layer(v).kind)) ++count;
  }
  return count;
}

int max_depth(const ModuleDescriptor& m) {
  int d = m.depth;
  for (const auto& [id, depth] : m.depth_map) d = std::max(d, depth);
  return d;
}

std::optional<LayerId> search_start_layer(const EffectiveGraph& eff,
                                          LayerId merge) {
  return common_dominator(eff, compute_dominators(eff), merge);
}

ExtractResult extract_module_params(const EffectiveGraph& eff, LayerId start,
                                    LayerId merge) {
  return extract(eff, compute_dominators(eff), start, merge, 1);
}

std::vector<ModuleDescriptor> detect_modules(const EffectiveGraph& eff,
                                             Diagnostics* diags) {
  const NetworkGraph& g = eff.base;
  Dominators dom = compute_dominators(eff);
  std::vector<ModuleDescriptor> candidates;
  for (LayerId v : g.topo_order) {
    const LayerNode& l = g.layer(v);
    if (!is_merge(l.kind) || eff.preds[index(v)].size() < 2) continue;
    auto start = common_dominator(eff, dom, v);
    if (!start) {
      if (diags) {
        diags->push_back({Severity::kWarning, "W-DETECT-NODOM",
                          "merge '" + l.name +
                              "' skipped: inputs do not reconverge from a "
                              "single start layer"});
      }
      continue;
    }
    ExtractResult r = extract(eff, dom, *start, v, 1);
    if (!r.module) {
      if (diags) {
        diags->push_back({Severity::kWarning, r.code,
                          "merge '" + l.name + "' skipped: " + r.reason});
      }
      continue;
    }
    candidates.push_back(std::move(*r.module));
  }

  // Keep outermost candidates; nested ones live inside their parents.
  std::vector<std::set<LayerId>> interiors;
  for (const ModuleDescriptor& m : candidates) {
    auto layers = module_layers(m);
    interiors.emplace_back(layers.begin(), layers.end());
  }
  std::vector<ModuleDescriptor> top;
  std::set<LayerId> used;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool nested = false;
    for (std::size_t j = 0; j < candidates.size() && !nested; ++j) {
      nested = j != i && interiors[j].count(candidates[i].merge) > 0;
    }
    if (nested) continue;
    bool overlaps = false;
    for (LayerId v : interiors[i]) overlaps = overlaps || used.count(v) > 0;
    if (overlaps) {
      if (diags) {
        diags->push_back({Severity::kWarning, "W-DETECT-OVERLAP",
                          "merge '" + g.layer(candidates[i].merge).name +
                              "' skipped: overlaps an earlier module"});
      }
      continue;
    }
    used.insert(interiors[i].begin(), interiors[i].end());
    top.push_back(std::move(candidates[i]));
  }
  for (std::size_t i = 0; i < top.size(); ++i) {
    renumber(top[i], static_cast<int>(i));
  }
  return top;
}

}  // namespace npuplan
