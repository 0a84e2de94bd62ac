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

#include "npuplan/pipeline.h"

#include <fstream>
#include <sstream>
#include <system_error>

#include "json_util.h"

namespace npuplan {

namespace {

using internal::OrderedJson;

OrderedJson spill_json(const NetworkGraph& g, const Spill& s) {
  OrderedJson j;
  j["op"] = s.op;
  j["tensor"] = g.layer(s.tensor).name;
  j["role"] = to_string(s.role);
  j["direction"] = s.direction == SpillDirection::kRead ? "read" : "write";
  j["bytes"] = s.bytes;
  return j;
}

OrderedJson plan_json(const NetworkGraph& g, const ModuleDescriptor& m,
                      const AllocationPlan& p) {
  OrderedJson j;
  j["index"] = p.module_index;
  j["name"] = p.module_name;
  j["start"] = g.layer(m.start).name;
  j["merge"] = g.layer(m.merge).name;
  j["merge_kind"] = to_string(m.merge_kind);
  j["max_depth"] = max_depth(m);
  j["option"] = to_string(p.option);
  j["status"] = to_string(p.status);
  if (!p.status_detail.empty()) j["status_detail"] = p.status_detail;
  j["mifm_source"] = to_string(p.mifm_source);
  j["mofm_sink"] = to_string(p.mofm_sink);
  j["mifm_at_top"] = p.mifm_at_top;
  j["branch_order"] = p.branch_order;

  OrderedJson branches = OrderedJson::array();
  for (const BranchPlan& bp : p.branches) {
    OrderedJson b;
    b["branch"] = bp.branch;
    b["position"] = bp.position;
    OrderedJson layers = OrderedJson::array();
    for (const LayerRecord& r : bp.layers) {
      OrderedJson l;
      l["layer"] = g.layer(r.layer).name;
      l["k"] = r.k;
      l["depth"] = r.depth;
      l["op"] = r.op;
      l["size_req"] = r.size_req;
      l["size_avail"] = r.size_avail;
      l["fwd"] = r.fwd;
      OrderedJson spills = OrderedJson::array();
      for (const Spill& s : r.spills) spills.push_back(spill_json(g, s));
      l["spills"] = spills;
      layers.push_back(l);
    }
    b["layers"] = layers;
    branches.push_back(b);
  }
  j["branches"] = branches;

  OrderedJson ops = OrderedJson::array();
  for (const Op& op : p.ops) {
    OrderedJson o;
    o["index"] = op.index;
    o["layer"] = g.layer(op.layer).name;
    o["merge"] = op.is_merge;
    o["branch"] = op.branch;
    o["depth"] = op.depth;
    ops.push_back(o);
  }
  j["ops"] = ops;

  OrderedJson regions = OrderedJson::array();
  for (const RegionAssignment& r : p.regions) {
    OrderedJson o;
    o["id"] = r.region_id;
    o["role"] = to_string(r.role);
    o["depth"] = r.depth;
    o["layer"] = g.layer(r.layer).name;
    o["offset"] = r.offset;
    o["size"] = r.size;
    o["live_from"] = r.live_from;
    o["live_to"] = r.live_to;
    regions.push_back(o);
  }
  j["regions"] = regions;

  OrderedJson boundary = OrderedJson::array();
  for (const Spill& s : p.boundary_spills) boundary.push_back(spill_json(g, s));
  j["boundary_spills"] = boundary;
  j["spill_bytes"] = p.spill_bytes();
  return j;
}

const char* severity_name(Severity s) {
  return s == Severity::kWarning ? "warning" : "info";
}

}  // namespace

NpuConfig resolve_config(NpuConfig cfg, const RunConfig& run) {
  if (run.alignment_bytes) cfg.alignment_bytes = *run.alignment_bytes;
  if (run.layout_tile) {
    cfg.layout_tile_h = *run.layout_tile;
    cfg.layout_tile_w = *run.layout_tile;
  }
  cfg.validate();
  return cfg;
}

PipelineResult run_pipeline(const RunConfig& run) {
  NetworkGraph graph = load_network(run.network_path);
  NpuConfig cfg = run.npu_config_path ? load_npu_config(*run.npu_config_path)
                                      : NpuConfig{};
  return run_pipeline(std::move(graph), cfg, run);
}

PipelineResult run_pipeline(NetworkGraph graph, const NpuConfig& base,
                            const RunConfig& run) {
  PipelineResult r;
  r.cfg = resolve_config(base, run);
  if (run.max_skip_span && *run.max_skip_span < 0) {
    throw Error(ErrorCode::kUsage, "max skip span must be non-negative");
  }
  require_dag(graph);
  r.graph = infer_shapes(std::move(graph), static_cast<int>(r.cfg.element_bytes));

  SkipLimits limits;
  if (run.max_skip_span) limits.max_span_layers = *run.max_skip_span;
  r.effective = strip_long_skips(r.graph, limits, r.cfg, &r.diagnostics);
  std::vector<ModuleDescriptor> modules =
      detect_modules(r.effective, &r.diagnostics);

  NetworkPlanOptions popts;
  popts.force = run.force;
  popts.whole_network = run.whole_network;
  r.plan = plan_network(r.graph, std::move(modules), r.cfg, popts);
  r.diagnostics.insert(r.diagnostics.end(), r.plan.diagnostics.begin(),
                       r.plan.diagnostics.end());

  TrafficOptions topts;
  topts.count_merge_traffic = run.count_merge_traffic;
  topts.whole_network = run.whole_network;
  r.report = make_report(naive_traffic(r.graph, r.plan.modules, r.cfg, topts),
                         proposed_traffic(r.graph, r.plan, r.cfg, topts));
  r.summary = compare(r.report);
  return r;
}

std::string plan_document(const PipelineResult& r) {
  OrderedJson doc;
  doc["network"] = r.graph.name;
  doc["npu_config"] = OrderedJson::parse(npu_config_json(r.cfg));
  OrderedJson severed = OrderedJson::array();
  for (const Edge& e : r.effective.severed_edges) {
    severed.push_back({{"src", r.graph.layer(e.src).name},
                       {"dst", r.graph.layer(e.dst).name}});
  }
  doc["severed_edges"] = severed;
  OrderedJson modules = OrderedJson::array();
  for (std::size_t i = 0; i < r.plan.plans.size(); ++i) {
    modules.push_back(plan_json(r.graph, r.plan.modules[i], r.plan.plans[i]));
  }
  doc["modules"] = modules;
  OrderedJson summary;
  summary["overall_ratio_pct"] = r.summary.overall_pct;
  summary["fm_ratio_pct"] = r.summary.fm_pct;
  summary["naive_accesses"] = r.summary.naive_accesses;
  summary["proposed_accesses"] = r.summary.proposed_accesses;
  summary["access_ratio"] = r.summary.access_ratio;
  doc["summary"] = summary;
  OrderedJson diags = OrderedJson::array();
  for (const Diagnostic& d : r.diagnostics) {
    diags.push_back({{"severity", severity_name(d.severity)},
                     {"code", d.code},
                     {"message", d.message}});
  }
  doc["diagnostics"] = diags;
  return doc.dump(2) + "\n";
}

std::string inspect_summary(const PipelineResult& r) {
  std::ostringstream os;
  const auto& mods = r.plan.modules;
  if (mods.empty()) {
    os << "0 modules\n";
    return os.str();
  }
  for (std::size_t i = 0; i < mods.size(); ++i) {
    const ModuleDescriptor& m = mods[i];
    os << m.name << "  branches=" << m.branches.size()
       << "  layers=" << non_merge_layer_count(m, r.graph)
       << "  merge=" << to_string(m.merge_kind)
       << "  depth=" << max_depth(m)
       << "  option=" << to_string(r.plan.plans[i].option) << '\n';
  }
  return os.str();
}

std::string render_diagnostics(const Diagnostics& diags) {
  std::ostringstream os;
  for (const Diagnostic& d : diags) {
    os << "npuplan: " << severity_name(d.severity) << '[' << d.code
       << "]: " << d.message << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kFile, "cannot write '" + tmp.string() + "'");
    }
    out << content;
    out.flush();
    if (!out) {
      throw Error(ErrorCode::kFile, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kFile, "cannot rename onto '" + path.string() + "'");
  }
}

void write_artifacts(const PipelineResult& r,
                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kFile,
                "cannot create output directory '" + dir.string() + "'");
  }
  write_file_atomic(dir / "plan.json", plan_document(r));
  write_file_atomic(dir / "report.txt", render_report(r.report, "table"));
  write_file_atomic(dir / "report.csv", render_report(r.report, "csv"));
  write_file_atomic(dir / "profile.csv",
                    render_profile_csv(profile_sizes(r.graph, r.cfg)));
  write_file_atomic(dir / "diagnostics.txt", render_diagnostics(r.diagnostics));
}

}  // namespace npuplan
