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

#include "npuplan/traffic_report.h"

#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "npuplan/mem_model.h"

namespace npuplan {

namespace {

Bytes weights_of(const NetworkGraph& g, const std::vector<LayerId>& layers) {
  Bytes w = 0;
  for (LayerId l : layers) w += g.layer(l).weight_bytes;
  return w;
}

void add_layer(const NetworkGraph& g, LayerId l, const NpuConfig& cfg,
               TrafficSide* side) {
  const LayerNode& node = g.layer(l);
  side->fm_bytes += tensor_bytes(node.in_shape(), cfg);
  side->fm_bytes += tensor_bytes(node.out_shape(), cfg);
  side->reads += 1;
  side->writes += 1;
}

// A merge reads every operand and writes its result.
void add_merge(const NetworkGraph& g, LayerId l, const NpuConfig& cfg,
               TrafficSide* side) {
  for (LayerId p : g.preds[index(l)]) {
    side->fm_bytes += tensor_bytes(g.layer(p).out_shape(), cfg);
  }
  side->fm_bytes += tensor_bytes(g.layer(l).out_shape(), cfg);
  side->reads += 1;
  side->writes += 1;
}

TrafficSide naive_module(const NetworkGraph& g, const ModuleDescriptor& m,
                         const NpuConfig& cfg, const TrafficOptions& options) {
  TrafficSide side;
  side.name = m.name;
  std::vector<LayerId> layers = module_layers(m);
  side.weight_bytes = weights_of(g, layers);
  for (LayerId l : layers) {
    if (!is_merge(g.layer(l).kind)) {
      add_layer(g, l, cfg, &side);
    } else if (options.count_merge_traffic) {
      add_merge(g, l, cfg, &side);
    }
  }
  if (options.count_merge_traffic) add_merge(g, m.merge, cfg, &side);
  return side;
}

TrafficSide other_layers(const NetworkGraph& g,
                         const std::vector<ModuleDescriptor>& modules,
                         const NpuConfig& cfg, const TrafficOptions& options) {
  std::set<LayerId> inside;
  for (const ModuleDescriptor& m : modules) {
    for (LayerId l : module_layers(m)) inside.insert(l);
    inside.insert(m.merge);
  }
  TrafficSide side;
  side.name = kOtherLayersRow;
  for (LayerId l : g.topo_order) {
    const LayerNode& node = g.layer(l);
    if (inside.count(l) || node.kind == LayerKind::kInput ||
        node.kind == LayerKind::kOutput) {
      continue;
    }
    side.weight_bytes += node.weight_bytes;
    if (!is_merge(node.kind)) {
      add_layer(g, l, cfg, &side);
    } else if (options.count_merge_traffic) {
      add_merge(g, l, cfg, &side);
    }
  }
  return side;
}

double percent(Bytes num, Bytes den) {
  if (den == 0) return 100.0;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string kb(Bytes b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", static_cast<double>(b) / 1024.0);
  return buf;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::vector<TrafficSide> naive_traffic(
    const NetworkGraph& graph, const std::vector<ModuleDescriptor>& modules,
    const NpuConfig& cfg, const TrafficOptions& options) {
  std::vector<TrafficSide> out;
  for (const ModuleDescriptor& m : modules) {
    out.push_back(naive_module(graph, m, cfg, options));
  }
  if (options.whole_network) {
    out.push_back(other_layers(graph, modules, cfg, options));
  }
  return out;
}

std::vector<TrafficSide> proposed_traffic(const NetworkGraph& graph,
                                          const NetworkPlan& plan,
                                          const NpuConfig& cfg,
                                          const TrafficOptions& options) {
  std::vector<TrafficSide> out;
  for (std::size_t i = 0; i < plan.plans.size(); ++i) {
    const AllocationPlan& p = plan.plans[i];
    const ModuleDescriptor& m = plan.modules[i];
    if (p.fallback()) {
      out.push_back(naive_module(graph, m, cfg, options));
      continue;
    }
    TrafficSide side;
    side.name = m.name;
    side.weight_bytes = weights_of(graph, module_layers(m));
    for (const Spill& s : p.all_spills()) {
      side.fm_bytes += s.bytes;
      if (s.direction == SpillDirection::kRead) {
        ++side.reads;
      } else {
        ++side.writes;
      }
    }
    out.push_back(side);
  }
  if (options.whole_network) {
    out.push_back(other_layers(graph, plan.modules, cfg, options));
  }
  return out;
}

double TrafficRow::overall_ratio() const {
  return percent(proposed_overall(), naive_overall());
}

double TrafficRow::fm_ratio() const { return percent(proposed_fm, naive_fm); }

TrafficRow TrafficReport::totals() const {
  TrafficRow t;
  t.name = "total";
  for (const TrafficRow& r : rows) {
    t.weight_bytes += r.weight_bytes;
    t.naive_fm += r.naive_fm;
    t.proposed_fm += r.proposed_fm;
    t.naive_reads += r.naive_reads;
    t.naive_writes += r.naive_writes;
    t.proposed_reads += r.proposed_reads;
    t.proposed_writes += r.proposed_writes;
  }
  return t;
}

TrafficReport make_report(const std::vector<TrafficSide>& naive,
                          const std::vector<TrafficSide>& proposed) {
  if (naive.size() != proposed.size()) {
    throw Error(ErrorCode::kComparison,
                "naive and proposed reports cover " +
                    std::to_string(naive.size()) + " and " +
                    std::to_string(proposed.size()) + " modules");
  }
  TrafficReport report;
  for (std::size_t i = 0; i < naive.size(); ++i) {
    const TrafficSide& n = naive[i];
    const TrafficSide& p = proposed[i];
    if (n.name != p.name) {
      throw Error(ErrorCode::kComparison, "row " + std::to_string(i) +
                                              " is '" + n.name + "' vs '" +
                                              p.name + "'");
    }
    if (n.weight_bytes != p.weight_bytes) {
      throw Error(ErrorCode::kComparison,
                  "weight bytes differ for '" + n.name + "'");
    }
    TrafficRow r;
    r.name = n.name;
    r.weight_bytes = n.weight_bytes;
    r.naive_fm = n.fm_bytes;
    r.proposed_fm = p.fm_bytes;
    r.naive_reads = n.reads;
    r.naive_writes = n.writes;
    r.proposed_reads = p.reads;
    r.proposed_writes = p.writes;
    report.rows.push_back(r);
  }
  return report;
}

std::string reduced_fraction(long long num, long long den) {
  if (den == 0) return "-";
  long long g = std::gcd(num, den);
  if (g == 0) g = 1;
  return std::to_string(num / g) + "/" + std::to_string(den / g);
}

RatioSummary compare(const TrafficReport& report) {
  TrafficRow t = report.totals();
  RatioSummary s;
  s.overall_pct = t.overall_ratio();
  s.fm_pct = t.fm_ratio();
  s.naive_accesses = t.naive_reads + t.naive_writes;
  s.proposed_accesses = t.proposed_reads + t.proposed_writes;
  s.access_ratio = reduced_fraction(s.proposed_accesses, s.naive_accesses);
  return s;
}

RatioSummary compare(const std::vector<TrafficSide>& naive,
                     const std::vector<TrafficSide>& proposed) {
  return compare(make_report(naive, proposed));
}

std::vector<ProfileRow> profile_sizes(const NetworkGraph& graph,
                                      const NpuConfig& cfg) {
  std::vector<ProfileRow> rows;
  for (LayerId l : graph.topo_order) {
    const LayerNode& node = graph.layer(l);
    ProfileRow r;
    r.index = static_cast<int>(rows.size());
    r.name = node.name;
    r.kind = node.kind;
    r.weight_bytes = node.weight_bytes;
    r.fm_bytes = cost_components(node, cfg).ofm_full;
    rows.push_back(r);
  }
  return rows;
}

std::string render_profile_csv(const std::vector<ProfileRow>& rows) {
  std::ostringstream os;
  os << "index,layer,kind,weight_bytes,fm_bytes\n";
  for (const ProfileRow& r : rows) {
    os << r.index << ',' << r.name << ',' << to_string(r.kind) << ','
       << r.weight_bytes << ',' << r.fm_bytes << '\n';
  }
  return os.str();
}

std::string render_report(const TrafficReport& report,
                          const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    os << "module,w_bytes,naive_fm,naive_overall,prop_fm,prop_overall,"
          "overall_ratio,fm_ratio,n_reads,n_writes,p_reads,p_writes\n";
    auto line = [&](const TrafficRow& r) {
      os << r.name << ',' << r.weight_bytes << ',' << r.naive_fm << ','
         << r.naive_overall() << ',' << r.proposed_fm << ','
         << r.proposed_overall() << ',' << fixed2(r.overall_ratio()) << ','
         << fixed2(r.fm_ratio()) << ',' << r.naive_reads << ','
         << r.naive_writes << ',' << r.proposed_reads << ','
         << r.proposed_writes << '\n';
    };
    for (const TrafficRow& r : report.rows) line(r);
    if (!report.rows.empty()) line(report.totals());
    return os.str();
  }
  if (format != "table") {
    throw Error(ErrorCode::kUsage, "unknown report format '" + format + "'");
  }

  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Module", "W (KB)", "Naive FM (KB)", "Naive (KB)",
                   "Prop FM (KB)", "Prop (KB)", "Overall %", "FM %",
                   "Naive R/W", "Prop R/W"});
  auto add = [&](const TrafficRow& r) {
    cells.push_back({r.name, kb(r.weight_bytes), kb(r.naive_fm),
                     kb(r.naive_overall()), kb(r.proposed_fm),
                     kb(r.proposed_overall()), fixed2(r.overall_ratio()),
                     fixed2(r.fm_ratio()),
                     std::to_string(r.naive_reads) + " / " +
                         std::to_string(r.naive_writes),
                     std::to_string(r.proposed_reads) + " / " +
                         std::to_string(r.proposed_writes)});
  };
  for (const TrafficRow& r : report.rows) add(r);
  add(report.totals());

  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << "  ";
      const std::string pad(width[c] - row[c].size(), ' ');
      // Names left-aligned, numbers right-aligned.
      if (c == 0) {
        os << row[c] << pad;
      } else {
        os << pad << row[c];
      }
    }
    os << '\n';
  };
  std::size_t total_width = 0;
  for (std::size_t w : width) total_width += w + 2;
  emit(cells[0]);
  os << std::string(total_width - 2, '-') << '\n';
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) emit(cells[i]);
  os << std::string(total_width - 2, '-') << '\n';
  emit(cells.back());
  return os.str();
}

}  // namespace npuplan
