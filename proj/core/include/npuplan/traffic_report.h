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

#ifndef NPUPLAN_TRAFFIC_REPORT_H_
#define NPUPLAN_TRAFFIC_REPORT_H_

#include <string>
#include <vector>

#include "npuplan/branch_planner.h"
#include "npuplan/graph.h"
#include "npuplan/module_detect.h"
#include "npuplan/npu_config.h"

namespace npuplan {

struct TrafficOptions {
  // Add one read and one write per merge layer to the naive side.
  bool count_merge_traffic = false;
  // Append a row for the layers outside every module.
  bool whole_network = false;
};

// Off-chip traffic of one module under one schedule.
struct TrafficSide {
  std::string name;
  Bytes weight_bytes = 0;
  Bytes fm_bytes = 0;
  int reads = 0;
  int writes = 0;

  Bytes overall() const { return weight_bytes + fm_bytes; }
};

inline constexpr char kOtherLayersRow[] = "other-layers";

std::vector<TrafficSide> naive_traffic(const NetworkGraph& graph,
                                       const std::vector<ModuleDescriptor>& modules,
                                       const NpuConfig& cfg,
                                       const TrafficOptions& options = {});

// Spill records of each plan. Modules processed naively report their naive
// row.
std::vector<TrafficSide> proposed_traffic(const NetworkGraph& graph,
                                          const NetworkPlan& plan,
                                          const NpuConfig& cfg,
                                          const TrafficOptions& options = {});

struct TrafficRow {
  std::string name;
  Bytes weight_bytes = 0;
  Bytes naive_fm = 0;
  Bytes proposed_fm = 0;
  int naive_reads = 0;
  int naive_writes = 0;
  int proposed_reads = 0;
  int proposed_writes = 0;

  Bytes naive_overall() const { return weight_bytes + naive_fm; }
  Bytes proposed_overall() const { return weight_bytes + proposed_fm; }
  // Percentages; 100 when the naive side is zero.
  double overall_ratio() const;
  double fm_ratio() const;
};

struct TrafficReport {
  std::vector<TrafficRow> rows;

  TrafficRow totals() const;
};

// Joins both sides row by row. Throws Error{kComparison} unless the module
// lists and weight columns agree.
TrafficReport make_report(const std::vector<TrafficSide>& naive,
                          const std::vector<TrafficSide>& proposed);

struct RatioSummary {
  double overall_pct = 100.0;
  double fm_pct = 100.0;
  int naive_accesses = 0;
  int proposed_accesses = 0;
  // proposed/naive FM access counts as a reduced fraction, e.g. "1/50".
  std::string access_ratio;
};

RatioSummary compare(const std::vector<TrafficSide>& naive,
                     const std::vector<TrafficSide>& proposed);
RatioSummary compare(const TrafficReport& report);

// Reduced "num/den"; "-" when den is zero.
std::string reduced_fraction(long long num, long long den);

struct ProfileRow {
  int index = 0;
  std::string name;
  LayerKind kind = LayerKind::kConvolution;
  Bytes weight_bytes = 0;
  Bytes fm_bytes = 0;
};

// One row per layer in topological order; fm_bytes is the full OFM.
std::vector<ProfileRow> profile_sizes(const NetworkGraph& graph,
                                      const NpuConfig& cfg);
std::string render_profile_csv(const std::vector<ProfileRow>& rows);

// format is "table" or "csv"; anything else is Error{kUsage}.
std::string render_report(const TrafficReport& report,
                          const std::string& format);

}  // namespace npuplan

#endif  // NPUPLAN_TRAFFIC_REPORT_H_
