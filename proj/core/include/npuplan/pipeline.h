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

#ifndef NPUPLAN_PIPELINE_H_
#define NPUPLAN_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <string>

#include "npuplan/branch_planner.h"
#include "npuplan/graph.h"
#include "npuplan/module_detect.h"
#include "npuplan/npu_config.h"
#include "npuplan/traffic_report.h"

namespace npuplan {

struct RunConfig {
  std::filesystem::path network_path;
  // Defaults to NpuConfig{} when unset.
  std::optional<std::filesystem::path> npu_config_path;
  std::filesystem::path output_dir = ".";
  std::string report_format = "table";
  bool whole_network = false;
  bool count_merge_traffic = false;
  std::optional<Bytes> alignment_bytes;
  std::optional<int> max_skip_span;
  std::optional<int> layout_tile;
  ForceOption force = ForceOption::kAuto;
};

struct PipelineResult {
  NetworkGraph graph;
  NpuConfig cfg;
  EffectiveGraph effective;
  NetworkPlan plan;
  TrafficReport report;
  RatioSummary summary;
  Diagnostics diagnostics;
};

// Applies the RunConfig overrides on top of cfg and validates the result.
NpuConfig resolve_config(NpuConfig cfg, const RunConfig& run);

// Parse, validate, infer shapes, detect, plan and account. Throws Error.
PipelineResult run_pipeline(const RunConfig& run);
// Same, on an already loaded graph; shapes are inferred here.
PipelineResult run_pipeline(NetworkGraph graph, const NpuConfig& cfg,
                            const RunConfig& run);

// Deterministic JSON description of every plan.
std::string plan_document(const PipelineResult& result);
// One line per module: name, branches, layers, merge kind, depth, option.
std::string inspect_summary(const PipelineResult& result);
std::string render_diagnostics(const Diagnostics& diags);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// plan.json, report.txt, report.csv, profile.csv and diagnostics.txt.
void write_artifacts(const PipelineResult& result,
                     const std::filesystem::path& dir);

}  // namespace npuplan

#endif  // NPUPLAN_PIPELINE_H_
