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

// Command-line driver: plan, report, inspect and profile views of one
// pipeline run.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "npuplan/pipeline.h"

namespace {

using npuplan::Diagnostic;
using npuplan::ErrorCode;
using npuplan::RunConfig;

struct Flags {
  std::string network;
  std::string npu_config;
  std::string out;
  std::string format = "table";
  std::string force = "auto";
  bool whole_network = false;
  bool count_merge = false;
  long long align = -1;
  int max_skip_span = -1;
  int layout_tile = -1;
};

void add_common(CLI::App* app, Flags* f, bool with_format) {
  app->add_option("--network", f->network, "Network description (JSON)")
      ->required();
  app->add_option("--npu-config", f->npu_config,
                  "NPU configuration (JSON); defaults to the built-in NPU");
  app->add_option("--out", f->out, "Output directory or file");
  if (with_format) {
    app->add_option("--format", f->format, "Report format")
        ->check(CLI::IsMember({"table", "csv"}));
  }
  app->add_flag("--whole-network", f->whole_network,
                "Account for layers outside every module");
  app->add_flag("--count-merge-traffic", f->count_merge,
                "Charge merge layers one read and one write on the naive side");
  app->add_option("--align", f->align, "Region alignment in bytes")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-skip-span", f->max_skip_span,
                  "Longest alternative path a kept skip may span (layers)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--layout-tile", f->layout_tile,
                  "Spatial layout tile; 1 disables padding")
      ->check(CLI::PositiveNumber);
  app->add_option("--force-option", f->force, "Processing option")
      ->check(CLI::IsMember({"auto", "I", "II", "naive"}));
}

RunConfig to_run_config(const Flags& f) {
  RunConfig run;
  run.network_path = f.network;
  if (!f.npu_config.empty()) run.npu_config_path = f.npu_config;
  if (!f.out.empty()) run.output_dir = f.out;
  run.report_format = f.format;
  run.whole_network = f.whole_network;
  run.count_merge_traffic = f.count_merge;
  if (f.align > 0) run.alignment_bytes = f.align;
  if (f.max_skip_span >= 0) run.max_skip_span = f.max_skip_span;
  if (f.layout_tile > 0) run.layout_tile = f.layout_tile;
  run.force = *npuplan::parse_force_option(f.force);
  return run;
}

// NPUPLAN_VERBOSE: 0 errors only, 1 warnings (default), 2 everything.
int verbosity() {
  const char* v = std::getenv("NPUPLAN_VERBOSE");
  if (v == nullptr || *v == '\0') return 1;
  return std::atoi(v);
}

void print_diagnostics(const npuplan::Diagnostics& diags) {
  const int level = verbosity();
  for (const Diagnostic& d : diags) {
    const bool warning = d.severity == npuplan::Severity::kWarning;
    if (level < 1 || (!warning && level < 2)) continue;
    std::cerr << "npuplan: " << (warning ? "warning" : "info") << '['
              << d.code << "]: " << d.message << '\n';
  }
}

int fail(ErrorCode code, const std::string& msg) {
  std::cerr << "npuplan: error[" << npuplan::error_tag(code) << "]: " << msg
            << '\n';
  return npuplan::exit_code(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-chip memory planner for branch-and-merge CNN modules"};
  app.require_subcommand(1);
  Flags plan_f, report_f, inspect_f, profile_f;
  CLI::App* plan = app.add_subcommand(
      "plan", "Plan every module and write plan, report and profile files");
  add_common(plan, &plan_f, true);
  CLI::App* report =
      app.add_subcommand("report", "Print the off-chip traffic report");
  add_common(report, &report_f, true);
  CLI::App* inspect =
      app.add_subcommand("inspect", "List detected modules");
  add_common(inspect, &inspect_f, false);
  CLI::App* profile = app.add_subcommand(
      "profile", "Per-layer weight and feature-map sizes as CSV");
  add_common(profile, &profile_f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorCode::kUsage, e.what());
  }

  try {
    if (plan->parsed()) {
      RunConfig run = to_run_config(plan_f);
      if (plan_f.out.empty()) run.output_dir = "npuplan-out";
      npuplan::PipelineResult r = npuplan::run_pipeline(run);
      print_diagnostics(r.diagnostics);
      npuplan::write_artifacts(r, run.output_dir);
      std::cout << npuplan::render_report(r.report, run.report_format);
      std::cout << "access ratio " << r.summary.access_ratio
                << ", overall " << r.summary.overall_pct << "%, fm "
                << r.summary.fm_pct << "%\n";
    } else if (report->parsed()) {
      RunConfig run = to_run_config(report_f);
      npuplan::PipelineResult r = npuplan::run_pipeline(run);
      print_diagnostics(r.diagnostics);
      std::string text = npuplan::render_report(r.report, run.report_format);
      if (report_f.out.empty()) {
        std::cout << text;
      } else {
        npuplan::write_file_atomic(report_f.out, text);
      }
    } else if (inspect->parsed()) {
      npuplan::PipelineResult r =
          npuplan::run_pipeline(to_run_config(inspect_f));
      print_diagnostics(r.diagnostics);
      std::cout << npuplan::inspect_summary(r);
    } else if (profile->parsed()) {
      RunConfig run = to_run_config(profile_f);
      npuplan::PipelineResult r = npuplan::run_pipeline(run);
      print_diagnostics(r.diagnostics);
      std::string text =
          npuplan::render_profile_csv(npuplan::profile_sizes(r.graph, r.cfg));
      if (profile_f.out.empty()) {
        std::cout << text;
      } else {
        npuplan::write_file_atomic(profile_f.out, text);
      }
    }
  } catch (const npuplan::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    std::cerr << "npuplan: error[E-INTERNAL]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
