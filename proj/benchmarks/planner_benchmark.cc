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

#include <benchmark/benchmark.h>

#include <string>

#include "npuplan/pipeline.h"

namespace npuplan {
namespace {

std::string fixture(const char* name) {
  return std::string(NPUPLAN_FIXTURE_DIR "/") + name;
}

void BM_ParseAndInfer(benchmark::State& state) {
  for (auto _ : state) {
    NetworkGraph g = infer_shapes(load_network(fixture("inception_v3.json")));
    benchmark::DoNotOptimize(g.layers.data());
  }
}
BENCHMARK(BM_ParseAndInfer);

void BM_DetectModules(benchmark::State& state) {
  NetworkGraph g = infer_shapes(load_network(fixture("inception_v3.json")));
  NpuConfig cfg;
  for (auto _ : state) {
    auto modules = detect_modules(strip_long_skips(g, {}, cfg));
    benchmark::DoNotOptimize(modules.data());
  }
}
BENCHMARK(BM_DetectModules);

void BM_PlanNetwork(benchmark::State& state) {
  NetworkGraph g = infer_shapes(load_network(fixture("inception_v3.json")));
  NpuConfig cfg;
  auto modules = detect_modules(strip_long_skips(g, {}, cfg));
  for (auto _ : state) {
    NetworkPlan plan = plan_network(g, modules, cfg, {});
    benchmark::DoNotOptimize(plan.plans.data());
  }
}
BENCHMARK(BM_PlanNetwork);

void BM_Pipeline(benchmark::State& state) {
  RunConfig run;
  run.network_path = fixture(state.range(0) ? "resnet50.json"
                                            : "inception_v3.json");
  for (auto _ : state) {
    PipelineResult r = run_pipeline(run);
    std::string doc = plan_document(r);
    benchmark::DoNotOptimize(doc.data());
  }
}
BENCHMARK(BM_Pipeline)->Arg(0)->Arg(1);

}  // namespace
}  // namespace npuplan

BENCHMARK_MAIN();
