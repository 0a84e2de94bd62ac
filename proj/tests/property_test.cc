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

// Randomised invariants. Every suite uses a fixed seed so failures replay.

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "npuplan/branch_planner.h"
#include "npuplan/graph.h"
#include "npuplan/module_detect.h"
#include "npuplan/traffic_report.h"
#include "oracles/oracles.h"

namespace npuplan {
namespace {

constexpr int kTrials = 200;

const char* const kFixtures[] = {"inception_v3.json", "resnet50.json",
                                 "encoder_decoder.json", "toy_concat.json",
                                 "toy_chain.json"};

NetworkGraph load(const std::string& name) {
  return infer_shapes(
      load_network(std::string(NPUPLAN_FIXTURE_DIR "/") + name));
}

NetworkGraph graph_from_edges(int n,
                              const std::vector<std::pair<int, int>>& edges) {
  NetworkGraph g;
  for (int i = 0; i < n; ++i) {
    LayerNode l;
    l.id = layer_id(i);
    l.name = "l" + std::to_string(i);
    g.layers.push_back(l);
  }
  for (auto [a, b] : edges) g.edges.push_back({layer_id(a), layer_id(b)});
  g.rebuild();
  return g;
}

struct Planned {
  NetworkGraph g;
  NetworkPlan plan;
};

Planned plan_all(NetworkGraph g, const NpuConfig& cfg, ForceOption force,
                 bool whole_network = false) {
  NetworkPlanOptions opts;
  opts.force = force;
  opts.whole_network = whole_network;
  auto modules = detect_modules(strip_long_skips(g, {}, cfg));
  NetworkPlan plan = plan_network(g, std::move(modules), cfg, opts);
  return {std::move(g), std::move(plan)};
}

void check_plan(const NetworkGraph& g, const ModuleDescriptor& m,
                const AllocationPlan& p, const NpuConfig& cfg) {
  SCOPED_TRACE(p.module_name + " option " + to_string(p.option));
  auto overlap = oracle::find_overlap(p, cfg.on_chip_bytes);
  EXPECT_FALSE(overlap) << *overlap;
  if (p.fallback()) {
    EXPECT_TRUE(p.regions.empty());
    return;
  }
  for (const BranchPlan& bp : p.branches) {
    for (std::size_t k = 0; k < bp.layers.size(); ++k) {
      const LayerRecord& r = bp.layers[k];
      int writes = 0, ifm_reads = 0;
      for (const Spill& s : r.spills) {
        if (s.direction == SpillDirection::kWrite) ++writes;
        if (s.role == RegionRole::kIfm) ++ifm_reads;
      }
      // A layer writes its output off chip exactly when it does not forward.
      EXPECT_EQ(writes, r.fwd ? 0 : 1) << g.layer(r.layer).name;
      // Records are flattened across nested branches, so the previous
      // record is only the producer when the graph says so.
      if (k == 0) continue;
      const LayerRecord& prev = bp.layers[k - 1];
      const auto& preds = g.preds[index(r.layer)];
      if (preds.size() != 1 || preds[0] != prev.layer) continue;
      if (prev.fwd) {
        EXPECT_EQ(ifm_reads, 0) << "forwarded input of "
                                << g.layer(r.layer).name << " was read back";
      } else {
        EXPECT_EQ(ifm_reads, 1) << g.layer(r.layer).name;
      }
    }
    // Under option II the last op of every branch, nested or not, streams
    // its output off chip.
    ASSERT_FALSE(bp.layers.empty());
    if (p.option == ProcessingOption::kII) {
      EXPECT_FALSE(bp.layers.back().fwd);
    }
  }
  int real_branches = 0;
  for (const Branch& br : m.branches) real_branches += !br.is_identity();
  EXPECT_EQ(static_cast<int>(p.branches.size()), real_branches);
  if (p.option == ProcessingOption::kII) {
    EXPECT_EQ(p.mofm_sink, MofmSink::kOffChip);
  }
}

TEST(GraphProperties, DagCheckAgreesWithOracle) {
  std::mt19937 rng(11);
  int cyclic = 0;
  for (int t = 0; t < kTrials; ++t) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    auto edges = oracle::random_edges(rng, n, 0.3, t % 2 == 1);
    NetworkGraph g = graph_from_edges(n, edges);
    DagCheck check = validate_dag(g);
    const bool expect_cycle = oracle::has_cycle(n, edges);
    ASSERT_EQ(!check.ok, expect_cycle) << "trial " << t;
    EXPECT_EQ(g.topo_order.empty(), expect_cycle && n > 0);
    if (expect_cycle) {
      ++cyclic;
      std::set<std::pair<int, int>> edge_set(edges.begin(), edges.end());
      const auto& c = check.cycle;
      ASSERT_FALSE(c.empty());
      for (std::size_t i = 0; i < c.size(); ++i) {
        int a = index(c[i]), b = index(c[(i + 1) % c.size()]);
        EXPECT_TRUE(edge_set.count({a, b})) << a << "->" << b;
      }
    } else {
      std::vector<int> pos(n);
      for (int i = 0; i < n; ++i) pos[index(g.topo_order[i])] = i;
      for (auto [a, b] : edges) EXPECT_LT(pos[a], pos[b]);
    }
  }
  EXPECT_GT(cyclic, 0);
}

TEST(GraphProperties, SerializeRoundTrip) {
  std::mt19937 rng(12);
  std::vector<std::string> docs;
  for (const char* f : kFixtures) {
    docs.push_back(serialize_network(
        load_network(std::string(NPUPLAN_FIXTURE_DIR "/") + f)));
  }
  oracle::RandomModuleSpec spec;
  spec.allow_nesting = true;
  for (int t = 0; t < 50; ++t) {
    docs.push_back(oracle::random_module_network(rng, spec));
  }
  for (const std::string& doc : docs) {
    NetworkGraph a = parse_network(doc);
    const std::string once = serialize_network(a);
    NetworkGraph b = parse_network(once);
    EXPECT_EQ(serialize_network(b), once);
    ASSERT_EQ(a.layers.size(), b.layers.size());
    EXPECT_EQ(a.edges, b.edges);
  }
}

TEST(GraphProperties, ShapeInferenceMatchesOracle) {
  std::mt19937 rng(13);
  oracle::RandomModuleSpec spec;
  spec.allow_nesting = true;
  std::vector<NetworkGraph> graphs;
  for (const char* f : kFixtures) graphs.push_back(load(f));
  for (int t = 0; t < kTrials; ++t) {
    graphs.push_back(
        infer_shapes(parse_network(oracle::random_module_network(rng, spec))));
  }
  for (const NetworkGraph& g : graphs) {
    NetworkGraph again = infer_shapes(g);
    for (const LayerNode& l : g.layers) {
      const LayerNode& r = again.layer(l.id);
      EXPECT_EQ(l.out_shape(), r.out_shape()) << l.name;
      EXPECT_EQ(l.weight_bytes, r.weight_bytes) << l.name;
      const auto& preds = g.preds[index(l.id)];
      if (l.kind == LayerKind::kConvolution || is_pooling(l.kind)) {
        EXPECT_EQ(l.out_h, oracle::conv_out(l.in_h, l.kernel_h, l.stride_h,
                                            l.pad_h)) << l.name;
        EXPECT_EQ(l.out_w, oracle::conv_out(l.in_w, l.kernel_w, l.stride_w,
                                            l.pad_w)) << l.name;
      }
      if (l.kind == LayerKind::kConvolution) {
        EXPECT_EQ(l.weight_bytes,
                  std::int64_t{l.kernel_h} * l.kernel_w * l.in_channels *
                      l.out_channels) << l.name;
      }
      if (l.kind == LayerKind::kConcatenation) {
        int c = 0;
        for (LayerId p : preds) c += g.layer(p).out_channels;
        EXPECT_EQ(l.out_channels, c) << l.name;
      }
      if (l.kind == LayerKind::kElementwiseAdd) {
        for (LayerId p : preds) EXPECT_EQ(g.layer(p).out_shape(), l.out_shape());
      }
    }
  }
}

TEST(ReorderProperties, StableDescending) {
  std::mt19937 rng(14);
  for (int t = 0; t < kTrials * 5; ++t) {
    const int n = std::uniform_int_distribution<int>(0, 8)(rng);
    std::vector<Bytes> sizes(n);
    for (Bytes& s : sizes) s = std::uniform_int_distribution<int>(0, 4)(rng);
    std::vector<int> order = reorder_by_size(sizes);
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> iota(n);
    std::iota(iota.begin(), iota.end(), 0);
    ASSERT_EQ(sorted, iota);
    for (int i = 0; i + 1 < n; ++i) {
      const Bytes a = sizes[order[i]], b = sizes[order[i + 1]];
      EXPECT_GE(a, b);
      if (a == b) {
        EXPECT_LT(order[i], order[i + 1]);
      }
    }
  }
}

TEST(PlanProperties, RandomModules) {
  std::mt19937 rng(15);
  oracle::RandomModuleSpec spec;
  spec.allow_nesting = true;
  std::map<std::string, int> seen;
  for (int t = 0; t < kTrials; ++t) {
    SCOPED_TRACE("trial " + std::to_string(t));
    NetworkGraph g =
        infer_shapes(parse_network(oracle::random_module_network(rng, spec)));
    NpuConfig cfg = t % 2 ? NpuConfig{} : NpuConfig::plain();
    cfg.on_chip_bytes = std::uniform_int_distribution<int>(4, 40)(rng) * 1024;
    for (ForceOption force :
         {ForceOption::kAuto, ForceOption::kI, ForceOption::kII}) {
      Planned p = plan_all(g, cfg, force);
      ASSERT_EQ(p.plan.plans.size(), 1u);
      check_plan(p.g, p.plan.modules[0], p.plan.plans[0], cfg);
      ++seen[std::string(to_string(p.plan.plans[0].option)) + "/" +
             to_string(p.plan.plans[0].status)];
    }
  }
  // The sweep reaches both options and at least one fallback.
  EXPECT_GT((seen["I/planned"]), 0);
  EXPECT_GT((seen["II/planned"]), 0);
  int fallbacks = 0;
  for (const auto& [k, v] : seen) {
    if (k.rfind("naive/", 0) == 0) fallbacks += v;
  }
  EXPECT_GT(fallbacks, 0);
}

TEST(PlanProperties, Fixtures) {
  for (const char* f : kFixtures) {
    for (ForceOption force : {ForceOption::kAuto, ForceOption::kI,
                              ForceOption::kII, ForceOption::kNaive}) {
      for (bool whole : {false, true}) {
        SCOPED_TRACE(std::string(f) + (whole ? " whole" : ""));
        NpuConfig cfg;
        Planned p = plan_all(load(f), cfg, force, whole);
        for (std::size_t i = 0; i < p.plan.plans.size(); ++i) {
          check_plan(p.g, p.plan.modules[i], p.plan.plans[i], cfg);
        }
      }
    }
  }
}

TEST(PlanProperties, ForwardedModulesShareTheBoundaryTensor) {
  for (const char* f : kFixtures) {
    NpuConfig cfg;
    Planned p = plan_all(load(f), cfg, ForceOption::kAuto);
    const auto& plans = p.plan.plans;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const bool fwd_in = plans[i].mifm_source == MifmSource::kOnChipForwarded;
      ASSERT_EQ(fwd_in, i > 0 && plans[i - 1].mofm_sink ==
                                     MofmSink::kForwardedToNext)
          << plans[i].module_name;
      if (!fwd_in) continue;
      EXPECT_EQ(plans[i - 1].option, ProcessingOption::kI);
      EXPECT_NE(plans[i].mifm_at_top, plans[i - 1].mifm_at_top);
      // The previous MOFM slices tile the bytes of the next MIFM.
      Bytes lo = cfg.on_chip_bytes, hi = 0, sum = 0;
      for (const auto& r : plans[i - 1].regions) {
        if (r.role != RegionRole::kMofm) continue;
        lo = std::min(lo, r.offset);
        hi = std::max(hi, r.end());
        sum += r.size;
      }
      const RegionAssignment& mifm = plans[i].regions.at(0);
      ASSERT_EQ(mifm.role, RegionRole::kMifm);
      EXPECT_EQ(mifm.offset, lo) << plans[i].module_name;
      EXPECT_EQ(mifm.end(), hi) << plans[i].module_name;
      EXPECT_EQ(sum, mifm.size) << plans[i].module_name;
      for (const Spill& s : plans[i].boundary_spills) {
        EXPECT_NE(s.role, RegionRole::kMifm);
      }
    }
  }
}

TEST(PlanProperties, ProposedNeverExceedsNaive) {
  std::mt19937 rng(16);
  oracle::RandomModuleSpec spec;
  spec.allow_nesting = true;
  std::vector<std::pair<std::string, NetworkGraph>> graphs;
  for (const char* f : kFixtures) graphs.push_back({f, load(f)});
  for (int t = 0; t < 50; ++t) {
    graphs.push_back({"random " + std::to_string(t),
                      infer_shapes(parse_network(
                          oracle::random_module_network(rng, spec)))});
  }
  for (auto& [name, g] : graphs) {
    for (bool merges : {false, true}) {
      for (ForceOption force :
           {ForceOption::kAuto, ForceOption::kI, ForceOption::kII}) {
        NpuConfig cfg;
        Planned p = plan_all(g, cfg, force);
        TrafficOptions topts;
        topts.count_merge_traffic = merges;
        auto naive = naive_traffic(p.g, p.plan.modules, cfg, topts);
        auto prop = proposed_traffic(p.g, p.plan, cfg, topts);
        ASSERT_EQ(naive.size(), prop.size());
        for (std::size_t i = 0; i < naive.size(); ++i) {
          EXPECT_LE(prop[i].fm_bytes, naive[i].fm_bytes)
              << name << " " << naive[i].name;
          EXPECT_EQ(prop[i].weight_bytes, naive[i].weight_bytes);
        }
      }
    }
  }
}

// Small enough that an exhaustive placement search terminates quickly.
NpuConfig brute_force_config(std::mt19937& rng, std::int64_t unit) {
  NpuConfig cfg = NpuConfig::plain();
  cfg.maa_count = 1;
  cfg.patch_h = cfg.patch_w = 2;
  cfg.accum_bytes = 4;
  cfg.alignment_bytes = static_cast<int>(unit);
  cfg.on_chip_bytes = std::uniform_int_distribution<int>(8, 64)(rng) * unit;
  return cfg;
}

TEST(PlanProperties, ZeroSpillMatchesExhaustiveSearch) {
  constexpr std::int64_t kUnit = 64;
  std::mt19937 rng(17);
  oracle::RandomModuleSpec spec;
  spec.max_branches = 3;
  spec.max_layers = 3;
  int feasible = 0, infeasible = 0, disagreements = 0;
  for (int t = 0; t < kTrials; ++t) {
    NetworkGraph g =
        infer_shapes(parse_network(oracle::random_module_network(rng, spec)));
    NpuConfig cfg = brute_force_config(rng, kUnit);
    Planned p = plan_all(g, cfg, ForceOption::kAuto);
    ASSERT_EQ(p.plan.plans.size(), 1u);
    const AllocationPlan& plan = p.plan.plans[0];
    const bool planner = plan.option == ProcessingOption::kI &&
                         plan.spill_bytes() == 0;
    const bool exists =
        oracle::zero_spill_schedule_exists(p.plan.modules[0], p.g, cfg, kUnit);
    (exists ? feasible : infeasible)++;
    // A zero-spill plan is a witness, so the search must agree with it.
    if (planner) {
      EXPECT_TRUE(exists) << "trial " << t;
    }
    if (exists != planner) {
      ++disagreements;
      ADD_FAILURE() << "trial " << t << ": search finds a zero-spill schedule"
                    << " the planner misses (option " << to_string(plan.option)
                    << ", " << plan.spill_bytes() << " B spilled, capacity "
                    << cfg.on_chip_bytes << ")";
    }
  }
  EXPECT_GT(feasible, 10);
  EXPECT_GT(infeasible, 10);
  EXPECT_EQ(disagreements, 0);
}

}  // namespace
}  // namespace npuplan
