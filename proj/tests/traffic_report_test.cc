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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "oracles/oracles.h"

namespace npuplan {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

constexpr double kKB = 1024.0;

NetworkGraph load(const std::string& name) {
  return infer_shapes(
      load_network(std::string(NPUPLAN_FIXTURE_DIR "/") + name));
}

int round4(int v) { return (v + 3) / 4 * 4; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

struct Inception {
  NetworkGraph g = load("inception_v3.json");
  NpuConfig cfg;
  std::vector<ModuleDescriptor> modules =
      detect_modules(strip_long_skips(g, {}, cfg));
};

TEST(NaiveTraffic, InceptionA1MatchesShapeOracle) {
  Inception f;
  auto naive = naive_traffic(f.g, f.modules, f.cfg);
  ASSERT_EQ(naive.size(), 11u);
  const TrafficSide& a1 = naive[0];
  EXPECT_EQ(a1.name, "inception-a1");
  EXPECT_EQ(a1.reads, 8);
  EXPECT_EQ(a1.writes, 8);

  std::int64_t padded = 0, dense = 0;
  for (const LayerNode& l : f.g.layers) {
    if (l.name.rfind("inception-a1/", 0) != 0 || is_merge(l.kind)) continue;
    padded += oracle::tensor_size(round4(l.in_h), round4(l.in_w), l.in_channels) +
              oracle::tensor_size(round4(l.out_h), round4(l.out_w), l.out_channels);
    dense += oracle::tensor_size(l.in_h, l.in_w, l.in_channels) +
             oracle::tensor_size(l.out_h, l.out_w, l.out_channels);
  }
  EXPECT_EQ(a1.fm_bytes, padded);
  EXPECT_DOUBLE_EQ(a1.fm_bytes / kKB, 2308.5);

  NpuConfig dense_cfg;
  dense_cfg.layout_tile_h = dense_cfg.layout_tile_w = 1;
  EXPECT_EQ(naive_traffic(f.g, f.modules, dense_cfg)[0].fm_bytes, dense);
}

TEST(NaiveTraffic, WeightsAreModuleSums) {
  Inception f;
  auto naive = naive_traffic(f.g, f.modules, f.cfg);
  EXPECT_EQ(naive[0].weight_bytes, 254976);
  for (std::size_t i = 0; i < naive.size(); ++i) {
    Bytes w = 0;
    for (LayerId l : module_layers(f.modules[i])) w += f.g.layer(l).weight_bytes;
    EXPECT_EQ(naive[i].weight_bytes, w) << naive[i].name;
  }
}

TEST(NaiveTraffic, MergeTrafficIsOptional) {
  Inception f;
  TrafficOptions opts;
  opts.count_merge_traffic = true;
  auto base = naive_traffic(f.g, f.modules, f.cfg);
  auto with = naive_traffic(f.g, f.modules, f.cfg, opts);
  // a1 has one merge: its four inputs are read and its output is written.
  const LayerNode& cat = f.g.layer(f.modules[0].merge);
  Bytes extra = tensor_bytes(cat.out_shape(), f.cfg);
  for (LayerId p : f.g.preds[index(cat.id)]) {
    extra += tensor_bytes(f.g.layer(p).out_shape(), f.cfg);
  }
  EXPECT_EQ(with[0].fm_bytes - base[0].fm_bytes, extra);
  EXPECT_EQ(with[0].reads, base[0].reads + 1);
  EXPECT_EQ(with[0].writes, base[0].writes + 1);
  // c1 holds two nested merges besides its own.
  EXPECT_EQ(with[9].reads, base[9].reads + 3);
}

TEST(NaiveTraffic, WholeNetworkAddsOtherLayers) {
  Inception f;
  TrafficOptions opts;
  opts.whole_network = true;
  auto naive = naive_traffic(f.g, f.modules, f.cfg, opts);
  ASSERT_EQ(naive.size(), 12u);
  EXPECT_EQ(naive.back().name, kOtherLayersRow);
  std::set<LayerId> inside;
  for (const auto& m : f.modules) {
    for (LayerId l : module_layers(m)) inside.insert(l);
    inside.insert(m.merge);
  }
  int outside = 0;
  for (const LayerNode& l : f.g.layers) {
    if (l.kind == LayerKind::kInput || l.kind == LayerKind::kOutput) continue;
    if (!inside.count(l.id)) ++outside;
  }
  EXPECT_EQ(naive.back().reads, outside);
  EXPECT_EQ(naive.back().writes, outside);
  EXPECT_GT(naive.back().weight_bytes, 0);
}

TEST(ProposedTraffic, InceptionDefaults) {
  Inception f;
  NetworkPlan plan = plan_network(f.g, f.modules, f.cfg, {});
  auto naive = naive_traffic(f.g, plan.modules, f.cfg);
  auto prop = proposed_traffic(f.g, plan, f.cfg);
  TrafficReport report = make_report(naive, prop);
  const TrafficRow t = report.totals();
  EXPECT_EQ(t.name, "total");
  EXPECT_EQ(t.naive_reads, 100);
  EXPECT_EQ(t.naive_writes, 100);
  EXPECT_EQ(t.proposed_reads, 1);
  EXPECT_EQ(t.proposed_writes, 3);
  EXPECT_DOUBLE_EQ(t.proposed_fm / kKB, 600.0);
  RatioSummary s = compare(report);
  EXPECT_EQ(s.access_ratio, "1/50");
  EXPECT_NEAR(s.overall_pct, 47.14, 0.005);
  EXPECT_NEAR(s.fm_pct, 2.41, 0.005);
  RatioSummary s2 = compare(naive, prop);
  EXPECT_EQ(s2.access_ratio, s.access_ratio);
  EXPECT_DOUBLE_EQ(s2.overall_pct, s.overall_pct);
}

TEST(ProposedTraffic, ForcedNaiveEqualsNaive) {
  Inception f;
  NetworkPlanOptions opts;
  opts.force = ForceOption::kNaive;
  NetworkPlan plan = plan_network(f.g, f.modules, f.cfg, opts);
  auto naive = naive_traffic(f.g, plan.modules, f.cfg);
  auto prop = proposed_traffic(f.g, plan, f.cfg);
  ASSERT_EQ(naive.size(), prop.size());
  for (std::size_t i = 0; i < naive.size(); ++i) {
    EXPECT_EQ(naive[i].fm_bytes, prop[i].fm_bytes);
    EXPECT_EQ(naive[i].reads, prop[i].reads);
  }
  RatioSummary s = compare(make_report(naive, prop));
  EXPECT_DOUBLE_EQ(s.overall_pct, 100.0);
  EXPECT_DOUBLE_EQ(s.fm_pct, 100.0);
  EXPECT_EQ(s.access_ratio, "1/1");
}

TEST(MakeReport, MismatchedSidesThrow) {
  TrafficSide a{"a", 10, 5, 1, 1};
  TrafficSide b{"b", 10, 5, 1, 1};
  auto expect_comparison = [](const std::vector<TrafficSide>& n,
                              const std::vector<TrafficSide>& p) {
    try {
      make_report(n, p);
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kComparison);
    }
  };
  expect_comparison({a}, {a, b});
  expect_comparison({a}, {b});
  TrafficSide heavier = a;
  heavier.weight_bytes = 11;
  expect_comparison({a}, {heavier});
}

TEST(MakeReport, RatiosOfZeroNaiveAre100) {
  TrafficRow r;
  EXPECT_DOUBLE_EQ(r.overall_ratio(), 100.0);
  EXPECT_DOUBLE_EQ(r.fm_ratio(), 100.0);
  r.weight_bytes = 100;
  r.naive_fm = 300;
  r.proposed_fm = 100;
  EXPECT_DOUBLE_EQ(r.overall_ratio(), 50.0);
  EXPECT_NEAR(r.fm_ratio(), 100.0 / 3, 1e-12);
}

TEST(ReducedFraction, Values) {
  EXPECT_EQ(reduced_fraction(4, 200), "1/50");
  EXPECT_EQ(reduced_fraction(6, 4), "3/2");
  EXPECT_EQ(reduced_fraction(0, 7), "0/1");
  EXPECT_EQ(reduced_fraction(3, 0), "-");
}

TEST(RenderReport, EmptyCsvIsHeaderOnly) {
  const std::string csv = render_report(TrafficReport{}, "csv");
  auto lines = lines_of(csv);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0],
            "module,w_bytes,naive_fm,naive_overall,prop_fm,prop_overall,"
            "overall_ratio,fm_ratio,n_reads,n_writes,p_reads,p_writes");
}

TEST(RenderReport, InceptionTableAndCsv) {
  Inception f;
  NetworkPlan plan = plan_network(f.g, f.modules, f.cfg, {});
  TrafficReport report = make_report(naive_traffic(f.g, plan.modules, f.cfg),
                                     proposed_traffic(f.g, plan, f.cfg));
  const std::string table = render_report(report, "table");
  EXPECT_EQ(table, render_report(report, "table"));
  int module_rows = 0, total_rows = 0;
  for (const std::string& line : lines_of(table)) {
    if (line.rfind("inception-", 0) == 0 || line.rfind("reduction-", 0) == 0) {
      ++module_rows;
    }
    if (line.rfind("total", 0) == 0) ++total_rows;
  }
  EXPECT_EQ(module_rows, 11);
  EXPECT_EQ(total_rows, 1);
  EXPECT_THAT(table, HasSubstr("249.0"));
  EXPECT_THAT(table, HasSubstr("21073.5"));

  auto csv = lines_of(render_report(report, "csv"));
  ASSERT_EQ(csv.size(), 13u);
  EXPECT_THAT(csv[1], StartsWith("inception-a1,254976,"));
  EXPECT_THAT(csv[4], StartsWith("reduction-a,"));
  EXPECT_THAT(csv[4], HasSubstr(",5,5,0,3"));
  EXPECT_THAT(csv[12], StartsWith("total,"));
  EXPECT_THAT(csv[12], HasSubstr(",47.14,2.41,100,100,1,3"));

  try {
    render_report(report, "xml");
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsage);
  }
}

TEST(ProfileSizes, SingleLayer) {
  NetworkGraph g = infer_shapes(parse_network(
      R"({"input": [4, 4, 3], "layers": [{"name": "in", "kind": "input"}],
          "edges": []})"));
  auto rows = profile_sizes(g, NpuConfig::plain());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].name, "in");
  EXPECT_EQ(rows[0].fm_bytes, 48);
  EXPECT_EQ(rows[0].weight_bytes, 0);
  auto csv = lines_of(render_profile_csv(rows));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[0], "index,layer,kind,weight_bytes,fm_bytes");
  EXPECT_EQ(csv[1], "0,in,input,0,48");
}

TEST(ProfileSizes, ResNetCoversEveryLayerInOrder) {
  NetworkGraph g = load("resnet50.json");
  auto rows = profile_sizes(g, NpuConfig{});
  ASSERT_EQ(rows.size(), 74u);
  std::map<std::string, int> pos;
  for (const auto& r : rows) pos[r.name] = r.index;
  for (const Edge& e : g.edges) {
    EXPECT_LT(pos[g.layer(e.src).name], pos[g.layer(e.dst).name]);
  }
  EXPECT_EQ(rows.front().kind, LayerKind::kInput);
}

}  // namespace
}  // namespace npuplan
