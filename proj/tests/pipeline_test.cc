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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace npuplan {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using ::testing::StartsWith;

RunConfig run_for(const std::string& fixture) {
  RunConfig run;
  run.network_path = std::string(NPUPLAN_FIXTURE_DIR "/") + fixture;
  return run;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("npuplan_test_" + std::to_string(::testing::UnitTest::GetInstance()
                                                   ->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(RunPipeline, Inception) {
  PipelineResult r = run_pipeline(run_for("inception_v3.json"));
  EXPECT_EQ(r.plan.plans.size(), 11u);
  EXPECT_EQ(r.report.rows.size(), 11u);
  EXPECT_EQ(r.summary.access_ratio, "1/50");
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(RunPipeline, MissingFile) {
  try {
    run_pipeline(run_for("does_not_exist.json"));
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFile);
    EXPECT_EQ(exit_code(e.code()), 3);
  }
}

TEST(RunPipeline, Cycle) {
  try {
    run_pipeline(run_for("toy_cycle.json"));
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycle);
  }
}

TEST(RunPipeline, ForceNaiveMatchesNaive) {
  RunConfig run = run_for("inception_v3.json");
  run.force = ForceOption::kNaive;
  PipelineResult r = run_pipeline(run);
  for (const TrafficRow& row : r.report.rows) {
    EXPECT_EQ(row.proposed_fm, row.naive_fm) << row.name;
  }
  EXPECT_DOUBLE_EQ(r.summary.overall_pct, 100.0);
  EXPECT_DOUBLE_EQ(r.summary.fm_pct, 100.0);
}

TEST(RunPipeline, OverridesApply) {
  RunConfig run = run_for("inception_v3.json");
  run.alignment_bytes = 1;
  run.layout_tile = 1;
  run.max_skip_span = 4;
  PipelineResult r = run_pipeline(run);
  EXPECT_EQ(r.cfg.layout_tile_h, 1);
  EXPECT_EQ(r.cfg.layout_tile_w, 1);
  RunConfig bad = run;
  bad.alignment_bytes = 0;
  EXPECT_THROW(run_pipeline(bad), Error);
  bad = run;
  bad.max_skip_span = -1;
  EXPECT_THROW(run_pipeline(bad), Error);
}

TEST(RunPipeline, WholeNetworkAddsOtherLayersRow) {
  RunConfig run = run_for("inception_v3.json");
  run.whole_network = true;
  PipelineResult r = run_pipeline(run);
  ASSERT_EQ(r.report.rows.size(), 12u);
  EXPECT_EQ(r.report.rows.back().name, kOtherLayersRow);
  EXPECT_EQ(r.report.rows.back().naive_fm, r.report.rows.back().proposed_fm);
}

TEST(PlanDocument, DeterministicAndComplete) {
  PipelineResult a = run_pipeline(run_for("inception_v3.json"));
  PipelineResult b = run_pipeline(run_for("inception_v3.json"));
  const std::string doc = plan_document(a);
  EXPECT_EQ(doc, plan_document(b));
  auto j = nlohmann::json::parse(doc);
  ASSERT_EQ(j["modules"].size(), 11u);
  EXPECT_EQ(j["modules"][0]["name"], "inception-a1");
  EXPECT_EQ(j["modules"][3]["option"], "II");
  EXPECT_EQ(j["modules"][3]["mofm_sink"], "off-chip");
  EXPECT_EQ(j["summary"]["access_ratio"], "1/50");
}

TEST(InspectSummary, Lines) {
  PipelineResult r = run_pipeline(run_for("inception_v3.json"));
  const std::string s = inspect_summary(r);
  EXPECT_THAT(s, StartsWith("inception-a1  branches=4  layers=8"));
  EXPECT_THAT(s, HasSubstr("inception-c1  branches=4  layers=10  "
                           "merge=concatenation  depth=2"));
  PipelineResult chain = run_pipeline(run_for("toy_chain.json"));
  EXPECT_THAT(inspect_summary(chain), StartsWith("0 modules"));
}

TEST(WriteArtifacts, WritesEveryFileWithoutTemporaries) {
  TempDir dir;
  PipelineResult r = run_pipeline(run_for("toy_concat.json"));
  write_artifacts(r, dir.path() / "out");
  for (const char* f : {"plan.json", "report.txt", "report.csv",
                        "profile.csv", "diagnostics.txt"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "out" / f)) << f;
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir.path() / "out")) {
    EXPECT_NE(e.path().extension(), ".tmp");
    ++files;
  }
  EXPECT_EQ(files, 5);
  EXPECT_EQ(slurp(dir.path() / "out" / "plan.json"), plan_document(r));
}

TEST(WriteArtifacts, SecondRunIsByteIdentical) {
  TempDir dir;
  write_artifacts(run_pipeline(run_for("inception_v3.json")), dir.path() / "a");
  write_artifacts(run_pipeline(run_for("inception_v3.json")), dir.path() / "b");
  for (const char* f : {"plan.json", "report.txt", "report.csv", "profile.csv"}) {
    EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
  }
}

TEST(WriteFileAtomic, ReplacesContentAndReportsFailures) {
  TempDir dir;
  fs::create_directories(dir.path());
  const fs::path p = dir.path() / "x.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(slurp(p), "two");
  try {
    write_file_atomic(dir.path() / "missing" / "x.txt", "z");
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFile);
  }
}

}  // namespace
}  // namespace npuplan
