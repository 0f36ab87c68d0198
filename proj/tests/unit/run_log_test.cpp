// Copyright 2026 The Ideatree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "ideatree/core/error.hpp"
#include "ideatree/core/rng.hpp"
#include "ideatree/core/run_log.hpp"
#include "ideatree/core/tree_editor.hpp"

namespace ideatree {
namespace {

std::string to_text(const std::vector<nlohmann::json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

ErrorCode parse_error(const std::string& text) {
  try {
    RunLog::parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kUnknownNode;
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(17), b(17), c(18);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(RngTest, RangesAndMoments) {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_NEAR(sum / 20000, 0.0, 0.03);
  EXPECT_NEAR(sq / 20000, 1.0, 0.05);
}

TEST(RngTest, StableHashes) {
  // Published FNV-1a 64 test vectors.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(RunLogTest, RecordsAreOrderedAndVerifiable) {
  double now = 0.0;
  RunLog log([&] { return now; });
  now = 1.5;
  log.append(event::kStageStarted, {{"stage", "adding"}});
  now = 2.0;
  log.append(event::kStageFinished, {{"stage", "adding"}});
  const auto records = log.records();
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0]["type"], "LogHeader");
  EXPECT_EQ(records[0]["log_version"], kLogVersion);
  EXPECT_EQ(records[1]["seq"], 1);
  EXPECT_EQ(records[1]["t"], 1.5);
  EXPECT_EQ(log.records_of(event::kStageFinished).size(), 1u);
  EXPECT_EQ(RunLog::parse(to_text(records)), records);
}

TEST(RunLogTest, DetectsTamperingTruncationOfOrderAndVersion) {
  RunLog log;
  for (int i = 0; i < 5; ++i) log.append(event::kBackpropagated, {{"i", i}});
  auto records = log.records();

  auto edited = records;
  edited[3]["i"] = 99;
  EXPECT_EQ(parse_error(to_text(edited)), ErrorCode::kCorruptLog);

  auto dropped = records;
  dropped.erase(dropped.begin() + 2);
  EXPECT_EQ(parse_error(to_text(dropped)), ErrorCode::kCorruptLog);

  EXPECT_EQ(parse_error(to_text(records) + "{oops\n"), ErrorCode::kCorruptLog);
  EXPECT_EQ(parse_error(""), ErrorCode::kCorruptLog);

  // A header claiming another version, with a consistent digest chain.
  nlohmann::json header = records[0];
  header.erase("h");
  header["log_version"] = kLogVersion + 1;
  const auto d = record_digest(header, 0);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(d));
  header["h"] = hex;
  EXPECT_EQ(parse_error(header.dump() + "\n"), ErrorCode::kLogVersionMismatch);
}

TEST(RunLogTest, FileMirrorMatchesMemory) {
  const auto path = std::filesystem::temp_directory_path() / "ideatree_runlog_test.jsonl";
  {
    RunLog log;
    log.append(event::kRunStarted);
    log.attach_file(path);
    log.append(event::kRunFinished, {{"best", 3}});
    log.flush();
    EXPECT_EQ(RunLog::load(path), log.records());
  }
  std::filesystem::remove(path);
  try {
    RunLog::load(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingRunArtifacts);
  }
}

TEST(TreeEditorTest, JournalReplaysToSameTree) {
  RunLog log;
  IdeationTree tree("eda");
  TreeEditor ed(tree, &log);
  ed.record_root();
  Node fe;
  fe.level = NodeLevel::kFe;
  fe.idea_text = "fe";
  const NodeId f = ed.add_node(tree.root_id(), fe);
  for (int i = 0; i < 3; ++i) {
    Node mt;
    mt.idea_text = "mt " + std::to_string(i);
    const NodeId m = ed.add_node(f, mt);
    ed.set_code(m, "epochs=" + std::to_string(i + 1));
    ed.set_predicted(m, 0.1 * i);
    if (i == 1) {
      ed.set_failed(m, "boom");
    } else {
      ed.set_evaluated(m, 0.3 + i * 0.123456789012345);
    }
  }
  ed.backpropagate();
  ed.set_iteration(4);
  EXPECT_EQ(apply_journal(RunLog::parse(to_text(log.records()))), tree);
}

TEST(TreeEditorTest, BrokenJournalIsCorruptLog) {
  RunLog log;
  IdeationTree tree;
  TreeEditor ed(tree, &log);
  Node fe;
  fe.level = NodeLevel::kFe;
  ed.add_node(tree.root_id(), fe);  // root never journaled
  try {
    apply_journal(log.records());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruptLog);
  }
}

}  // namespace
}  // namespace ideatree
