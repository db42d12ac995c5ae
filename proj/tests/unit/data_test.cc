// Copyright 2026 The Fedring Authors
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

#include <fstream>

#include <Eigen/QR>

#include "doctest.h"
#include "fedring/data_synth.h"
#include "fedring/errors.h"
#include "test_util.h"

namespace fedring::data {
namespace {

Eigen::VectorXd Ols(const DatasetShard& s) {
  return s.inputs.colPivHouseholderQr().solve(s.targets);
}

Eigen::VectorXd ClassMean(const DatasetShard& s, int label) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.feature_dim()));
  int n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<int>(s.targets[static_cast<Eigen::Index>(i)]) == label) {
      sum += s.inputs.row(static_cast<Eigen::Index>(i)).transpose();
      ++n;
    }
  }
  return sum / n;
}

void WriteText(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

TEST_SUITE("data") {

TEST_CASE("MakeUsers shapes, split and determinism") {
  auto p = HeterogeneityProfile::Uniform(3, 500, Task::kClassification, 5.0, 8);
  const auto a = MakeUsers(p, 1);
  const auto b = MakeUsers(p, 1);
  const auto c = MakeUsers(p, 2);
  REQUIRE(a.size() == 3);
  for (std::size_t u = 0; u < 3; ++u) {
    CHECK(a[u].train.size() == 400);
    CHECK(a[u].test.size() == 100);
    CHECK(a[u].train.feature_dim() == 8);
    CHECK(a[u].train.inputs == b[u].train.inputs);
    CHECK(a[u].test.targets == b[u].test.targets);
    CHECK(a[u].train.inputs != c[u].train.inputs);
    for (double y : a[u].train.targets) CHECK((y == 0.0 || y == 1.0));
  }
}

TEST_CASE("Profile validation") {
  auto p = HeterogeneityProfile::Uniform(3, 10, Task::kClassification, 1.0, 4);
  p.n_users = 1;
  p.samples_per_user = {10};
  CHECK_THROWS_AS(MakeUsers(p, 0), ArgumentError);
  p = HeterogeneityProfile::Uniform(3, 10, Task::kClassification, -1.0, 4);
  CHECK_THROWS_AS(MakeUsers(p, 0), ArgumentError);
  p = HeterogeneityProfile::Uniform(3, 0, Task::kClassification, 1.0, 4);
  CHECK_THROWS_AS(MakeUsers(p, 0), ArgumentError);
  p = HeterogeneityProfile::Uniform(3, 10, Task::kClassification, 1.0, 4);
  p.samples_per_user.pop_back();
  CHECK_THROWS_AS(MakeUsers(p, 0), ArgumentError);
}

TEST_CASE("Regression fit-and-transfer: OLS optima move apart with the shift") {
  for (double shift : {0.0, 5.0}) {
    auto p = HeterogeneityProfile::Uniform(3, 2000, Task::kRegression, shift, 6);
    const auto users = MakeUsers(p, 9);
    std::vector<Eigen::VectorXd> w;
    for (const auto& u : users) w.push_back(Ols(u.train));
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        const double gap = (w[i] - w[j]).norm();
        if (shift == 0.0) {
          CHECK(gap < 0.02);
        } else {
          // Unit directions with |cos| < 0.99 are at least sqrt(0.02) apart.
          CHECK(gap > shift * std::sqrt(0.02) - 0.02);
          CHECK(gap < 2 * shift + 0.02);
        }
      }
    }
    // Transferring user 0's fit to user 1 costs in proportion to the gap.
    const Eigen::VectorXd r = users[1].test.inputs * w[0] - users[1].test.targets;
    const double transfer_mse = r.squaredNorm() / static_cast<double>(r.size());
    if (shift == 0.0) {
      CHECK(transfer_mse < 0.01);
    } else {
      CHECK(transfer_mse > 0.1);
    }
  }
}

TEST_CASE("Classification shift moves class means; shift 0 shares them") {
  for (double shift : {0.0, 5.0}) {
    auto p = HeterogeneityProfile::Uniform(3, 4000, Task::kClassification, shift, 8);
    const auto users = MakeUsers(p, 4);
    const double gap = (ClassMean(users[0].train, 0) - ClassMean(users[1].train, 0)).norm();
    if (shift == 0.0) {
      CHECK(gap < 0.35);
    } else {
      CHECK(gap > 2.0);
    }
    // Means keep their norm near the separation (reduced by label flips).
    const double norm = ClassMean(users[2].train, 1).norm();
    CHECK(norm > 2.2);
    CHECK(norm < 3.3);
  }
}

TEST_CASE("SplitShard folds partition the data") {
  RowMatrix x(10, 1);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) x(i, 0) = y[i] = i;
  const DatasetShard s(x, y, "u");
  for (int fold = 0; fold < 5; ++fold) {
    const auto split = SplitShard(s, fold);
    CHECK(split.train.size() == 8);
    REQUIRE(split.test.size() == 2);
    CHECK(split.test.targets[0] == 2 * fold);
  }
  const auto tiny = SplitShard(s.Subset(std::vector<std::size_t>{3}), 0);
  CHECK(tiny.train.size() == 1);
  CHECK(tiny.test.empty());
}

TEST_CASE("CSV shards round trip") {
  const auto dir = testing::TempDir("csv");
  auto p = HeterogeneityProfile::Uniform(3, 7, Task::kRegression, 1.0, 3);
  std::vector<DatasetShard> shards;
  for (const auto& u : MakeUsers(p, 3)) shards.push_back(u.train);
  WriteShards(dir / "s.csv", shards);
  const auto back = LoadShards(dir / "s.csv");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].inputs == shards[i].inputs);
    CHECK(back[i].targets == shards[i].targets);
    CHECK(back[i].user_id == shards[i].user_id);
  }
}

TEST_CASE("CSV errors carry the offending line") {
  const auto dir = testing::TempDir("csv_errors");
  WriteText(dir / "empty.csv", "");
  CHECK_THROWS_AS(LoadShards(dir / "empty.csv"), SchemaError);
  WriteText(dir / "header.csv", "user,label,x\n");
  CHECK_THROWS_AS(LoadShards(dir / "header.csv"), SchemaError);
  WriteText(dir / "ragged.csv", "user_id,target,f0,f1\na,1,0.5,0.25\nb,0,1.0\n");
  try {
    LoadShards(dir / "ragged.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  WriteText(dir / "number.csv", "user_id,target,f0\na,1,abc\n");
  try {
    LoadShards(dir / "number.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("Dataset helpers") {
  RowMatrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  const DatasetShard s(x, Eigen::Vector3d(0, 1, 0), "u");
  const auto sub = s.Subset(std::vector<std::size_t>{2, 0});
  CHECK(sub.inputs(0, 1) == 6);
  CHECK(sub.targets[0] == 0);
  const std::vector<DatasetShard> parts{s, sub};
  CHECK(Concatenate(parts, "all").size() == 5);
  CHECK_THROWS_AS(DatasetShard(x, Eigen::Vector2d(0, 1), "bad"), DimensionError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace fedring::data
