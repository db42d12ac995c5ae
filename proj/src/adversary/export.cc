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

#include <cmath>
#include <fstream>

#include "fedring/adversary.h"
#include "fedring/errors.h"

namespace fedring::adversary {

bool IsPerfectSquare(std::size_t n) {
  const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n;
}

nlohmann::json ToJson(const AttackResult& result) {
  nlohmann::json j;
  j["label"] = result.dummy_label;
  j["label_extracted"] = result.label_extracted;
  j["iterations_run"] = result.loss_curve.size();
  j["loss_curve"] = result.loss_curve;
  if (std::isnan(result.reconstruction_mse)) {
    j["mse"] = nullptr;
  } else {
    j["mse"] = result.reconstruction_mse;
  }
  j["best_candidate"] = result.best_candidate;
  j["dummy_data"] = std::vector<double>(result.dummy_data.data(),
                                        result.dummy_data.data() + result.dummy_data.size());
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : result.snapshots) snaps.push_back(s.iteration);
  j["snapshot_iterations"] = std::move(snaps);
  return j;
}

void WritePgm(const std::filesystem::path& path, const Eigen::VectorXd& data) {
  const auto n = static_cast<std::size_t>(data.size());
  if (n == 0 || !IsPerfectSquare(n)) {
    throw ShapeError("PGM export needs a perfect-square input dimension");
  }
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  const double lo = data.minCoeff();
  const double hi = data.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << side << ' ' << side << "\n255\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double v = std::round(255.0 * (data[i] - lo) / span);
    out.put(static_cast<char>(static_cast<unsigned char>(v)));
  }
  if (!out) throw ArgumentError("failed writing " + path.string());
}

}  // namespace fedring::adversary
