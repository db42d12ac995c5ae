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

#include "fedring/data_synth.h"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/QR>

#include "fedring/errors.h"
#include "fedring/rng.h"

namespace fedring::data {
namespace {

Eigen::VectorXd GaussianDraw(int dim, SeededRng& rng) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.Normal();
  return v;
}

// Unit directions with pairwise |cos| below 0.99.
std::vector<Eigen::VectorXd> NonParallelDirections(int count, int dim,
                                                   SeededRng& rng) {
  std::vector<Eigen::VectorXd> dirs;
  while (static_cast<int>(dirs.size()) < count) {
    Eigen::VectorXd v = GaussianDraw(dim, rng);
    if (v.norm() == 0.0) continue;
    v.normalize();
    bool ok = true;
    for (const auto& d : dirs) ok = ok && std::abs(d.dot(v)) < 0.99;
    if (ok || dim == 1) dirs.push_back(std::move(v));
  }
  return dirs;
}

Eigen::MatrixXd RandomOrthogonal(int dim, SeededRng& rng) {
  Eigen::MatrixXd g(dim, dim);
  for (int c = 0; c < dim; ++c) g.col(c) = GaussianDraw(dim, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // Fix column signs so the factorization is unique.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  return q;
}

// Rotation by `angle` in every coordinate pair of a random orthonormal basis.
Eigen::MatrixXd UserRotation(int dim, double angle, SeededRng& rng) {
  const Eigen::MatrixXd q = RandomOrthogonal(dim, rng);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(dim, dim);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (int k = 0; k + 1 < dim; k += 2) {
    g(k, k) = c;
    g(k, k + 1) = -s;
    g(k + 1, k) = s;
    g(k + 1, k + 1) = c;
  }
  return q * g * q.transpose();
}

DatasetShard GenerateRegression(const HeterogeneityProfile& p, int samples,
                                const Eigen::VectorXd& optimum,
                                const std::string& user, SeededRng& rng) {
  RowMatrix x(samples, p.feature_dim);
  Eigen::VectorXd y(samples);
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < p.feature_dim; ++j) x(i, j) = rng.Normal();
    y[i] = x.row(i).dot(optimum) + p.label_noise * rng.Normal();
  }
  return DatasetShard(std::move(x), std::move(y), user);
}

DatasetShard GenerateClassification(const HeterogeneityProfile& p, int samples,
                                    const Eigen::MatrixXd& means,
                                    const std::string& user, SeededRng& rng) {
  RowMatrix x(samples, p.feature_dim);
  Eigen::VectorXd y(samples);
  const auto classes = static_cast<std::uint64_t>(p.num_classes);
  for (int i = 0; i < samples; ++i) {
    const auto label = static_cast<int>(rng.UniformInt(classes));
    for (int j = 0; j < p.feature_dim; ++j) {
      x(i, j) = means(label, j) + rng.Normal();
    }
    int observed = label;
    if (rng.Uniform() < p.label_noise) {
      observed = static_cast<int>(
          (static_cast<std::uint64_t>(label) + 1 + rng.UniformInt(classes - 1)) %
          classes);
    }
    y[i] = observed;
  }
  return DatasetShard(std::move(x), std::move(y), user);
}

}  // namespace

std::string_view ToString(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

Task ParseTask(std::string_view s) {
  if (s == "regression") return Task::kRegression;
  if (s == "classification") return Task::kClassification;
  throw ArgumentError("unknown task '" + std::string(s) + "'");
}

HeterogeneityProfile HeterogeneityProfile::Uniform(int n_users, int samples,
                                                   Task task, double shift,
                                                   int feature_dim) {
  HeterogeneityProfile p;
  p.n_users = n_users;
  p.samples_per_user.assign(static_cast<std::size_t>(std::max(n_users, 0)),
                            samples);
  p.task = task;
  p.shift_magnitude = shift;
  p.feature_dim = feature_dim;
  return p;
}

void HeterogeneityProfile::Validate() const {
  if (n_users < 2) throw ArgumentError("profile needs at least 2 users");
  if (static_cast<int>(samples_per_user.size()) != n_users) {
    throw ArgumentError("samples_per_user must list one count per user");
  }
  for (int s : samples_per_user) {
    if (s < 1) throw ArgumentError("every user needs at least one sample");
  }
  if (feature_dim < 1) throw ArgumentError("feature_dim must be positive");
  if (!(shift_magnitude >= 0.0) || !std::isfinite(shift_magnitude)) {
    throw ArgumentError("shift_magnitude must be finite and non-negative");
  }
  if (!(label_noise >= 0.0) || !std::isfinite(label_noise)) {
    throw ArgumentError("label_noise must be finite and non-negative");
  }
  if (task == Task::kClassification) {
    if (num_classes < 2) throw ArgumentError("need at least 2 classes");
    if (label_noise > 1.0) throw ArgumentError("flip probability above 1");
    if (!(class_separation > 0.0)) {
      throw ArgumentError("class_separation must be positive");
    }
  }
  if (test_fold < 0 || test_fold > 4) {
    throw ArgumentError("test_fold must be in [0, 4]");
  }
}

UserData SplitShard(const DatasetShard& shard, int test_fold) {
  const std::size_t n = shard.size();
  const std::size_t n_test =
      n - std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n))));
  // The held-out block is the test_fold-th fifth, clamped to the end.
  const std::size_t start =
      std::min(n - n_test, static_cast<std::size_t>(test_fold) * n / 5);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < n; ++i) {
    (i >= start && i < start + n_test ? test_rows : train_rows).push_back(i);
  }
  return {shard.Subset(train_rows), shard.Subset(test_rows)};
}

std::vector<UserData> MakeUsers(const HeterogeneityProfile& profile,
                                std::uint64_t seed) {
  profile.Validate();
  SeededRng root(seed, "data");
  SeededRng shared = root.Derive("shared");
  const int d = profile.feature_dim;

  std::vector<UserData> users;
  if (profile.task == Task::kRegression) {
    const Eigen::VectorXd optimum = GaussianDraw(d, shared);
    const auto dirs = NonParallelDirections(profile.n_users, d, shared);
    for (int u = 0; u < profile.n_users; ++u) {
      SeededRng rng = root.Derive("user/" + std::to_string(u));
      const Eigen::VectorXd w = optimum + profile.shift_magnitude * dirs[u];
      users.push_back(SplitShard(
          GenerateRegression(profile, profile.samples_per_user[u], w,
                             std::to_string(u), rng),
          profile.test_fold));
    }
    return users;
  }

  Eigen::MatrixXd means(profile.num_classes, d);
  for (int c = 0; c < profile.num_classes; ++c) {
    Eigen::VectorXd m = GaussianDraw(d, shared);
    means.row(c) = profile.class_separation * m.normalized().transpose();
  }
  // |R mu - mu| = 2 sin(angle / 2) |mu| for the pairwise rotation.
  const double ratio =
      std::min(1.0, profile.shift_magnitude / (2.0 * profile.class_separation));
  const double angle = 2.0 * std::asin(ratio);
  for (int u = 0; u < profile.n_users; ++u) {
    SeededRng rng = root.Derive("user/" + std::to_string(u));
    Eigen::MatrixXd user_means = means;
    if (angle > 0.0) {
      SeededRng rot = root.Derive("rotation/" + std::to_string(u));
      user_means = means * UserRotation(d, angle, rot).transpose();
    }
    users.push_back(SplitShard(
        GenerateClassification(profile, profile.samples_per_user[u], user_means,
                               std::to_string(u), rng),
        profile.test_fold));
  }
  return users;
}

}  // namespace fedring::data
