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

#ifndef FEDRING_RNG_H_
#define FEDRING_RNG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fedring {

// Counter-based deterministic generator keyed by (seed, stream label).
//
// Output i of a stream is a pure function of the stream key and i, so draws
// are identical across runs and platforms regardless of how work is
// scheduled. Child streams are derived from the key only and do not consume
// draws from the parent. Distribution sampling is implemented here rather
// than through <random> distributions, whose algorithms are unspecified.
//
// A SeededRng is single-owner state; do not share one across threads.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::string_view stream_id);

  SeededRng Derive(std::string_view child) const;

  const std::string& stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t UniformInt(std::uint64_t bound);
  // Standard normal via Box-Muller (one output per pair of uniforms).
  double Normal();
  double Normal(double mean, double sigma) { return mean + sigma * Normal(); }

  // Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> Permutation(std::size_t n);
  void Shuffle(std::vector<std::size_t>& items);

 private:
  SeededRng(std::uint64_t key, std::string stream_id, int);

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::string stream_id_;
};

// 64-bit FNV-1a, used for stream labels and fingerprints.
std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace fedring

#endif  // FEDRING_RNG_H_
