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
#include <limits>
#include <set>

#include "doctest.h"
#include "fedring/errors.h"
#include "fedring/fixed_point.h"
#include "fedring/param_vector.h"
#include "fedring/rng.h"
#include "test_util.h"

namespace fedring {
namespace {

TEST_SUITE("numeric") {

TEST_CASE("ParamVector arithmetic") {
  const ParamVector a{1.0, -2.0, 3.0};
  const ParamVector b{0.5, 0.5, -1.0};
  CHECK((a + b) == ParamVector{1.5, -1.5, 2.0});
  CHECK((a - b) == ParamVector{0.5, -2.5, 4.0});
  CHECK((2.0 * a) == ParamVector{2.0, -4.0, 6.0});
  CHECK((a / 2.0) == ParamVector{0.5, -1.0, 1.5});
  CHECK(-a == ParamVector{-1.0, 2.0, -3.0});
  CHECK(a.Dot(b) == doctest::Approx(-3.5));
  CHECK(a.NormInf() == 3.0);
  CHECK(a.Norm2() == doctest::Approx(std::sqrt(14.0)));
  CHECK(ParamVector::Zeros(4).dim() == 4);
  CHECK(a.ToStdVector() == std::vector<double>{1.0, -2.0, 3.0});
}

TEST_CASE("ParamVector rejects non-finite values and ragged operands") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ParamVector({1.0, nan}), NonFiniteError);
  CHECK_THROWS_AS(ParamVector({inf}), NonFiniteError);
  ParamVector big{std::numeric_limits<double>::max()};
  CHECK_THROWS_AS(big *= 10.0, NonFiniteError);
  CHECK_THROWS_AS(ParamVector({1.0}) / 0.0, NonFiniteError);
  CHECK_THROWS_AS(ParamVector({1.0, 2.0}) + ParamVector({1.0}), DimensionError);
  CHECK_THROWS_AS(ParamVector({1.0, 2.0}).Dot(ParamVector({1.0})), DimensionError);
}

TEST_CASE("SeededRng is deterministic and streams are independent") {
  SeededRng a(42, "stream");
  SeededRng b(42, "stream");
  SeededRng c(42, "other");
  SeededRng d(43, "stream");
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.NextU64();
    CHECK(x == b.NextU64());
    differs_c |= x != c.NextU64();
    differs_d |= x != d.NextU64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("Derive depends only on the key, not on draws") {
  SeededRng a(7, "root");
  const SeededRng child_before = a.Derive("child");
  for (int i = 0; i < 10; ++i) a.NextU64();
  SeededRng x = child_before;
  SeededRng y = a.Derive("child");
  for (int i = 0; i < 10; ++i) CHECK(x.NextU64() == y.NextU64());
  CHECK(a.counter() == 10);
}

TEST_CASE("Uniform, UniformInt and Normal moments") {
  SeededRng rng(1, "moments");
  const int n = 200000;
  double sum = 0, sum_sq = 0, nsum = 0, nsum_sq = 0;
  std::vector<int> buckets(7, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum_sq += u * u;
    const double z = rng.Normal();
    nsum += z;
    nsum_sq += z * z;
    const auto k = rng.UniformInt(7);
    REQUIRE(k < 7);
    ++buckets[k];
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum_sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
  CHECK(std::abs(nsum / n) < 0.01);
  CHECK(nsum_sq / n == doctest::Approx(1.0).epsilon(0.02));
  double chi2 = 0.0;
  const double expected = n / 7.0;
  for (int c : buckets) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 22.46);  // chi-square 6 dof, p = 0.001
  CHECK_THROWS_AS(rng.UniformInt(0), ArgumentError);
}

TEST_CASE("Permutation is a permutation") {
  SeededRng rng(3, "perm");
  for (std::size_t n : {0u, 1u, 2u, 17u, 500u}) {
    auto p = rng.Permutation(n);
    CHECK(p.size() == n);
    std::set<std::size_t> s(p.begin(), p.end());
    CHECK(s.size() == n);
    if (n) CHECK(*s.rbegin() == n - 1);
  }
}

TEST_CASE("Fixed-point round trip within half a resolution step") {
  const FixedPointCodec codec;
  SeededRng rng(5, "codec");
  for (int i = 0; i < 2000; ++i) {
    const double x = (rng.Uniform() - 0.5) * 2e6;
    const double back = DecodeFixed(EncodeFixed(x, codec), codec);
    CHECK(std::abs(back - x) <= codec.Resolution() / 2);
  }
  CHECK(DecodeFixed(EncodeFixed(0.0, codec), codec) == 0.0);
  CHECK(DecodeFixed(EncodeFixed(-1.5, codec), codec) == -1.5);
  CHECK(EncodeFixed(-1.0, codec) == codec.Modulus() - (mpz_class(1) << 32));
}

TEST_CASE("Fixed-point sums wrap modulo M and decode to the signed sum") {
  const FixedPointCodec codec;
  const mpz_class m = codec.Modulus();
  mpz_class acc = 0;
  double expected = 0.0;
  SeededRng rng(6, "sum");
  for (int i = 0; i < 50; ++i) {
    const double x = (rng.Uniform() - 0.5) * 100;
    expected += x;
    acc = (acc + EncodeFixed(x, codec)) % m;
  }
  CHECK(std::abs(DecodeFixed(acc, codec) - expected) <= 50 * codec.Resolution());
}

TEST_CASE("Fixed-point overflow and headroom") {
  const FixedPointCodec codec;  // 64-bit modulus, 32 fractional bits
  CHECK(codec.MaxMagnitude() == std::ldexp(1.0, 31));
  CHECK_THROWS_AS(EncodeFixed(std::ldexp(1.0, 40), codec), OverflowError);
  CHECK_THROWS_AS(EncodeFixed(-std::ldexp(1.0, 31), codec), OverflowError);
  CHECK_NOTHROW(EncodeFixed(std::ldexp(1.0, 30), codec));
  CHECK_THROWS_AS(EncodeFixed(std::numeric_limits<double>::quiet_NaN(), codec), OverflowError);
  CHECK_NOTHROW(codec.CheckSumHeadroom(4, std::ldexp(1.0, 28)));
  CHECK_THROWS_AS(codec.CheckSumHeadroom(4, std::ldexp(1.0, 29)), OverflowError);
  FixedPointCodec bad;
  bad.scale_bits = 64;
  CHECK_THROWS_AS(bad.Validate(), ArgumentError);
}

TEST_CASE("GaussianVector moments and argument checks") {
  SeededRng rng(8, "gauss");
  const auto v = GaussianVector(20000, 3.0, 150.0, rng);
  const double mean = v.values().mean();
  const double var = (v.values().array() - mean).square().mean();
  CHECK(std::abs(mean - 3.0) < 4 * 150.0 / std::sqrt(20000.0));
  CHECK(std::sqrt(var) == doctest::Approx(150.0).epsilon(0.02));
  CHECK_THROWS_AS(GaussianVector(0, 0.0, 1.0, rng), ArgumentError);
  CHECK_THROWS_AS(GaussianVector(3, 0.0, 0.0, rng), ArgumentError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace fedring
