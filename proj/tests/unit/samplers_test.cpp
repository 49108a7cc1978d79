/*
 * Copyright 2026 The Blindspot Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <bitset>
#include <cmath>
#include <numeric>
#include <set>

#include "blindspot/errors.hpp"
#include "blindspot/samplers.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace blindspot {
namespace {

using testing::make_set;

// Digit reversal carried out in integers, divided once at the end.
double reversed_fraction(std::uint64_t index, std::uint64_t base) {
  std::uint64_t rev = 0, denom = 1;
  for (; index > 0; index /= base) {
    rev = rev * base + index % base;
    denom *= base;
  }
  return static_cast<double>(rev) / static_cast<double>(denom);
}

TEST(Halton, HandExamples) {
  const auto p1 = halton_at(1, 2);
  EXPECT_DOUBLE_EQ(p1[0], 0.5);
  EXPECT_DOUBLE_EQ(p1[1], 1.0 / 3.0);
  const auto p3 = halton_at(3, 2);
  EXPECT_DOUBLE_EQ(p3[0], 0.75);
  EXPECT_DOUBLE_EQ(p3[1], 1.0 / 9.0);
  EXPECT_DOUBLE_EQ(halton_at(4, 1)[0], 0.125);
}

TEST(Halton, IndexZeroRejected) { EXPECT_THROW(halton_at(0, 2), ConfigError); }

TEST(Halton, MatchesIntegerDigitReversal) {
  const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (std::uint64_t i = 1; i < 5000; i += 7) {
    const auto p = halton_at(i, 8);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(p[j], reversed_fraction(i, primes[j]), 1e-15);
  }
}

TEST(Halton, BaseTwoIsBitReversal) {
  for (std::uint64_t i = 1; i < 1024; ++i) {
    std::bitset<10> bits(i), rev;
    for (int b = 0; b < 10; ++b) rev[9 - b] = bits[b];
    EXPECT_EQ(radical_inverse(i, 2), static_cast<double>(rev.to_ulong()) / 1024.0);
  }
}

TEST(HaltonProperty, StatelessUnderReordering) {
  testing::Gen gen(5);
  std::vector<std::uint64_t> idx(200);
  std::iota(idx.begin(), idx.end(), 1);
  std::vector<ModificationPoint> forward;
  for (auto i : idx) forward.push_back(halton_at(i, 3));
  std::shuffle(idx.begin(), idx.end(), gen.engine());
  for (auto i : idx) EXPECT_EQ(halton_at(i, 3), forward[i - 1]);
}

TEST(Sampler, HaltonStreamHonoursSkip) {
  SamplerSpec spec;
  spec.kind = SamplerKind::kHalton;
  spec.skip = 10;
  const Sampler s(spec, 2);
  for (std::uint64_t t = 0; t < 50; ++t) EXPECT_EQ(s.at(t), halton_at(t + 11, 2));
  EXPECT_FALSE(s.size().has_value());
}

TEST(Lattice, HandExample) {
  const auto x = lattice_points(5, 2, 3);
  const double expect[5][2] = {{0, 0}, {0.2, 0.6}, {0.4, 0.2}, {0.6, 0.8}, {0.8, 0.4}};
  ASSERT_EQ(x.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(x[i][0], expect[i][0], 1e-15);
    EXPECT_NEAR(x[i][1], expect[i][1], 1e-15);
  }
}

TEST(Lattice, OneDimensionalIsEquispaced) {
  const auto x = lattice_points(17, 1, 3);
  for (int i = 0; i < 17; ++i) EXPECT_DOUBLE_EQ(x[i][0], i / 17.0);
}

TEST(Lattice, NotCoprime) {
  EXPECT_THROW(lattice_points(6, 2, 3), NotCoprime);
  SamplerSpec spec;
  spec.kind = SamplerKind::kLattice;
  spec.m_points = 10;
  spec.korobov_a = 4;
  EXPECT_THROW(spec.validate(3), NotCoprime);
  EXPECT_NO_THROW(spec.validate(1));  // z = (1) needs no generator
}

TEST(LatticeProperty, EachAxisIsAPermutation) {
  testing::Gen gen(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = static_cast<std::uint64_t>(gen.integer(2, 200));
    std::uint64_t a = static_cast<std::uint64_t>(gen.integer(1, 500));
    while (std::gcd(a, m) != 1) ++a;
    const auto n = static_cast<std::size_t>(gen.integer(1, 5));
    const auto x = lattice_points(m, n, a);
    ASSERT_EQ(x.size(), m);
    for (std::size_t j = 0; j < n; ++j) {
      std::set<std::uint64_t> seen;
      for (const auto& p : x) {
        const double scaled = p[j] * m;
        const auto k = static_cast<std::uint64_t>(std::llround(scaled));
        EXPECT_NEAR(scaled, static_cast<double>(k), 1e-9);
        seen.insert(k);
      }
      EXPECT_EQ(seen.size(), m) << "m=" << m << " a=" << a << " axis " << j;
    }
  }
}

TEST(Sampler, LatticeStreamAndSize) {
  SamplerSpec spec;
  spec.kind = SamplerKind::kLattice;
  spec.m_points = 5;
  const Sampler s(spec, 2);
  EXPECT_EQ(s.size(), 5u);
  const auto x = lattice_points(5, 2, 3);
  for (std::uint64_t t = 0; t < 5; ++t) EXPECT_EQ(s.at(t), x[t]);
}

TEST(Uniform, SplitMixReferenceOutputs) {
  // Reference stream of the SplitMix64 generator seeded with 0.
  EXPECT_EQ(splitmix64_at(0, 0), 0xe220a8397b1dcdafull);
  EXPECT_EQ(splitmix64_at(0, 1), 0x6e789e6aa1b965f4ull);
  EXPECT_EQ(splitmix64_at(0, 2), 0x06c45d188009454full);
}

TEST(Uniform, UnitIntervalEndpoints) {
  EXPECT_EQ(to_unit_double(0), 0.0);
  EXPECT_LT(to_unit_double(~0ull), 1.0);
  EXPECT_EQ(to_unit_double(~0ull), 1.0 - 0x1.0p-53);
}

TEST(Uniform, CounterBasedAndSeeded) {
  const auto a = uniform_points(42, 100, 3);
  const auto b = uniform_points(42, 100, 3);
  const auto c = uniform_points(43, 100, 3);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, c.points);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(uniform_at(42, i, 3), a[i]);
    for (double v : a[i].coords()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Discrepancy, HandExamples) {
  const auto x = make_set(2, {{0.5, 0.5}});
  EXPECT_DOUBLE_EQ(discrepancy(std::vector<double>{1, 1}, x), 0.0);
  EXPECT_DOUBLE_EQ(discrepancy(std::vector<double>{0.5, 0.5}, x), 0.25);
  const double eps = 1e-3;
  EXPECT_DOUBLE_EQ(discrepancy(std::vector<double>{eps, eps}, x), eps * eps);
}

TEST(DiscrepancyProperty, FullBoxIsZero) {
  testing::Gen gen(3);
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(gen.integer(1, 4));
    const auto x = gen.points(static_cast<std::size_t>(gen.integer(1, 40)), n);
    EXPECT_EQ(discrepancy(std::vector<double>(n, 1.0), x), 0.0);
  }
}

TEST(StarDiscrepancy, HandValues) {
  EXPECT_EQ(star_discrepancy(make_set(2, {{0.5, 0.5}})), 0.75);
  EXPECT_EQ(star_discrepancy(make_set(1, {{0.5}})), 0.5);
}

TEST(StarDiscrepancy, MidpointRule) {
  for (int m : {1, 2, 3, 7, 10, 64, 333}) {
    PointSet x{1, {}};
    for (int i = 0; i < m; ++i) {
      x.points.push_back(ModificationPoint::unchecked({static_cast<double>(i) / m + 0.5 / m}));
    }
    EXPECT_NEAR(star_discrepancy(x), 0.5 / m, 1e-15) << "m=" << m;
  }
}

TEST(StarDiscrepancy, LimitsAndEstimateFallback) {
  testing::Gen gen(8);
  EXPECT_THROW(star_discrepancy(gen.points(10, 4)), TooLarge);
  EXPECT_THROW(star_discrepancy(gen.points(kExactStarMaxPoints + 1, 1)), TooLarge);

  const auto small = gen.points(30, 2);
  const auto exact = star_discrepancy_estimate(small);
  EXPECT_TRUE(exact.exact);
  EXPECT_EQ(exact.value, star_discrepancy(small));

  const auto x4 = gen.points(7, 4);
  const auto approx = star_discrepancy_estimate(x4);
  EXPECT_FALSE(approx.exact);
  EXPECT_LE(approx.value, oracle::brute_star_discrepancy(x4) + 1e-12);
  EXPECT_GT(approx.value, 0.0);
}

TEST(StarDiscrepancyProperty, MatchesBruteForceEnumeration) {
  testing::Gen gen(2024);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(gen.integer(1, 3));
    const auto m = static_cast<std::size_t>(gen.integer(1, n == 3 ? 12 : 30));
    // Coarse grids force ties across points and coordinates on both sides.
    const auto x = gen.coin() ? gen.points(m, n) : gen.grid_points(m, n, 6);
    EXPECT_NEAR(star_discrepancy(x), oracle::brute_star_discrepancy(x), 1e-12)
        << "trial " << t << " n=" << n << " m=" << m;
  }
}

TEST(StarDiscrepancyProperty, BoundedBelowByAnyGridCorner) {
  testing::Gen gen(99);
  for (int t = 0; t < 30; ++t) {
    const auto x = gen.points(static_cast<std::size_t>(gen.integer(1, 20)), 2);
    const double d = star_discrepancy(x);
    const double g = oracle::grid_star_discrepancy(x, 64);
    EXPECT_GE(d, g - 1e-12);
    EXPECT_LE(d, g + 2.0 / 64 + 1e-12);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(StarDiscrepancyProperty, ReorderingAndDuplicates) {
  testing::Gen gen(31);
  for (int t = 0; t < 50; ++t) {
    const auto n = static_cast<std::size_t>(gen.integer(1, 3));
    auto x = gen.grid_points(static_cast<std::size_t>(gen.integer(2, 25)), n, 8);
    const double d = star_discrepancy(x);
    std::shuffle(x.points.begin(), x.points.end(), gen.engine());
    EXPECT_EQ(star_discrepancy(x), d);
    x.points.push_back(x.points[static_cast<std::size_t>(gen.integer(0, x.size() - 1))]);
    const PointSet fresh{x.dim, x.points};
    EXPECT_EQ(star_discrepancy(x), star_discrepancy(fresh));
    EXPECT_NEAR(star_discrepancy(x), oracle::brute_star_discrepancy(x), 1e-12);
  }
}

TEST(Coverage, HandExamples) {
  EXPECT_EQ(grid_coverage(make_set(2, {{0.3, 0.9}}), 1), 1.0);
  EXPECT_DOUBLE_EQ(grid_coverage(lattice_points(5, 2, 3), 5), 0.2);
  EXPECT_EQ(grid_coverage(PointSet{2, {}}, 4), 0.0);
  EXPECT_THROW(grid_coverage(PointSet{2, {}}, 1025), TooLarge);
  EXPECT_NO_THROW(grid_coverage(PointSet{2, {}}, 1024));
}

TEST(Coverage, UpperEdgeBelongsToLastCell) {
  EXPECT_DOUBLE_EQ(grid_coverage(make_set(1, {{1.0}}), 4), 0.25);
  CoverageGrid grid(1, 4);
  grid.add(ModificationPoint::unchecked({1.0}));
  grid.add(ModificationPoint::unchecked({0.99}));
  EXPECT_EQ(grid.occupied(), 1u);
}

TEST(CoverageProperty, IncrementalMatchesBatch) {
  testing::Gen gen(77);
  for (int t = 0; t < 40; ++t) {
    const auto n = static_cast<std::size_t>(gen.integer(1, 3));
    const auto g = static_cast<std::size_t>(gen.integer(1, 9));
    const auto x = gen.points(static_cast<std::size_t>(gen.integer(0, 60)), n);
    CoverageGrid grid(n, g);
    std::set<std::vector<std::size_t>> cells;
    for (const auto& p : x) {
      grid.add(p);
      std::vector<std::size_t> cell;
      for (double v : p.coords()) cell.push_back(std::min<std::size_t>(v * g, g - 1));
      cells.insert(cell);
    }
    const double expect = static_cast<double>(cells.size()) / std::pow(g, n);
    EXPECT_DOUBLE_EQ(grid.coverage(), expect);
    EXPECT_DOUBLE_EQ(grid_coverage(x, g), expect);
  }
}

}  // namespace
}  // namespace blindspot
