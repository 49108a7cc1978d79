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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "blindspot/modspace.hpp"

namespace blindspot {

/// Ordered points of [0,1]^dim.
struct PointSet {
  std::size_t dim = 0;
  std::vector<ModificationPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const ModificationPoint& operator[](std::size_t i) const { return points[i]; }
  auto begin() const { return points.begin(); }
  auto end() const { return points.end(); }
};

enum class SamplerKind { kUniform, kHalton, kLattice };

std::string_view sampler_kind_name(SamplerKind k);
SamplerKind parse_sampler_kind(std::string_view name);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::kHalton;
  std::uint64_t seed = 0;       // uniform
  std::uint64_t m_points = 0;   // lattice
  std::uint64_t korobov_a = 3;  // lattice, n >= 2
  std::uint64_t skip = 0;       // halton

  /// Throws ConfigError / NotCoprime.
  void validate(std::size_t n) const;
};

/// Identifier of the pseudo-random generator behind the uniform sampler,
/// recorded with every campaign.
inline constexpr std::string_view kUniformPrngId = "splitmix64";

/// SplitMix64 finalizer applied to a counter: the k-th output of the
/// SplitMix64 stream started at `seed`.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k);
/// Top 53 bits mapped to [0,1).
double to_unit_double(std::uint64_t bits);

/// Van der Corput radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, std::uint32_t base);

/// Halton point for index >= 1; coordinate j uses the (j+1)-th prime.
ModificationPoint halton_at(std::uint64_t index, std::size_t n);

/// Korobov rank-1 lattice: point i = frac(i * z / m), z = (1, a, a^2, ...) mod m.
/// Throws NotCoprime when gcd(a, m) != 1 (n >= 2), ConfigError when m < 2.
PointSet lattice_points(std::uint64_t m_points, std::size_t n, std::uint64_t korobov_a);

/// Uniform point for trial `index` (0-based); stateless in the index.
ModificationPoint uniform_at(std::uint64_t seed, std::uint64_t index, std::size_t n);
PointSet uniform_points(std::uint64_t seed, std::size_t count, std::size_t n);

/// Index-addressable point stream used by campaigns. Trial i always maps to
/// the same point, so campaigns can resume or run out of order.
class Sampler {
 public:
  Sampler(SamplerSpec spec, std::size_t n);

  ModificationPoint at(std::uint64_t trial) const;
  /// Number of points, or nullopt for unbounded sequences.
  std::optional<std::uint64_t> size() const;
  const SamplerSpec& spec() const { return spec_; }
  std::size_t dim() const { return n_; }

 private:
  SamplerSpec spec_;
  std::size_t n_;
  std::vector<std::uint64_t> lattice_z_;
};

/// |#([0,q) ∩ X)/m − vol([0,q))|. Zero for an empty X only if vol is zero.
double discrepancy(std::span<const double> q, const PointSet& x);

/// Exact limits of star_discrepancy.
inline constexpr std::size_t kExactStarMaxDim = 3;
inline constexpr std::size_t kExactStarMaxPoints = 4096;

/// Exact star discrepancy: supremum over origin-anchored boxes, including
/// limits from above. Throws TooLarge beyond kExactStarMaxDim or
/// kExactStarMaxPoints. Returns 0 for an empty set.
double star_discrepancy(const PointSet& x);

struct StarDiscrepancyEstimate {
  double value = 0.0;
  bool exact = false;
};

/// Exact when within limits, otherwise a lower bound evaluated on a subset
/// of the critical corners (at most ~2^20 of them).
StarDiscrepancyEstimate star_discrepancy_estimate(const PointSet& x);

/// Fraction of the g^n equal cells holding at least one point. Throws
/// TooLarge when g^n > 2^20.
double grid_coverage(const PointSet& x, std::size_t bins_per_dim);

/// Incremental form of grid_coverage for campaigns: add points one at a time.
class CoverageGrid {
 public:
  CoverageGrid(std::size_t n, std::size_t bins_per_dim);
  void add(const ModificationPoint& p);
  double coverage() const;
  std::size_t occupied() const { return occupied_; }

 private:
  std::size_t n_;
  std::size_t bins_;
  std::vector<bool> cells_;
  std::size_t occupied_ = 0;
};

}  // namespace blindspot
