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

#include "blindspot/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blindspot/errors.hpp"

namespace blindspot {
namespace {

constexpr std::uint32_t kPrimes[ModificationSpace::kMaxDims] = {2, 3, 5, 7, 11, 13, 17, 19};
constexpr std::size_t kMaxGridCells = std::size_t{1} << 20;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::vector<std::uint64_t> korobov_vector(std::uint64_t m, std::size_t n, std::uint64_t a) {
  std::vector<std::uint64_t> z(n);
  std::uint64_t v = 1 % m;
  for (std::size_t j = 0; j < n; ++j) {
    z[j] = v;
    v = mulmod(v, a % m, m);
  }
  return z;
}

ModificationPoint lattice_point(std::uint64_t i, std::uint64_t m,
                                const std::vector<std::uint64_t>& z) {
  std::vector<double> c(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    c[j] = static_cast<double>(mulmod(i % m, z[j], m)) / static_cast<double>(m);
  }
  return ModificationPoint::unchecked(std::move(c));
}

// Counts toward the two one-sided discrepancy terms at corner q:
// open counts points strictly inside [0,q), closed counts points in [0,q].
double corner_value(double vol, std::size_t open, std::size_t closed, double m) {
  return std::max(vol - open / m, closed / m - vol);
}

// Recursive enumeration of critical corners. `open` and `closed` hold
// indices of points satisfying the strict / non-strict constraints on the
// dimensions fixed so far, kept in ascending order of the last coordinate.
struct StarSearch {
  const PointSet& x;
  std::size_t n;
  double m;
  std::vector<std::vector<double>> candidates;  // per dimension, sorted, ends at 1
  double best = 0.0;

  void run(std::size_t dim, double vol, const std::vector<std::size_t>& open,
           const std::vector<std::size_t>& closed) {
    const auto& cand = candidates[dim];
    if (dim + 1 == n) {
      // Two-pointer sweep over the last dimension.
      std::size_t io = 0, ic = 0;
      for (double q : cand) {
        while (io < open.size() && x[open[io]][dim] < q) ++io;
        while (ic < closed.size() && x[closed[ic]][dim] <= q) ++ic;
        best = std::max(best, corner_value(vol * q, io, ic, m));
      }
      return;
    }
    std::vector<std::size_t> next_open, next_closed;
    next_open.reserve(open.size());
    next_closed.reserve(closed.size());
    for (double q : cand) {
      next_open.clear();
      next_closed.clear();
      for (std::size_t i : open) {
        if (x[i][dim] < q) next_open.push_back(i);
      }
      for (std::size_t i : closed) {
        if (x[i][dim] <= q) next_closed.push_back(i);
      }
      run(dim + 1, vol * q, next_open, next_closed);
    }
  }
};

std::vector<double> sorted_candidates(const PointSet& x, std::size_t dim) {
  std::vector<double> v;
  v.reserve(x.size() + 1);
  for (const auto& p : x) v.push_back(p[dim]);
  v.push_back(1.0);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double star_search(const PointSet& x, std::vector<std::vector<double>> candidates) {
  const std::size_t n = x.dim;
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a][n - 1] < x[b][n - 1]; });
  StarSearch search{x, n, static_cast<double>(x.size()), std::move(candidates)};
  search.run(0, 1.0, order, order);
  return search.best;
}

}  // namespace

std::string_view sampler_kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::kUniform: return "uniform";
    case SamplerKind::kHalton: return "halton";
    case SamplerKind::kLattice: return "lattice";
  }
  return "?";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto k : {SamplerKind::kUniform, SamplerKind::kHalton, SamplerKind::kLattice}) {
    if (sampler_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown sampler kind '" + std::string(name) + "'");
}

void SamplerSpec::validate(std::size_t n) const {
  if (kind != SamplerKind::kLattice) return;
  if (m_points < 2) throw ConfigError("lattice sampler needs m_points >= 2");
  if (n >= 2) {
    if (korobov_a == 0) throw ConfigError("lattice sampler needs korobov_a >= 1");
    if (std::gcd(korobov_a, m_points) != 1) {
      throw NotCoprime("korobov_a = " + std::to_string(korobov_a) + " is not coprime with m = " +
                       std::to_string(m_points));
    }
  }
}

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double to_unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double result = 0.0;
  double scale = 1.0 / base;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= base;
  }
  return result;
}

ModificationPoint halton_at(std::uint64_t index, std::size_t n) {
  if (index == 0) throw ConfigError("Halton indices start at 1");
  if (n == 0 || n > ModificationSpace::kMaxDims) throw ConfigError("Halton dimension must be 1..8");
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = radical_inverse(index, kPrimes[j]);
  return ModificationPoint::unchecked(std::move(c));
}

PointSet lattice_points(std::uint64_t m_points, std::size_t n, std::uint64_t korobov_a) {
  SamplerSpec{SamplerKind::kLattice, 0, m_points, korobov_a, 0}.validate(n);
  const auto z = korobov_vector(m_points, n, korobov_a);
  PointSet set{n, {}};
  set.points.reserve(m_points);
  for (std::uint64_t i = 0; i < m_points; ++i) set.points.push_back(lattice_point(i, m_points, z));
  return set;
}

ModificationPoint uniform_at(std::uint64_t seed, std::uint64_t index, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = to_unit_double(splitmix64_at(seed, index * n + j));
  return ModificationPoint::unchecked(std::move(c));
}

PointSet uniform_points(std::uint64_t seed, std::size_t count, std::size_t n) {
  PointSet set{n, {}};
  set.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) set.points.push_back(uniform_at(seed, i, n));
  return set;
}

Sampler::Sampler(SamplerSpec spec, std::size_t n) : spec_(spec), n_(n) {
  spec_.validate(n);
  if (spec_.kind == SamplerKind::kLattice) {
    lattice_z_ = korobov_vector(spec_.m_points, n_, spec_.korobov_a);
  }
}

ModificationPoint Sampler::at(std::uint64_t trial) const {
  switch (spec_.kind) {
    case SamplerKind::kUniform: return uniform_at(spec_.seed, trial, n_);
    case SamplerKind::kHalton: return halton_at(trial + 1 + spec_.skip, n_);
    case SamplerKind::kLattice: return lattice_point(trial, spec_.m_points, lattice_z_);
  }
  return {};
}

std::optional<std::uint64_t> Sampler::size() const {
  if (spec_.kind == SamplerKind::kLattice) return spec_.m_points;
  return std::nullopt;
}

double discrepancy(std::span<const double> q, const PointSet& x) {
  double vol = 1.0;
  for (double v : q) vol *= v;
  if (x.empty()) return vol;
  std::size_t count = 0;
  for (const auto& p : x) {
    bool inside = true;
    for (std::size_t j = 0; j < q.size() && inside; ++j) inside = p[j] < q[j];
    count += inside;
  }
  return std::fabs(static_cast<double>(count) / x.size() - vol);
}

double star_discrepancy(const PointSet& x) {
  if (x.dim > kExactStarMaxDim) {
    throw TooLarge("exact star discrepancy supports n <= 3, got n = " + std::to_string(x.dim));
  }
  if (x.size() > kExactStarMaxPoints) {
    throw TooLarge("exact star discrepancy supports m <= 4096, got m = " +
                   std::to_string(x.size()));
  }
  if (x.empty()) return 0.0;
  std::vector<std::vector<double>> candidates;
  for (std::size_t j = 0; j < x.dim; ++j) candidates.push_back(sorted_candidates(x, j));
  return star_search(x, std::move(candidates));
}

StarDiscrepancyEstimate star_discrepancy_estimate(const PointSet& x) {
  if (x.dim <= kExactStarMaxDim && x.size() <= kExactStarMaxPoints) {
    return {star_discrepancy(x), true};
  }
  if (x.empty()) return {0.0, true};
  // Evenly thinned candidate coordinates, at most ~2^20 corners in total.
  const auto per_dim = static_cast<std::size_t>(
      std::max(2.0, std::floor(std::pow(2.0, 20.0 / static_cast<double>(x.dim)))));
  std::vector<std::vector<double>> candidates;
  for (std::size_t j = 0; j < x.dim; ++j) {
    auto all = sorted_candidates(x, j);
    if (all.size() > per_dim) {
      std::vector<double> thin;
      for (std::size_t k = 0; k < per_dim; ++k) {
        thin.push_back(all[k * (all.size() - 1) / (per_dim - 1)]);
      }
      thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
      all = std::move(thin);
    }
    candidates.push_back(std::move(all));
  }
  return {star_search(x, std::move(candidates)), false};
}

CoverageGrid::CoverageGrid(std::size_t n, std::size_t bins_per_dim) : n_(n), bins_(bins_per_dim) {
  if (bins_ == 0) throw ConfigError("coverage needs at least one bin per dimension");
  std::size_t cells = 1;
  for (std::size_t j = 0; j < n_; ++j) {
    if (cells > kMaxGridCells / bins_) {
      throw TooLarge("coverage grid exceeds 2^20 cells");
    }
    cells *= bins_;
  }
  cells_.assign(cells, false);
}

void CoverageGrid::add(const ModificationPoint& p) {
  std::size_t cell = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    const auto b = std::min(static_cast<std::size_t>(p[j] * static_cast<double>(bins_)), bins_ - 1);
    cell = cell * bins_ + b;
  }
  if (!cells_[cell]) {
    cells_[cell] = true;
    ++occupied_;
  }
}

double CoverageGrid::coverage() const {
  return static_cast<double>(occupied_) / static_cast<double>(cells_.size());
}

double grid_coverage(const PointSet& x, std::size_t bins_per_dim) {
  CoverageGrid grid(x.dim, bins_per_dim);
  for (const auto& p : x) grid.add(p);
  return grid.coverage();
}

}  // namespace blindspot
