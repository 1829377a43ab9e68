#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bsilp/errors.hpp"
#include "bsilp/lower_level.hpp"
#include "bsilp/model.hpp"

namespace bsilp {

// Per coordinate, the sorted distinct breakpoints generated by the candidate
// point images. Consecutive breakpoints delimit the half-open cells on which
// the follower's feasible set is constant.
struct ThresholdGrid {
  std::vector<std::vector<Rational>> levels;

  std::size_t dim() const { return levels.size(); }

  // Index of the interval [levels[p], levels[p+1]) containing v, or nullopt
  // when v lies below every breakpoint. The top interval is unbounded.
  std::optional<std::size_t> interval_index(std::size_t coord, const Rational& v) const {
    const auto& lv = levels[coord];
    auto it = std::upper_bound(lv.begin(), lv.end(), v);
    if (it == lv.begin()) return std::nullopt;
    return static_cast<std::size_t>(it - lv.begin()) - 1;
  }

  bool is_breakpoint(std::size_t coord, const Rational& v) const {
    const auto& lv = levels[coord];
    return std::binary_search(lv.begin(), lv.end(), v);
  }
};

// Axis-aligned product of half-open intervals [lower_j, upper_j); the top
// interval of each coordinate extends to +inf.
struct Cell {
  RationalVector lower;
  std::vector<ExtendedValue> upper;

  bool contains(const RationalVector& t) const {
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (t[j] < lower[j]) return false;
      if (upper[j].is_finite() && t[j] >= upper[j].value()) return false;
    }
    return true;
  }
};

// All cells sharing one feasible candidate set, with the constant values
// both value functions take there.
struct Region {
  std::vector<std::size_t> active;           // feasible point indices, sorted
  std::vector<std::size_t> follower_argmin;  // subset minimizing the follower cost
  std::size_t choice = 0;                    // optimistic selection within the argmin
  Rational follower_value;
  Rational leader_value;
  std::vector<std::size_t> cells;            // flat cell ids, ascending
};

namespace detail {

using Mask = std::vector<std::uint64_t>;

inline bool mask_any(const Mask& m) {
  for (auto w : m)
    if (w) return true;
  return false;
}

inline void mask_and(Mask& dst, const Mask& src) {
  for (std::size_t w = 0; w < dst.size(); ++w) dst[w] &= src[w];
}

inline std::vector<std::size_t> mask_indices(const Mask& m) {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < m.size(); ++w) {
    std::uint64_t bits = m[w];
    while (bits) {
      unsigned bit = static_cast<unsigned>(__builtin_ctzll(bits));
      out.push_back(w * 64 + bit);
      bits &= bits - 1;
    }
  }
  return out;
}

}  // namespace detail

// The finite decomposition of the follower-feasible parameter range into
// constant-value regions. Immutable once built; queries are lock-free.
class RegionPartition {
 public:
  const ThresholdGrid& grid() const { return grid_; }
  const std::vector<Region>& regions() const { return regions_; }
  std::size_t cell_count() const { return cell_region_.size(); }

  // Region id owning this grid cell, or -1 when its feasible set is empty.
  std::int32_t region_of_cell(std::size_t flat) const {
    return cell_region_[flat];
  }

  Cell cell(std::size_t flat) const {
    const std::size_t dim = grid_.dim();
    Cell c;
    c.lower.resize(dim);
    c.upper.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const auto& lv = grid_.levels[j];
      std::size_t p = (flat / strides_[j]) % lv.size();
      c.lower[j] = lv[p];
      c.upper[j] = p + 1 < lv.size() ? ExtendedValue(lv[p + 1])
                                     : ExtendedValue::infinity();
    }
    return c;
  }

  std::vector<Cell> cells_of(const Region& region) const {
    std::vector<Cell> out;
    out.reserve(region.cells.size());
    for (std::size_t flat : region.cells) out.push_back(cell(flat));
    return out;
  }

  std::optional<std::size_t> flat_index_of(const RationalVector& t) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < grid_.dim(); ++j) {
      auto p = grid_.interval_index(j, t[j]);
      if (!p) return std::nullopt;
      flat += *p * strides_[j];
    }
    return flat;
  }

  std::optional<std::size_t> region_index_at(const RationalVector& t) const {
    if (t.size() != grid_.dim())
      throw ValidationError("parameter dimension mismatch");
    auto flat = flat_index_of(t);
    if (!flat) return std::nullopt;
    std::int32_t id = cell_region_[*flat];
    if (id < 0) return std::nullopt;
    return static_cast<std::size_t>(id);
  }

  // Piecewise-constant evaluation of the leader's reduced value. Mirrors the
  // direct argmin scan exactly; +inf outside the feasible domain.
  ExtendedValue leader_value_at(const RationalVector& t) const {
    auto r = region_index_at(t);
    return r ? ExtendedValue(regions_[*r].leader_value) : ExtendedValue::infinity();
  }

  ExtendedValue follower_value_at(const RationalVector& t) const {
    auto r = region_index_at(t);
    return r ? ExtendedValue(regions_[*r].follower_value) : ExtendedValue::infinity();
  }

  // True iff some candidate point is feasible at t.
  bool domain_contains(const RationalVector& t) const {
    return region_index_at(t).has_value();
  }

  friend RegionPartition build_partition(const FollowerProblem& fp,
                                         std::size_t cell_limit);

 private:
  ThresholdGrid grid_;
  std::vector<std::size_t> strides_;
  std::vector<std::int32_t> cell_region_;
  std::vector<Region> regions_;
};

// Enumerates every grid cell, reads off its feasible candidate set at the
// lower corner and groups cells by that set. Only realized sets are kept, so
// dominated combinations never materialize. Throws ResourceLimitError when
// the grid has more than cell_limit cells.
inline RegionPartition build_partition(const FollowerProblem& fp,
                                       std::size_t cell_limit = 10'000'000) {
  RegionPartition part;
  const std::size_t dim = fp.rhs_dim;
  const std::size_t n = fp.size();

  part.grid_.levels.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    auto& lv = part.grid_.levels[j];
    lv.reserve(n);
    for (std::size_t i = 0; i < n; ++i) lv.push_back(fp.point_image[i][j]);
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
  }

  std::size_t cells = 1;
  for (std::size_t j = 0; j < dim; ++j) {
    std::size_t sz = part.grid_.levels[j].size();
    if (cells > cell_limit / sz + 1) cells = cell_limit + 1;
    else cells *= sz;
    if (cells > cell_limit)
      throw ResourceLimitError("cell enumeration exceeds limit of " +
                               std::to_string(cell_limit) + " cells");
  }

  part.strides_.assign(dim, 1);
  for (std::size_t j = dim; j-- > 1;)
    part.strides_[j - 1] = part.strides_[j] * part.grid_.levels[j].size();

  // Per coordinate and breakpoint, the bitmask of points whose image lies at
  // or below that breakpoint. The feasible set of a cell is the AND over
  // coordinates at the cell's lower corner.
  const std::size_t words = (n + 63) / 64;
  std::vector<std::vector<detail::Mask>> below(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const auto& lv = part.grid_.levels[j];
    below[j].assign(lv.size(), detail::Mask(words, 0));
    for (std::size_t i = 0; i < n; ++i) {
      auto p = part.grid_.interval_index(j, fp.point_image[i][j]);
      // Point images are breakpoints, so p is always defined.
      for (std::size_t q = *p; q < lv.size(); ++q)
        below[j][q][i / 64] |= std::uint64_t(1) << (i % 64);
    }
  }

  part.cell_region_.assign(cells, -1);
  std::map<detail::Mask, std::size_t> region_of_mask;
  std::vector<std::size_t> idx(dim, 0);
  detail::Mask active(words);
  for (std::size_t flat = 0; flat < cells; ++flat) {
    active = below[0][idx[0]];
    for (std::size_t j = 1; j < dim; ++j) detail::mask_and(active, below[j][idx[j]]);
    if (detail::mask_any(active)) {
      auto [it, inserted] = region_of_mask.try_emplace(active, part.regions_.size());
      if (inserted) {
        Region region;
        region.active = detail::mask_indices(active);
        part.regions_.push_back(std::move(region));
      }
      part.cell_region_[flat] = static_cast<std::int32_t>(it->second);
      part.regions_[it->second].cells.push_back(flat);
    }
    for (std::size_t j = dim; j-- > 0;) {
      if (++idx[j] < part.grid_.levels[j].size()) break;
      idx[j] = 0;
    }
  }

  for (auto& region : part.regions_) {
    const Rational* best = nullptr;
    for (std::size_t i : region.active) {
      const Rational& v = fp.point_follower_cost[i];
      if (!best || v < *best) best = &v;
    }
    region.follower_value = *best;
    for (std::size_t i : region.active)
      if (fp.point_follower_cost[i] == region.follower_value)
        region.follower_argmin.push_back(i);
    const Rational* pick = nullptr;
    for (std::size_t i : region.follower_argmin) {
      const Rational& v = fp.point_leader_cost[i];
      if (!pick || v < *pick) {
        pick = &v;
        region.choice = i;
      }
    }
    region.leader_value = *pick;
  }
  return part;
}

// Cells on which the given candidate point is follower-optimal. Empty when
// the point is dominated everywhere.
inline std::vector<Cell> stability_region(const RegionPartition& part,
                                          const FollowerProblem& fp,
                                          std::size_t point_index) {
  if (point_index >= fp.size())
    throw ValidationError("point index out of range");
  std::vector<std::size_t> flats;
  for (const auto& region : part.regions())
    if (std::binary_search(region.follower_argmin.begin(),
                           region.follower_argmin.end(), point_index))
      flats.insert(flats.end(), region.cells.begin(), region.cells.end());
  std::sort(flats.begin(), flats.end());
  std::vector<Cell> out;
  out.reserve(flats.size());
  for (std::size_t flat : flats) out.push_back(part.cell(flat));
  return out;
}

// Growth envelope of the leader objective plus exact extrema of both value
// functions over the realized regions.
inline ObjectiveBounds objective_bounds(const LeaderInstance& inst,
                                        const RegionPartition& part) {
  ObjectiveBounds b;
  const auto& regions = part.regions();
  b.follower_lo = b.follower_hi = regions.front().follower_value;
  b.leader_lo = b.leader_hi = regions.front().leader_value;
  for (const auto& region : regions) {
    b.follower_lo = std::min(b.follower_lo, region.follower_value);
    b.follower_hi = std::max(b.follower_hi, region.follower_value);
    b.leader_lo = std::min(b.leader_lo, region.leader_value);
    b.leader_hi = std::max(b.leader_hi, region.leader_value);
  }
  b.growth = euclidean_norm(inst.objective);
  b.offset = std::max(to_double(abs(b.leader_lo)), to_double(abs(b.leader_hi)));
  return b;
}

inline ObjectiveBounds objective_bounds(const LeaderInstance& inst) {
  return objective_bounds(inst, build_partition(inst.follower));
}

}  // namespace bsilp
