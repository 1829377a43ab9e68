#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bsilp/measure.hpp"
#include "bsilp/region.hpp"

namespace bsilp {

// Membership verdict for the leader polyhedron and the induced feasible set
// (decisions keeping every noise realization inside the follower domain).
// On failure, witness holds the violating support atom (discrete) or the
// lower corner of an uncovered grid cell (box support), in noise and
// parameter coordinates respectively.
struct FeasibilityVerdict {
  bool in_polyhedron = false;
  bool in_induced = false;
  std::optional<RationalVector> witness;
};

struct BoxBounds {
  RationalVector lo, hi;
};

namespace detail {

// A closed box is covered by the union of upper orthants iff every grid cell
// it meets has a nonempty active set: the active set is constant per cell,
// and any uncovered cell contributes uncovered volume.
inline bool box_covered(const RegionPartition& part, const RationalVector& lo,
                        const RationalVector& hi,
                        std::optional<RationalVector>& witness) {
  const ThresholdGrid& grid = part.grid();
  const std::size_t dim = grid.dim();
  std::vector<std::size_t> first(dim), last(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    auto p_lo = grid.interval_index(j, lo[j]);
    if (!p_lo) {
      witness = lo;  // box dips below every breakpoint in coordinate j
      return false;
    }
    auto p_hi = grid.interval_index(j, hi[j]);
    first[j] = *p_lo;
    last[j] = *p_hi;
  }
  std::vector<std::size_t> idx = first;
  while (true) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < dim; ++j) {
      std::size_t stride = 1;
      for (std::size_t k = j + 1; k < dim; ++k) stride *= grid.levels[k].size();
      flat += idx[j] * stride;
    }
    if (part.region_of_cell(flat) < 0) {
      RationalVector corner(dim);
      for (std::size_t j = 0; j < dim; ++j) corner[j] = grid.levels[j][idx[j]];
      witness = std::move(corner);
      return false;
    }
    std::size_t j = dim;
    while (j-- > 0) {
      if (++idx[j] <= last[j]) break;
      idx[j] = first[j];
      if (j == 0) return true;
    }
  }
}

inline bool support_covered(const RegionPartition& part, const Measure& measure,
                            const RationalVector& shift,
                            std::optional<RationalVector>& witness) {
  switch (measure.kind) {
    case MeasureKind::discrete: {
      RationalVector t(shift.size());
      for (const auto& atom : measure.atoms) {
        for (std::size_t j = 0; j < shift.size(); ++j) t[j] = shift[j] + atom[j];
        if (!part.domain_contains(t)) {
          witness = atom;
          return false;
        }
      }
      return true;
    }
    case MeasureKind::box_uniform: {
      RationalVector lo(shift.size()), hi(shift.size());
      for (std::size_t j = 0; j < shift.size(); ++j) {
        lo[j] = shift[j] + measure.lo[j];
        hi[j] = shift[j] + measure.hi[j];
      }
      return box_covered(part, lo, hi, witness);
    }
    case MeasureKind::mixture: {
      // The support of a mixture is the union of component supports.
      for (const auto& c : measure.components)
        if (!support_covered(part, c, shift, witness)) return false;
      return true;
    }
    case MeasureKind::sampler:
      throw UnsupportedMeasureError(
          "induced feasibility needs a discrete or box-support measure; "
          "declared sampler bounds are not trusted");
  }
  throw ValidationError("unknown measure kind");
}

}  // namespace detail

// Exact membership oracle for X and the induced feasible set.
inline FeasibilityVerdict induced_feasible(const LeaderInstance& inst,
                                           const RegionPartition& part,
                                           const Measure& measure,
                                           const RationalVector& x) {
  if (x.size() != inst.dim)
    throw ValidationError("decision dimension mismatch");
  FeasibilityVerdict verdict;
  verdict.in_polyhedron = polyhedron_contains(inst.feasible, x);
  RationalVector shift = mat_vec(inst.T, x);
  verdict.in_induced =
      detail::support_covered(part, measure, shift, verdict.witness);
  return verdict;
}

// Verdicts on a uniform grid over the box; resolution points per axis.
inline std::vector<std::pair<RationalVector, FeasibilityVerdict>>
induced_feasible_scan(const LeaderInstance& inst, const RegionPartition& part,
                      const Measure& measure, const BoxBounds& box,
                      std::size_t resolution) {
  if (resolution < 2) throw ValidationError("scan resolution must be at least 2");
  if (box.lo.size() != inst.dim || box.hi.size() != inst.dim)
    throw ValidationError("scan box dimension mismatch");
  std::vector<std::vector<Rational>> axes(inst.dim);
  for (std::size_t j = 0; j < inst.dim; ++j)
    axes[j] = linspace(box.lo[j], box.hi[j], resolution);
  std::vector<std::pair<RationalVector, FeasibilityVerdict>> out;
  std::vector<std::size_t> idx(inst.dim, 0);
  while (true) {
    RationalVector x(inst.dim);
    for (std::size_t j = 0; j < inst.dim; ++j) x[j] = axes[j][idx[j]];
    out.emplace_back(x, induced_feasible(inst, part, measure, x));
    std::size_t j = inst.dim;
    while (j-- > 0) {
      if (++idx[j] < resolution) break;
      idx[j] = 0;
      if (j == 0) return out;
    }
  }
}

}  // namespace bsilp
