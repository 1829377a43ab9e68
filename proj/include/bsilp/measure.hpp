#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bsilp/errors.hpp"
#include "bsilp/region.hpp"
#include "bsilp/rng.hpp"

namespace bsilp {

inline constexpr double kWeightTolerance = 1e-12;

namespace detail {

// Compensated summation keeps the weight-sum check meaningful for empirical
// measures with tens of thousands of equal atoms.
inline double kahan_sum(const std::vector<double>& values) {
  double sum = 0, carry = 0;
  for (double v : values) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace detail

enum class MeasureKind { discrete, box_uniform, mixture, sampler };

// Borel probability measure on the noise space. Atom coordinates and box
// corners are exact rationals; weights are binary64. The sampler kind names
// a built-in generator from sampler_registry() and only supports Monte
// Carlo paths.
struct Measure {
  MeasureKind kind = MeasureKind::discrete;

  // discrete
  std::vector<RationalVector> atoms;
  std::vector<double> weights;

  // box_uniform
  RationalVector lo, hi;

  // mixture
  std::vector<Measure> components;
  std::vector<double> mix_weights;

  // sampler
  std::string sampler_name;

  std::size_t dim() const;

  static Measure discrete(std::vector<RationalVector> atoms,
                          std::vector<double> weights);
  static Measure point_mass(RationalVector atom) {
    return discrete({std::move(atom)}, {1.0});
  }
  static Measure box_uniform(RationalVector lo, RationalVector hi);
  static Measure mixture(std::vector<Measure> components,
                         std::vector<double> weights);
  static Measure sampler(const std::string& name);
};

// A built-in sampler: declared support box plus a draw routine. `slot`
// advances through the per-sample uniform budget.
struct SamplerDef {
  std::size_t dim = 1;
  RationalVector lo, hi;
  bool density_bounded = false;
  std::function<RationalVector(const CounterRng&, std::uint64_t base,
                               std::uint64_t& slot)>
      draw;
};

// "sqrt_density_unit" draws Z = U^2 on [0, 1]; its density 1/(2*sqrt(z))
// integrates to one but is unbounded near zero.
inline const std::map<std::string, SamplerDef>& sampler_registry() {
  static const std::map<std::string, SamplerDef> registry = [] {
    std::map<std::string, SamplerDef> r;
    SamplerDef sqrt_density;
    sqrt_density.dim = 1;
    sqrt_density.lo = {Rational(0)};
    sqrt_density.hi = {Rational(1)};
    sqrt_density.density_bounded = false;
    sqrt_density.draw = [](const CounterRng& rng, std::uint64_t base,
                           std::uint64_t& slot) {
      Rational u = rng.uniform_rational(base + slot++);
      return RationalVector{u * u};
    };
    r.emplace("sqrt_density_unit", std::move(sqrt_density));
    return r;
  }();
  return registry;
}

inline std::size_t Measure::dim() const {
  switch (kind) {
    case MeasureKind::discrete:
      return atoms.front().size();
    case MeasureKind::box_uniform:
      return lo.size();
    case MeasureKind::mixture:
      return components.front().dim();
    case MeasureKind::sampler:
      return sampler_registry().at(sampler_name).dim;
  }
  return 0;
}

inline Measure Measure::discrete(std::vector<RationalVector> atoms,
                                 std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw ValidationError("discrete measure needs matching nonempty atom/weight lists");
  const std::size_t d = atoms.front().size();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != d) throw ValidationError("atom dimension mismatch");
    if (!(weights[i] > 0)) throw ValidationError("atom weights must be positive");
  }
  if (std::abs(detail::kahan_sum(weights) - 1.0) > kWeightTolerance)
    throw ValidationError("atom weights must sum to one");
  Measure m;
  m.kind = MeasureKind::discrete;
  m.atoms = std::move(atoms);
  m.weights = std::move(weights);
  return m;
}

inline Measure Measure::box_uniform(RationalVector lo, RationalVector hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw ValidationError("box bounds dimension mismatch");
  for (std::size_t j = 0; j < lo.size(); ++j)
    if (!(lo[j] < hi[j]))
      throw ValidationError("box bounds must satisfy lo < hi componentwise");
  Measure m;
  m.kind = MeasureKind::box_uniform;
  m.lo = std::move(lo);
  m.hi = std::move(hi);
  return m;
}

inline Measure Measure::mixture(std::vector<Measure> components,
                                std::vector<double> weights) {
  if (components.empty() || components.size() != weights.size())
    throw ValidationError("mixture needs matching nonempty component/weight lists");
  const std::size_t d = components.front().dim();
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].dim() != d)
      throw ValidationError("mixture component dimension mismatch");
    if (!(weights[i] > 0)) throw ValidationError("mixture weights must be positive");
  }
  if (std::abs(detail::kahan_sum(weights) - 1.0) > kWeightTolerance)
    throw ValidationError("mixture weights must sum to one");
  Measure m;
  m.kind = MeasureKind::mixture;
  m.components = std::move(components);
  m.mix_weights = std::move(weights);
  return m;
}

inline Measure Measure::sampler(const std::string& name) {
  if (!sampler_registry().count(name))
    throw ValidationError("unknown sampler '" + name + "'");
  Measure m;
  m.kind = MeasureKind::sampler;
  m.sampler_name = name;
  return m;
}

// True when region probabilities have a closed form.
inline bool exact_capable(const Measure& m) {
  switch (m.kind) {
    case MeasureKind::discrete:
    case MeasureKind::box_uniform:
      return true;
    case MeasureKind::mixture:
      for (const auto& c : m.components)
        if (!exact_capable(c)) return false;
      return true;
    case MeasureKind::sampler:
      return false;
  }
  return false;
}

// Whether the measure has a uniformly bounded Lebesgue density. Purely
// discrete parts have no density at all and report false.
inline bool has_bounded_density(const Measure& m) {
  switch (m.kind) {
    case MeasureKind::box_uniform:
      return true;
    case MeasureKind::discrete:
      return false;
    case MeasureKind::mixture:
      for (const auto& c : m.components)
        if (!has_bounded_density(c)) return false;
      return true;
    case MeasureKind::sampler:
      return sampler_registry().at(m.sampler_name).density_bounded;
  }
  return false;
}

struct SampleBatch {
  std::vector<RationalVector> points;
  std::uint64_t seed = 0;
  std::size_t count = 0;
};

namespace detail {

// Uniform budget per sample; nesting deeper than this is rejected.
inline constexpr std::uint64_t kSlotsPerSample = 64;

inline std::size_t pick_index(const std::vector<double>& weights, double u) {
  double cum = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  return weights.size() - 1;  // float tail
}

inline RationalVector draw_one(const Measure& m, const CounterRng& rng,
                               std::uint64_t base, std::uint64_t& slot) {
  if (slot >= kSlotsPerSample)
    throw ValidationError("measure nesting exceeds the per-sample draw budget");
  switch (m.kind) {
    case MeasureKind::discrete: {
      double u = rng.uniform01(base + slot++);
      return m.atoms[pick_index(m.weights, u)];
    }
    case MeasureKind::box_uniform: {
      RationalVector out(m.lo.size());
      for (std::size_t j = 0; j < m.lo.size(); ++j) {
        Rational u = rng.uniform_rational(base + slot++);
        out[j] = m.lo[j] + u * (m.hi[j] - m.lo[j]);
      }
      return out;
    }
    case MeasureKind::mixture: {
      double u = rng.uniform01(base + slot++);
      return draw_one(m.components[pick_index(m.mix_weights, u)], rng, base, slot);
    }
    case MeasureKind::sampler:
      return sampler_registry().at(m.sampler_name).draw(rng, base, slot);
  }
  throw ValidationError("unknown measure kind");
}

}  // namespace detail

// count i.i.d. draws; identical (measure, seed, count) yields identical
// points. Sample i consumes counters [i*64, (i+1)*64).
inline SampleBatch sample(const Measure& m, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw ValidationError("sample count must be positive");
  CounterRng rng(seed);
  SampleBatch batch;
  batch.seed = seed;
  batch.count = count;
  batch.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t slot = 0;
    batch.points.push_back(
        detail::draw_one(m, rng, i * detail::kSlotsPerSample, slot));
  }
  return batch;
}

namespace detail {

inline bool in_some_cell(const std::vector<Cell>& cells, const RationalVector& p) {
  for (const auto& cell : cells)
    if (cell.contains(p)) return true;
  return false;
}

}  // namespace detail

// Mass of {z | shift + z ∈ union of cells}, exact for discrete atoms
// (half-open membership) and for box uniforms (interval overlap volumes).
// The cells must be pairwise disjoint.
inline double region_probability(const Measure& m, const std::vector<Cell>& cells,
                                 const RationalVector& shift) {
  switch (m.kind) {
    case MeasureKind::discrete: {
      double total = 0;
      RationalVector shifted(shift.size());
      for (std::size_t a = 0; a < m.atoms.size(); ++a) {
        for (std::size_t j = 0; j < shift.size(); ++j)
          shifted[j] = shift[j] + m.atoms[a][j];
        if (detail::in_some_cell(cells, shifted)) total += m.weights[a];
      }
      return total;
    }
    case MeasureKind::box_uniform: {
      Rational covered = 0;
      for (const auto& cell : cells) {
        Rational vol = 1;
        for (std::size_t j = 0; j < m.lo.size() && vol != 0; ++j) {
          Rational lo = cell.lower[j] - shift[j];
          if (lo < m.lo[j]) lo = m.lo[j];
          Rational hi = m.hi[j];
          if (cell.upper[j].is_finite()) {
            Rational cell_hi = cell.upper[j].value() - shift[j];
            if (cell_hi < hi) hi = cell_hi;
          }
          vol *= hi > lo ? hi - lo : Rational(0);
        }
        covered += vol;
      }
      Rational box_vol = 1;
      for (std::size_t j = 0; j < m.lo.size(); ++j) box_vol *= m.hi[j] - m.lo[j];
      return to_double(covered / box_vol);
    }
    case MeasureKind::mixture: {
      double total = 0;
      for (std::size_t i = 0; i < m.components.size(); ++i)
        total += m.mix_weights[i] * region_probability(m.components[i], cells, shift);
      return total;
    }
    case MeasureKind::sampler:
      throw UnsupportedMeasureError(
          "sampler measures have no closed-form region probability");
  }
  throw ValidationError("unknown measure kind");
}

struct SupportBounds {
  RationalVector lo, hi;
  bool bounded = true;
  double diameter = 0;  // Euclidean diameter of the bounding box
};

inline SupportBounds support_bounds(const Measure& m) {
  SupportBounds out;
  switch (m.kind) {
    case MeasureKind::discrete: {
      out.lo = out.hi = m.atoms.front();
      for (const auto& a : m.atoms)
        for (std::size_t j = 0; j < a.size(); ++j) {
          if (a[j] < out.lo[j]) out.lo[j] = a[j];
          if (a[j] > out.hi[j]) out.hi[j] = a[j];
        }
      break;
    }
    case MeasureKind::box_uniform:
      out.lo = m.lo;
      out.hi = m.hi;
      break;
    case MeasureKind::mixture: {
      out = support_bounds(m.components.front());
      for (std::size_t i = 1; i < m.components.size(); ++i) {
        SupportBounds c = support_bounds(m.components[i]);
        for (std::size_t j = 0; j < out.lo.size(); ++j) {
          if (c.lo[j] < out.lo[j]) out.lo[j] = c.lo[j];
          if (c.hi[j] > out.hi[j]) out.hi[j] = c.hi[j];
        }
        out.bounded = out.bounded && c.bounded;
      }
      break;
    }
    case MeasureKind::sampler: {
      const auto& def = sampler_registry().at(m.sampler_name);
      out.lo = def.lo;
      out.hi = def.hi;
      break;
    }
  }
  RationalVector span(out.lo.size());
  for (std::size_t j = 0; j < out.lo.size(); ++j) span[j] = out.hi[j] - out.lo[j];
  out.diameter = euclidean_norm(span);
  return out;
}

// Upper bound on the mass the measure puts on points where the shifted
// piecewise-constant value function can jump: discrete atoms landing exactly
// on a grid breakpoint count in full, box uniforms contribute nothing since
// breakpoint hyperplanes are null sets.
inline double discontinuity_mass_bound(const RegionPartition& part,
                                       const LeaderInstance& inst,
                                       const RationalVector& x,
                                       const Measure& measure) {
  RationalVector shift = mat_vec(inst.T, x);
  const ThresholdGrid& grid = part.grid();
  std::function<double(const Measure&)> bound = [&](const Measure& m) -> double {
    switch (m.kind) {
      case MeasureKind::discrete: {
        double total = 0;
        for (std::size_t a = 0; a < m.atoms.size(); ++a) {
          for (std::size_t j = 0; j < grid.dim(); ++j) {
            if (grid.is_breakpoint(j, shift[j] + m.atoms[a][j])) {
              total += m.weights[a];
              break;
            }
          }
        }
        return total;
      }
      case MeasureKind::box_uniform:
        return 0.0;
      case MeasureKind::mixture: {
        double total = 0;
        for (std::size_t i = 0; i < m.components.size(); ++i)
          total += m.mix_weights[i] * bound(m.components[i]);
        return total;
      }
      case MeasureKind::sampler:
        throw UnsupportedMeasureError(
            "discontinuity bound needs a discrete or box-uniform measure");
    }
    throw ValidationError("unknown measure kind");
  };
  return bound(measure);
}

}  // namespace bsilp
