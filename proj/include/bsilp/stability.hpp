#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bsilp/optimize.hpp"

namespace bsilp {

// Empirical measure: uniform atoms on n seeded draws from the base.
inline Measure empirical_measure(const Measure& base, std::size_t n,
                                 std::uint64_t seed) {
  SampleBatch batch = sample(base, n, seed);
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  return Measure::discrete(std::move(batch.points), std::move(weights));
}

// (1 - eps) * base + eps * noise; a standard weakly convergent family as
// eps -> 0. The endpoints return the respective component unchanged.
inline Measure contaminate(const Measure& base, const Measure& noise, double eps) {
  if (!(eps >= 0 && eps <= 1))
    throw ValidationError("contamination level must lie in [0, 1]");
  if (base.dim() != noise.dim())
    throw ValidationError("contamination dimension mismatch");
  if (eps == 0) return base;
  if (eps == 1) return noise;
  return Measure::mixture({base, noise}, {1.0 - eps, eps});
}

struct PerturbationSequence {
  Measure base;
  std::vector<Measure> elements;
  std::vector<std::string> labels;
};

inline PerturbationSequence empirical_sequence(const Measure& base,
                                               const std::vector<std::size_t>& ns,
                                               std::uint64_t seed) {
  PerturbationSequence seq{base, {}, {}};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    seq.elements.push_back(
        empirical_measure(base, ns[i], CounterRng::derive_seed(seed, i)));
    seq.labels.push_back("empirical_n=" + std::to_string(ns[i]));
  }
  return seq;
}

inline PerturbationSequence contamination_sequence(const Measure& base,
                                                   const Measure& noise,
                                                   const std::vector<double>& eps) {
  PerturbationSequence seq{base, {}, {}};
  for (double e : eps) {
    seq.elements.push_back(contaminate(base, noise, e));
    seq.labels.push_back("contaminated_eps=" + format_double(e));
  }
  return seq;
}

namespace detail {

// Risk value via the closed form when the measure allows it, Monte Carlo
// otherwise. Throws InfeasibleError when x leaves the induced feasible set.
inline double q_value(const LeaderInstance& inst, const RegionPartition& part,
                      const Measure& measure, const RationalVector& x,
                      const RiskSpec& spec, const McOptions& mc) {
  if (exact_capable(measure)) return risk_value(inst, part, measure, x, spec);
  if (mc.count == 0)
    throw UnsupportedMeasureError(
        "measure needs the Monte Carlo path; set a sample count");
  return risk_value_mc(inst, measure, x, spec, mc.count, mc.seed).estimate;
}

inline double set_excess(const std::vector<RationalVector>& from,
                         const std::vector<RationalVector>& over) {
  if (from.empty()) return 0.0;
  if (over.empty()) return std::numeric_limits<double>::infinity();
  double excess = 0;
  for (const auto& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : over) {
      RationalVector diff(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) diff[j] = a[j] - b[j];
      best = std::min(best, euclidean_norm(diff));
    }
    excess = std::max(excess, best);
  }
  return excess;
}

}  // namespace detail

// One row per perturbed measure: deviation of the risk value at x, of the
// localized optimal value on V, and the excess of the perturbed localized
// argmin set over the base one.
struct ContinuityRow {
  std::string label;
  double q_deviation = 0;
  double value_deviation = 0;
  double solution_excess = 0;
};

struct ContinuityTable {
  double base_q = 0;
  double base_localized_value = 0;
  std::vector<RationalVector> base_minimizers;
  std::vector<ContinuityRow> rows;
  // Nonempty when the base measure puts positive bound mass on jump points
  // of the shifted value function; the continuity baseline is then suspect.
  std::string warning;
};

// Empirical stability diagnostic: how far the risk value at a fixed decision
// and the localized optimum move when the base measure is replaced by each
// element of the sequence. Sequence elements without a closed form are
// evaluated by Monte Carlo on independently derived seeds.
inline ContinuityTable continuity_diagnostic(const LeaderInstance& inst,
                                             const RegionPartition& part,
                                             const RiskSpec& spec,
                                             const RationalVector& x,
                                             const PerturbationSequence& seq,
                                             const BoxBounds& box,
                                             std::size_t resolution,
                                             std::size_t mc_count = 0,
                                             std::uint64_t seed = 0) {
  ContinuityTable table;
  McOptions base_mc{mc_count, seed};
  if (exact_capable(seq.base)) {
    double bound = discontinuity_mass_bound(part, inst, x, seq.base);
    if (bound > 0)
      table.warning = "base measure puts bound mass " + format_double(bound) +
                      " on jump points at this decision";
  }
  table.base_q = detail::q_value(inst, part, seq.base, x, spec, base_mc);
  LocalizedReport base_loc =
      localized(inst, part, seq.base, spec, box, resolution, base_mc);
  table.base_localized_value = base_loc.value;
  table.base_minimizers = base_loc.minimizers;

  for (std::size_t i = 0; i < seq.elements.size(); ++i) {
    const Measure& element = seq.elements[i];
    McOptions mc{mc_count, CounterRng::derive_seed(seed, i + 1)};
    ContinuityRow row;
    row.label = i < seq.labels.size() ? seq.labels[i] : std::to_string(i);
    try {
      row.q_deviation =
          std::abs(detail::q_value(inst, part, element, x, spec, mc) - table.base_q);
    } catch (const InfeasibleError& err) {
      throw InfeasibleError("element '" + row.label + "': " + err.what());
    }
    LocalizedReport loc = localized(inst, part, element, spec, box, resolution, mc);
    row.value_deviation = std::abs(loc.value - table.base_localized_value);
    row.solution_excess = detail::set_excess(loc.minimizers, table.base_minimizers);
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Log-log fit of the local modulus of continuity. Probes along coordinate
// directions only, so runs are reproducible.
struct HolderFit {
  bool defined = false;    // false when the objective never moved
  double exponent = 0;
  double constant = 0;
  std::vector<std::pair<double, double>> table;  // (radius, max deviation)
};

inline HolderFit holder_fit(const LeaderInstance& inst, const RegionPartition& part,
                            const Measure& measure, const RiskSpec& spec,
                            const RationalVector& x0,
                            const std::vector<Rational>& radii,
                            std::size_t mc_count = 0, std::uint64_t seed = 0) {
  if (radii.size() < 2)
    throw ValidationError("need at least two radii for a slope fit");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw ValidationError("radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw ValidationError("radii must be strictly decreasing");
  }
  McOptions mc{mc_count, seed};  // common random numbers across probes
  const double q0 = detail::q_value(inst, part, measure, x0, spec, mc);

  HolderFit fit;
  for (const Rational& r : radii) {
    double delta = 0;
    for (std::size_t j = 0; j < x0.size(); ++j) {
      for (int sign : {+1, -1}) {
        RationalVector probe = x0;
        probe[j] += sign > 0 ? r : -r;
        delta = std::max(
            delta, std::abs(detail::q_value(inst, part, measure, probe, spec, mc) -
                            q0));
      }
    }
    fit.table.emplace_back(to_double(r), delta);
  }

  // Zero rows carry no slope information; drop them before fitting.
  std::vector<std::pair<double, double>> logs;
  for (const auto& [r, d] : fit.table)
    if (d > 0) logs.emplace_back(std::log(r), std::log(d));
  if (logs.size() < 2) return fit;  // undefined sentinel

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [lx, ly] : logs) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(logs.size());
  fit.defined = true;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.constant = std::exp((sy - fit.exponent * sx) / n);
  return fit;
}

// True when the localized argmin set on the box is nonempty and lies
// strictly inside it.
inline bool clm_check(const LeaderInstance& inst, const RegionPartition& part,
                      const Measure& measure, const RiskSpec& spec,
                      const BoxBounds& box, std::size_t resolution,
                      const McOptions& mc = {}) {
  return localized(inst, part, measure, spec, box, resolution, mc).is_clm;
}

}  // namespace bsilp
