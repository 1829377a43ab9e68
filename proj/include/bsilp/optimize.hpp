#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "bsilp/risk.hpp"

namespace bsilp {

// Objective evaluation; nullopt marks an infeasible point (rejected, never
// penalized).
using Objective = std::function<std::optional<double>(const RationalVector&)>;

struct SolveReport {
  enum class Status { converged, budget_exhausted, infeasible };

  RationalVector best_x;
  double best_value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;  // successful objective evaluations
  std::vector<std::pair<RationalVector, double>> trace;
  Status status = Status::infeasible;
};

// Exhaustive evaluation on a uniform grid over the box; first minimizer in
// odometer order wins ties.
inline SolveReport minimize_on_grid(const Objective& objective,
                                    const BoxBounds& box,
                                    std::size_t resolution) {
  if (resolution < 2) throw ValidationError("grid resolution must be at least 2");
  const std::size_t dim = box.lo.size();
  std::vector<std::vector<Rational>> axes(dim);
  for (std::size_t j = 0; j < dim; ++j)
    axes[j] = linspace(box.lo[j], box.hi[j], resolution);

  SolveReport report;
  std::vector<std::size_t> idx(dim, 0);
  bool found = false;
  while (true) {
    RationalVector x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = axes[j][idx[j]];
    if (auto value = objective(x)) {
      ++report.evaluations;
      report.trace.emplace_back(x, *value);
      if (!found || *value < report.best_value) {
        found = true;
        report.best_value = *value;
        report.best_x = x;
      }
    }
    std::size_t j = dim;
    bool done = true;
    while (j-- > 0) {
      if (++idx[j] < resolution) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) break;
  }
  if (found) {
    report.status = SolveReport::Status::converged;
    report.best_value = *objective(report.best_x);  // re-evaluated at report time
  }
  return report;
}

// Compass search: poll +/- step along each axis, accept the first strict
// improvement, shrink the step when a full sweep fails. Steps stay rational
// so feasibility checks along the way remain exact. Stops once the step
// drops below 1e-9 of its start value or the poll budget runs out.
inline SolveReport compass_search(const Objective& objective, RationalVector x0,
                                  const Rational& step0, const Rational& shrink,
                                  std::size_t budget) {
  if (!(step0 > 0)) throw ValidationError("initial step must be positive");
  if (!(shrink > 0 && shrink < 1))
    throw ValidationError("shrink factor must lie in (0, 1)");
  auto f0 = objective(x0);
  if (!f0) throw InfeasibleError("compass search start point is infeasible");

  SolveReport report;
  report.best_x = std::move(x0);
  report.best_value = *f0;
  report.evaluations = 1;
  report.trace.emplace_back(report.best_x, report.best_value);
  report.status = SolveReport::Status::budget_exhausted;

  const std::size_t dim = report.best_x.size();
  const Rational stop = step0 / 1'000'000'000;
  Rational step = step0;
  std::size_t polls = 0;
  while (true) {
    if (step < stop) {
      report.status = SolveReport::Status::converged;
      break;
    }
    bool improved = false;
    for (std::size_t j = 0; j < dim && !improved; ++j) {
      for (int sign : {+1, -1}) {
        if (polls >= budget) {
          report.best_value = *objective(report.best_x);
          return report;
        }
        ++polls;
        RationalVector trial = report.best_x;
        trial[j] += sign > 0 ? step : -step;
        auto value = objective(trial);
        if (!value) continue;
        ++report.evaluations;
        if (*value < report.best_value) {
          report.best_x = std::move(trial);
          report.best_value = *value;
          report.trace.emplace_back(report.best_x, report.best_value);
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= shrink;
  }
  report.best_value = *objective(report.best_x);
  return report;
}

// Localized minimization: the optimal value and argmin set over the closure
// of an open box, evaluated on a uniform grid. A grid argmin set is a
// complete local minimizing set when it is nonempty and sits strictly inside
// the open box.
struct LocalizedReport {
  BoxBounds region;  // the open box
  double value = std::numeric_limits<double>::infinity();
  std::vector<RationalVector> minimizers;  // within tolerance of the minimum
  bool is_clm = false;
};

inline LocalizedReport localize_on_grid(const Objective& objective,
                                        const BoxBounds& box,
                                        std::size_t resolution,
                                        double tolerance = 1e-9) {
  if (resolution < 2) throw ValidationError("grid resolution must be at least 2");
  LocalizedReport report;
  report.region = box;
  const std::size_t dim = box.lo.size();
  std::vector<std::vector<Rational>> axes(dim);
  for (std::size_t j = 0; j < dim; ++j)
    axes[j] = linspace(box.lo[j], box.hi[j], resolution);

  std::vector<std::pair<RationalVector, double>> evaluated;
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    RationalVector x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = axes[j][idx[j]];
    if (auto value = objective(x)) {
      evaluated.emplace_back(std::move(x), *value);
      report.value = std::min(report.value, *value);
    }
    std::size_t j = dim;
    bool done = true;
    while (j-- > 0) {
      if (++idx[j] < resolution) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) break;
  }
  if (evaluated.empty()) return report;  // value stays +inf, not a CLM set

  for (auto& [x, value] : evaluated)
    if (value <= report.value + tolerance) report.minimizers.push_back(std::move(x));
  report.is_clm = !report.minimizers.empty();
  for (const auto& x : report.minimizers) {
    for (std::size_t j = 0; j < dim; ++j)
      if (!(box.lo[j] < x[j] && x[j] < box.hi[j])) {
        report.is_clm = false;
        break;
      }
    if (!report.is_clm) break;
  }
  return report;
}

// Monte Carlo settings for objectives without a closed-form law. One fixed
// seed across all evaluations (common random numbers) keeps searches
// deterministic.
struct McOptions {
  std::size_t count = 0;  // zero means exact evaluation only
  std::uint64_t seed = 0;
};

// Risk objective restricted to X and the induced feasible set, by rejection.
inline Objective make_risk_objective(const LeaderInstance& inst,
                                     const RegionPartition& part,
                                     const Measure& measure, const RiskSpec& spec,
                                     const McOptions& mc = {}) {
  if (!exact_capable(measure) && mc.count == 0)
    throw UnsupportedMeasureError(
        "measure needs the Monte Carlo path; set a sample count");
  const bool exact = exact_capable(measure);
  return [&inst, &part, measure, spec, mc, exact](const RationalVector& x)
             -> std::optional<double> {
    if (!polyhedron_contains(inst.feasible, x)) return std::nullopt;
    if (exact) {
      if (!induced_feasible(inst, part, measure, x).in_induced)
        return std::nullopt;
      return risk_value(inst, part, measure, x, spec);
    }
    try {
      return risk_value_mc(inst, measure, x, spec, mc.count, mc.seed).estimate;
    } catch (const InfeasibleError&) {
      return std::nullopt;
    }
  };
}

inline SolveReport solve_grid(const LeaderInstance& inst,
                              const RegionPartition& part, const Measure& measure,
                              const RiskSpec& spec, const BoxBounds& box,
                              std::size_t resolution, const McOptions& mc = {}) {
  return minimize_on_grid(make_risk_objective(inst, part, measure, spec, mc), box,
                          resolution);
}

inline SolveReport solve_pattern(const LeaderInstance& inst,
                                 const RegionPartition& part,
                                 const Measure& measure, const RiskSpec& spec,
                                 const RationalVector& x0, const Rational& step0,
                                 const Rational& shrink, std::size_t budget,
                                 const McOptions& mc = {}) {
  return compass_search(make_risk_objective(inst, part, measure, spec, mc), x0,
                        step0, shrink, budget);
}

inline LocalizedReport localized(const LeaderInstance& inst,
                                 const RegionPartition& part,
                                 const Measure& measure, const RiskSpec& spec,
                                 const BoxBounds& box, std::size_t resolution,
                                 const McOptions& mc = {}) {
  return localize_on_grid(make_risk_objective(inst, part, measure, spec, mc), box,
                          resolution);
}

}  // namespace bsilp
