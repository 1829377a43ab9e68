#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "bsilp/feasibility.hpp"
#include "bsilp/lower_level.hpp"
#include "bsilp/measure.hpp"

namespace bsilp {

enum class RiskKind {
  expectation,
  value_at_risk,
  cvar,
  excess_probability,
  expected_excess,
  mean_upper_semideviation,
};

// `inside` applies the functional to the law of objective'x + response;
// `outside` adds objective'x after evaluating the response law. Identical for
// translation-equivariant kinds.
enum class Compose { inside, outside };

struct RiskSpec {
  RiskKind kind = RiskKind::expectation;
  double alpha = 0.95;      // quantile level, in (0, 1)
  double eta = 0.0;         // excess threshold
  int order = 1;            // p >= 1 for expected excess / semideviation
  double coefficient = 1.0; // semideviation weight, in [0, 1]
  Compose compose = Compose::outside;
};

inline void validate(const RiskSpec& spec) {
  if (spec.kind == RiskKind::value_at_risk || spec.kind == RiskKind::cvar)
    if (!(spec.alpha > 0 && spec.alpha < 1))
      throw ValidationError("quantile level must lie in (0, 1)");
  if (spec.kind == RiskKind::expected_excess ||
      spec.kind == RiskKind::mean_upper_semideviation)
    if (spec.order < 1) throw ValidationError("order must be a positive integer");
  if (spec.kind == RiskKind::mean_upper_semideviation)
    if (!(spec.coefficient >= 0 && spec.coefficient <= 1))
      throw ValidationError("semideviation coefficient must lie in [0, 1]");
}

// Finite law of the leader's random outcome: strictly increasing values with
// positive probabilities. Values come from exact rationals on both the
// closed-form and the Monte Carlo path, so duplicates merge exactly.
struct OutcomeDistribution {
  enum class Source { exact, monte_carlo };

  std::vector<double> values;
  std::vector<double> probs;
  Source source = Source::exact;
  std::size_t sample_count = 0;  // monte_carlo only
  std::uint64_t seed = 0;        // monte_carlo only
};

namespace detail {

inline OutcomeDistribution finalize_distribution(
    const std::map<Rational, double>& mass, OutcomeDistribution::Source source) {
  OutcomeDistribution dist;
  dist.source = source;
  for (const auto& [value, p] : mass) {
    if (p <= 0) continue;
    double v = to_double(value);
    if (!dist.values.empty() && dist.values.back() == v)
      dist.probs.back() += p;  // distinct rationals can collide in binary64
    else {
      dist.values.push_back(v);
      dist.probs.push_back(p);
    }
  }
  if (dist.values.empty())
    throw ValidationError("outcome distribution has no mass");
  return dist;
}

}  // namespace detail

// Law of the outcome at decision x under the given measure, computed from
// region probabilities. Requires x in the induced feasible set, which keeps
// the probabilities summing to one. Zero-mass regions are dropped.
inline OutcomeDistribution outcome_distribution(const LeaderInstance& inst,
                                                const RegionPartition& part,
                                                const Measure& measure,
                                                const RationalVector& x,
                                                bool include_leader_cost = true) {
  if (!exact_capable(measure))
    throw UnsupportedMeasureError(
        "no closed-form law for this measure kind; use the Monte Carlo path");
  FeasibilityVerdict verdict = induced_feasible(inst, part, measure, x);
  if (!verdict.in_induced)
    throw InfeasibleError("decision leaves the follower infeasible for some "
                          "support point");
  RationalVector shift = mat_vec(inst.T, x);
  Rational base = include_leader_cost ? dot(inst.objective, x) : Rational(0);
  std::map<Rational, double> mass;
  for (const auto& region : part.regions()) {
    double p = region_probability(measure, part.cells_of(region), shift);
    if (p > 0) mass[base + region.leader_value] += p;
  }
  return detail::finalize_distribution(mass, OutcomeDistribution::Source::exact);
}

// Evaluates the chosen functional on a finite law. The value-at-risk is the
// lower alpha-quantile; the conditional value-at-risk uses the minimization
// form eta + E[(Y - eta)^+]/(1 - alpha), whose minimum is attained at the
// lower quantile.
inline double evaluate_risk(const OutcomeDistribution& dist, const RiskSpec& spec) {
  validate(spec);
  if (dist.values.empty()) throw ValidationError("empty outcome distribution");
  auto mean = [&] {
    double acc = 0;
    for (std::size_t i = 0; i < dist.values.size(); ++i)
      acc += dist.values[i] * dist.probs[i];
    return acc;
  };
  auto lower_quantile = [&](double alpha) {
    double cum = 0;
    for (std::size_t i = 0; i < dist.values.size(); ++i) {
      cum += dist.probs[i];
      if (cum >= alpha - 1e-12) return dist.values[i];
    }
    return dist.values.back();
  };
  switch (spec.kind) {
    case RiskKind::expectation:
      return mean();
    case RiskKind::value_at_risk:
      return lower_quantile(spec.alpha);
    case RiskKind::cvar: {
      double eta = lower_quantile(spec.alpha);
      double tail = 0;
      for (std::size_t i = 0; i < dist.values.size(); ++i)
        tail += dist.probs[i] * std::max(dist.values[i] - eta, 0.0);
      return eta + tail / (1.0 - spec.alpha);
    }
    case RiskKind::excess_probability: {
      double p = 0;
      for (std::size_t i = 0; i < dist.values.size(); ++i)
        if (dist.values[i] > spec.eta) p += dist.probs[i];
      return p;
    }
    case RiskKind::expected_excess: {
      double acc = 0;
      for (std::size_t i = 0; i < dist.values.size(); ++i)
        acc += dist.probs[i] *
               std::pow(std::max(dist.values[i] - spec.eta, 0.0), spec.order);
      return acc;
    }
    case RiskKind::mean_upper_semideviation: {
      double m = mean();
      double acc = 0;
      for (std::size_t i = 0; i < dist.values.size(); ++i)
        acc += dist.probs[i] *
               std::pow(std::max(dist.values[i] - m, 0.0), spec.order);
      return m + spec.coefficient * std::pow(acc, 1.0 / spec.order);
    }
  }
  throw ValidationError("unknown risk kind");
}

// Exact risk of the outcome law at x, with leader cost composed per spec.
inline double risk_value(const LeaderInstance& inst, const RegionPartition& part,
                         const Measure& measure, const RationalVector& x,
                         const RiskSpec& spec) {
  OutcomeDistribution dist = outcome_distribution(
      inst, part, measure, x, spec.compose == Compose::inside);
  double r = evaluate_risk(dist, spec);
  if (spec.compose == Compose::outside) r += to_double(dot(inst.objective, x));
  return r;
}

struct McEstimate {
  double estimate = 0;
  double std_error = 0;  // expectation kind only, zero otherwise
  OutcomeDistribution dist;
};

// Monte Carlo estimator of the risk value: draws `count` noise samples,
// evaluates the follower directly per sample, and applies the functional to
// the empirical law. Samples are split into chunks evaluated concurrently;
// the counter-based generator makes the result independent of the split. Any
// draw that leaves the follower infeasible aborts with the offending point.
inline McEstimate risk_value_mc(const LeaderInstance& inst, const Measure& measure,
                                const RationalVector& x, const RiskSpec& spec,
                                std::size_t count, std::uint64_t seed,
                                std::size_t threads = 0) {
  validate(spec);
  if (count < 100) throw ValidationError("Monte Carlo count must be at least 100");
  if (x.size() != inst.dim) throw ValidationError("decision dimension mismatch");
  if (threads == 0)
    threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min<std::size_t>({threads, 16, (count + 999) / 1000});

  const RationalVector shift = mat_vec(inst.T, x);
  const Rational base =
      spec.compose == Compose::inside ? dot(inst.objective, x) : Rational(0);
  const CounterRng rng(seed);

  auto run_chunk = [&](std::size_t begin,
                       std::size_t end) -> std::map<Rational, std::size_t> {
    std::map<Rational, std::size_t> counts;
    RationalVector t(inst.follower.rhs_dim);
    for (std::size_t i = begin; i < end; ++i) {
      std::uint64_t slot = 0;
      RationalVector z =
          detail::draw_one(measure, rng, i * detail::kSlotsPerSample, slot);
      if (z.size() != inst.follower.rhs_dim)
        throw ValidationError("measure dimension mismatch");
      for (std::size_t j = 0; j < t.size(); ++j) t[j] = shift[j] + z[j];
      ArgminReport rep = evaluate_follower(inst.follower, t);
      if (!rep.leader_value.is_finite()) {
        std::string msg = "sampled noise leaves the follower infeasible at z = (";
        for (std::size_t j = 0; j < z.size(); ++j)
          msg += (j ? ", " : "") + format_rational(z[j]);
        throw InfeasibleError(msg + ")");
      }
      ++counts[base + rep.leader_value.value()];
    }
    return counts;
  };

  std::vector<std::future<std::map<Rational, std::size_t>>> futures;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t begin = 0; begin < count; begin += chunk)
    futures.push_back(std::async(std::launch::async, run_chunk, begin,
                                 std::min(begin + chunk, count)));
  std::map<Rational, std::size_t> counts;
  for (auto& f : futures)
    for (const auto& [value, c] : f.get()) counts[value] += c;

  std::map<Rational, double> mass;
  for (const auto& [value, c] : counts)
    mass[value] = static_cast<double>(c) / static_cast<double>(count);
  McEstimate out;
  out.dist = detail::finalize_distribution(
      mass, OutcomeDistribution::Source::monte_carlo);
  out.dist.sample_count = count;
  out.dist.seed = seed;
  out.estimate = evaluate_risk(out.dist, spec);
  if (spec.compose == Compose::outside)
    out.estimate += to_double(dot(inst.objective, x));
  if (spec.kind == RiskKind::expectation && count > 1) {
    double m = 0, m2 = 0;
    for (std::size_t i = 0; i < out.dist.values.size(); ++i) {
      m += out.dist.values[i] * out.dist.probs[i];
      m2 += out.dist.values[i] * out.dist.values[i] * out.dist.probs[i];
    }
    double var = std::max(m2 - m * m, 0.0);
    out.std_error = std::sqrt(var / static_cast<double>(count - 1));
  }
  return out;
}

}  // namespace bsilp
