#pragma once

#include <optional>
#include <vector>

#include "bsilp/errors.hpp"
#include "bsilp/model.hpp"

namespace bsilp {

// Full account of the follower problem at one parameter value: feasible
// point indices, the follower's optimal value, its argmin, and the value the
// leader extracts from the argmin. Infeasibility is encoded as +inf.
struct ArgminReport {
  std::vector<std::size_t> feasible;
  ExtendedValue follower_value = ExtendedValue::infinity();
  std::vector<std::size_t> argmin;
  ExtendedValue leader_value = ExtendedValue::infinity();
  // Lowest point index attaining leader_value within the argmin. Reporting
  // convenience only; leader_value itself is tie-free.
  std::optional<std::size_t> choice;
};

// With Attitude::pessimistic the inner selection maximizes the leader cost
// over the follower argmin instead of minimizing it.
enum class Attitude { optimistic, pessimistic };

// Direct scan over the candidate list. This is the reference evaluator the
// region machinery is checked against.
inline ArgminReport evaluate_follower(const FollowerProblem& fp,
                                      const RationalVector& t,
                                      Attitude attitude = Attitude::optimistic) {
  if (t.size() != fp.rhs_dim)
    throw ValidationError("parameter dimension mismatch");
  ArgminReport report;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < fp.rhs_dim && ok; ++j)
      ok = fp.point_image[i][j] <= t[j];
    if (ok) report.feasible.push_back(i);
  }
  if (report.feasible.empty()) return report;

  const Rational* best = nullptr;
  for (std::size_t i : report.feasible) {
    const Rational& v = fp.point_follower_cost[i];
    if (!best || v < *best) best = &v;
  }
  report.follower_value = ExtendedValue(*best);
  for (std::size_t i : report.feasible)
    if (fp.point_follower_cost[i] == *best) report.argmin.push_back(i);

  const bool maximize = attitude == Attitude::pessimistic;
  std::optional<Rational> pick;
  for (std::size_t i : report.argmin) {
    const Rational& v = fp.point_leader_cost[i];
    if (!pick || (maximize ? v > *pick : v < *pick)) {
      pick = v;
      report.choice = i;
    }
  }
  report.leader_value = ExtendedValue(*pick);
  return report;
}

struct CurveSample {
  Rational parameter;  // position along the segment, 0 at start, 1 at end
  ExtendedValue follower_value;
  ExtendedValue leader_value;
};

// Both value functions sampled at `samples` equally spaced points on the
// segment from start to end, endpoints included.
inline std::vector<CurveSample> value_curve(const FollowerProblem& fp,
                                            const RationalVector& start,
                                            const RationalVector& end,
                                            std::size_t samples) {
  if (start.size() != fp.rhs_dim || end.size() != fp.rhs_dim)
    throw ValidationError("segment endpoint dimension mismatch");
  if (samples < 2) throw ValidationError("need at least two samples");
  std::vector<CurveSample> out;
  out.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    Rational lambda(static_cast<long>(k), static_cast<long>(samples - 1));
    RationalVector t(fp.rhs_dim);
    for (std::size_t j = 0; j < fp.rhs_dim; ++j)
      t[j] = start[j] + lambda * (end[j] - start[j]);
    ArgminReport rep = evaluate_follower(fp, t);
    out.push_back({lambda, rep.follower_value, rep.leader_value});
  }
  return out;
}

}  // namespace bsilp
