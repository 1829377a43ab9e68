#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bsilp/errors.hpp"
#include "bsilp/rational.hpp"

namespace bsilp {

// Value in R ∪ {+inf}. The follower's value functions are bounded below on
// a finite point list, so -inf is deliberately unrepresentable.
class ExtendedValue {
 public:
  ExtendedValue() = default;
  ExtendedValue(Rational v) : finite_(true), value_(std::move(v)) {}
  ExtendedValue(long v) : finite_(true), value_(v) {}

  static ExtendedValue infinity() {
    ExtendedValue e;
    e.finite_ = false;
    return e;
  }

  bool is_finite() const { return finite_; }

  // Only meaningful when finite.
  const Rational& value() const { return value_; }

  friend bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend bool operator!=(const ExtendedValue& a, const ExtendedValue& b) {
    return !(a == b);
  }
  friend bool operator<(const ExtendedValue& a, const ExtendedValue& b) {
    if (!a.finite_) return false;         // +inf < x never
    if (!b.finite_) return true;          // finite < +inf
    return a.value_ < b.value_;
  }
  friend bool operator>(const ExtendedValue& a, const ExtendedValue& b) { return b < a; }
  friend bool operator<=(const ExtendedValue& a, const ExtendedValue& b) { return !(b < a); }
  friend bool operator>=(const ExtendedValue& a, const ExtendedValue& b) { return !(a < b); }

  double as_double() const {
    return finite_ ? to_double(value_) : std::numeric_limits<double>::infinity();
  }

  std::string str() const { return finite_ ? format_rational(value_) : "inf"; }

 private:
  bool finite_ = true;
  Rational value_{};
};

using IntPoint = std::vector<std::int64_t>;

// Follower side: min follower_cost'y over the explicit candidate points
// subject to W y <= t. The leader scores the chosen y with leader_cost.
struct FollowerProblem {
  std::size_t rhs_dim = 0;  // rows of W, dimension of the parameter t
  std::size_t var_dim = 0;  // columns of W
  RationalMatrix W;
  RationalVector follower_cost;
  RationalVector leader_cost;
  std::vector<IntPoint> points;

  // Precomputed per point: image W*y and both cost values.
  std::vector<RationalVector> point_image;
  RationalVector point_follower_cost;
  RationalVector point_leader_cost;

  std::size_t size() const { return points.size(); }
};

inline FollowerProblem make_follower_problem(RationalMatrix w,
                                             RationalVector follower_cost,
                                             RationalVector leader_cost,
                                             std::vector<IntPoint> points) {
  FollowerProblem fp;
  fp.rhs_dim = w.size();
  if (fp.rhs_dim == 0) throw ValidationError("follower constraint matrix is empty");
  fp.var_dim = w.front().size();
  if (fp.var_dim == 0) throw ValidationError("follower has zero variables");
  for (const auto& row : w)
    if (row.size() != fp.var_dim)
      throw ValidationError("ragged follower constraint matrix");
  if (follower_cost.size() != fp.var_dim || leader_cost.size() != fp.var_dim)
    throw ValidationError("follower cost dimension mismatch");
  if (points.empty())
    throw ValidationError("candidate point list must be nonempty");
  std::set<IntPoint> seen;
  for (const auto& p : points) {
    if (p.size() != fp.var_dim)
      throw ValidationError("candidate point dimension mismatch");
    if (!seen.insert(p).second)
      throw ValidationError("candidate points must be pairwise distinct");
  }
  fp.W = std::move(w);
  fp.follower_cost = std::move(follower_cost);
  fp.leader_cost = std::move(leader_cost);
  fp.points = std::move(points);

  fp.point_image.reserve(fp.points.size());
  fp.point_follower_cost.reserve(fp.points.size());
  fp.point_leader_cost.reserve(fp.points.size());
  for (const auto& p : fp.points) {
    RationalVector image(fp.rhs_dim, Rational(0));
    Rational dc = 0, qc = 0;
    for (std::size_t j = 0; j < fp.var_dim; ++j) {
      Rational yj(p[j]);
      for (std::size_t i = 0; i < fp.rhs_dim; ++i) image[i] += fp.W[i][j] * yj;
      dc += fp.follower_cost[j] * yj;
      qc += fp.leader_cost[j] * yj;
    }
    fp.point_image.push_back(std::move(image));
    fp.point_follower_cost.push_back(std::move(dc));
    fp.point_leader_cost.push_back(std::move(qc));
  }
  return fp;
}

// {x | A x <= b}, checked exactly.
struct Polyhedron {
  RationalMatrix A;
  RationalVector b;
};

inline bool polyhedron_contains(const Polyhedron& poly, const RationalVector& x) {
  for (std::size_t i = 0; i < poly.A.size(); ++i)
    if (dot(poly.A[i], x) > poly.b[i]) return false;
  return true;
}

// Leader side: min objective'x + (optimistic follower response at T x + z)
// over the polyhedron `feasible`.
struct LeaderInstance {
  std::size_t dim = 0;  // leader variables
  RationalVector objective;
  RationalMatrix T;  // coupling matrix, rhs_dim x dim
  Polyhedron feasible;
  FollowerProblem follower;
};

inline LeaderInstance make_leader_instance(RationalVector objective,
                                           RationalMatrix t, Polyhedron feasible,
                                           FollowerProblem follower) {
  LeaderInstance inst;
  inst.dim = objective.size();
  if (inst.dim == 0) throw ValidationError("leader has zero variables");
  if (t.size() != follower.rhs_dim)
    throw ValidationError("coupling matrix row count must match follower rhs dimension");
  for (const auto& row : t)
    if (row.size() != inst.dim)
      throw ValidationError("coupling matrix column count must match leader dimension");
  if (feasible.A.size() != feasible.b.size())
    throw ValidationError("polyhedron row count mismatch");
  for (const auto& row : feasible.A)
    if (row.size() != inst.dim)
      throw ValidationError("polyhedron column count must match leader dimension");
  inst.objective = std::move(objective);
  inst.T = std::move(t);
  inst.feasible = std::move(feasible);
  inst.follower = std::move(follower);
  return inst;
}

// Growth envelope |objective'x + response| <= growth*||x|| + offset on the
// domain, together with the exact extrema of both piecewise-constant value
// functions over the realized regions.
struct ObjectiveBounds {
  double growth = 0;  // Euclidean norm of the leader objective
  double offset = 0;  // max(|leader_lo|, |leader_hi|)
  Rational follower_lo, follower_hi;
  Rational leader_lo, leader_hi;
};

}  // namespace bsilp
