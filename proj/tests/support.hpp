#pragma once

// Shared fixtures and helpers for the test suites. The *_follower builders
// mirror the worked examples used throughout the tests: a ceiling/floor
// instance on a box of integer points, a six-point instance in one and two
// dimensional parameter space, a 4x4x4 cube instance with competing costs,
// and a minimal two-point chain whose value function is a single step.

#include <set>
#include <string>
#include <vector>

#include "bsilp/bsilp.hpp"

namespace test_support {

using namespace bsilp;

inline RationalVector vec(std::initializer_list<const char*> items) {
  RationalVector out;
  for (const char* s : items) out.push_back(*try_parse_rational(s));
  return out;
}

inline Rational rat(const char* s) { return *try_parse_rational(s); }

// Integer box [-5,5]^2 with W = [[-1,0],[0,1]], follower cost (1,-1) and
// leader cost (1,1). On the sampled range the optimistic value equals
// ceil(-t1) + floor(t2) and the follower value equals -floor(t1) - floor(t2).
inline FollowerProblem ceilfloor_follower() {
  std::vector<IntPoint> points;
  for (std::int64_t a = -5; a <= 5; ++a)
    for (std::int64_t b = -5; b <= 5; ++b) points.push_back({a, b});
  return make_follower_problem({vec({"-1", "0"}), vec({"0", "1"})},
                               vec({"1", "-1"}), vec({"1", "1"}),
                               std::move(points));
}

// The six integer points used in both six-point fixtures, in a fixed order:
// index 0..5 = (2,3), (3,3), (3,2), (4,2), (1,1), (3,1).
inline std::vector<IntPoint> six_points() {
  return {{2, 3}, {3, 3}, {3, 2}, {4, 2}, {1, 1}, {3, 1}};
}

// W = [1 1]: scalar parameter, breakpoints {2,4,5,6}.
inline FollowerProblem six_point_follower_1d() {
  return make_follower_problem({vec({"1", "1"})}, vec({"1", "-1"}),
                               vec({"1", "1"}), six_points());
}

// W = [[-1,0],[0,1]]: planar parameter, twelve grid cells, eight regions.
inline FollowerProblem six_point_follower_2d() {
  return make_follower_problem({vec({"-1", "0"}), vec({"0", "1"})},
                               vec({"1", "-1"}), vec({"1", "1"}), six_points());
}

// Candidate cube {0..3}^3 with W = [[1,2,2],[2,2,1]], follower cost
// (-1,-2,-2) and leader cost (-3,-2,-1).
inline FollowerProblem cube_follower() {
  std::vector<IntPoint> points;
  for (std::int64_t a = 0; a <= 3; ++a)
    for (std::int64_t b = 0; b <= 3; ++b)
      for (std::int64_t c = 0; c <= 3; ++c) points.push_back({a, b, c});
  return make_follower_problem(
      {vec({"1", "2", "2"}), vec({"2", "2", "1"})}, vec({"-1", "-2", "-2"}),
      vec({"-3", "-2", "-1"}), std::move(points));
}

// Two-point chain: points {0,1}, W = T = leader cost = 1, follower cost -1.
// The optimistic value is +inf below 0, then 0 on [0,1), then 1.
inline FollowerProblem two_step_follower() {
  return make_follower_problem({vec({"1"})}, vec({"-1"}), vec({"1"}),
                               {{0}, {1}});
}

inline Polyhedron interval_polyhedron(const Rational& lo, const Rational& hi) {
  return Polyhedron{{vec({"1"}), vec({"-1"})}, {hi, -lo}};
}

// Scalar leader instance around the two-point chain, X = [0, 1].
inline LeaderInstance two_step_instance(const Rational& leader_objective) {
  return make_leader_instance({leader_objective}, {vec({"1"})},
                              interval_polyhedron(rat("0"), rat("1")),
                              two_step_follower());
}

// Scalar leader instance around the 1-D six-point fixture, X = [0, 10].
inline LeaderInstance six_point_instance_1d(const Rational& leader_objective) {
  return make_leader_instance({leader_objective}, {vec({"1"})},
                              interval_polyhedron(rat("0"), rat("10")),
                              six_point_follower_1d());
}

inline Measure unit_box_uniform(std::size_t dim = 1) {
  return Measure::box_uniform(RationalVector(dim, Rational(0)),
                              RationalVector(dim, Rational(1)));
}

// ---- independent oracles -------------------------------------------------

// Membership in a region straight from its defining logic: every active
// point is feasible at t and every other point violates some row. Used as an
// implementation-independent cross-check of the cell representation.
inline bool region_defining_predicate(const FollowerProblem& fp,
                                      const std::vector<std::size_t>& active,
                                      const RationalVector& t) {
  std::set<std::size_t> active_set(active.begin(), active.end());
  for (std::size_t i = 0; i < fp.size(); ++i) {
    bool feasible = true;
    for (std::size_t j = 0; j < fp.rhs_dim && feasible; ++j)
      feasible = fp.point_image[i][j] <= t[j];
    if (feasible != (active_set.count(i) > 0)) return false;
  }
  return true;
}

// Sorted distinct breakpoints per coordinate, computed directly from the
// point images (no partition machinery involved).
inline std::vector<std::vector<Rational>> raw_levels(const FollowerProblem& fp) {
  std::vector<std::vector<Rational>> levels(fp.rhs_dim);
  for (std::size_t j = 0; j < fp.rhs_dim; ++j) {
    std::set<Rational> distinct;
    for (std::size_t i = 0; i < fp.size(); ++i)
      distinct.insert(fp.point_image[i][j]);
    levels[j].assign(distinct.begin(), distinct.end());
  }
  return levels;
}

// Random parameter point biased toward breakpoints: with some probability a
// coordinate sits exactly on a random level, otherwise it is a dyadic draw
// from [min - 1, max + 1].
inline RationalVector random_parameter(const FollowerProblem& fp,
                                       const CounterRng& rng,
                                       std::uint64_t& counter) {
  auto levels = raw_levels(fp);
  RationalVector t(fp.rhs_dim);
  for (std::size_t j = 0; j < fp.rhs_dim; ++j) {
    const auto& lv = levels[j];
    double mode = rng.uniform01(counter++);
    if (mode < 0.25) {
      t[j] = lv[rng.bits(counter++) % lv.size()];
    } else if (mode < 0.4) {
      t[j] = lv[rng.bits(counter++) % lv.size()] + Rational(1, 97);
    } else {
      Rational span = lv.back() - lv.front() + 2;
      t[j] = lv.front() - 1 + rng.uniform_rational(counter++) * span;
    }
  }
  return t;
}

// Random follower problem at desk scale: dimension <= 3, at most max_points
// distinct integer points, small rational data.
inline FollowerProblem random_follower(std::uint64_t seed, std::size_t rhs_dim,
                                       std::size_t var_dim,
                                       std::size_t max_points) {
  CounterRng rng(seed);
  std::uint64_t c = 0;
  auto small_rational = [&] {
    long num = static_cast<long>(rng.bits(c++) % 9) - 4;
    long den = 1 + static_cast<long>(rng.bits(c++) % 3);
    return Rational(num, den);
  };
  RationalMatrix w(rhs_dim, RationalVector(var_dim));
  for (auto& row : w) {
    bool nonzero = false;
    for (auto& entry : row) {
      entry = small_rational();
      nonzero = nonzero || entry != 0;
    }
    if (!nonzero) row[0] = 1;
  }
  RationalVector d(var_dim), q(var_dim);
  for (auto& entry : d) entry = small_rational();
  for (auto& entry : q) entry = small_rational();
  std::set<IntPoint> points;
  std::size_t want = 2 + rng.bits(c++) % (max_points - 1);
  while (points.size() < want) {
    IntPoint p(var_dim);
    for (auto& coord : p)
      coord = static_cast<std::int64_t>(rng.bits(c++) % 9) - 4;
    points.insert(std::move(p));
  }
  return make_follower_problem(std::move(w), std::move(d), std::move(q),
                               {points.begin(), points.end()});
}

// ---- cell-union comparison helpers ----------------------------------------

inline std::size_t flat_id_of_cell(const RegionPartition& part, const Cell& cell) {
  return *part.flat_index_of(cell.lower);
}

inline std::set<std::size_t> flat_ids(const RegionPartition& part,
                                      const std::vector<Cell>& cells) {
  std::set<std::size_t> ids;
  for (const auto& cell : cells) ids.insert(flat_id_of_cell(part, cell));
  return ids;
}

// Decomposes a threshold-aligned box (upper sides may be "inf") into grid
// cell ids, so printed region boxes can be compared as exact cell unions.
inline std::set<std::size_t> box_flat_ids(const RegionPartition& part,
                                          const std::vector<const char*>& lo,
                                          const std::vector<const char*>& hi) {
  const ThresholdGrid& grid = part.grid();
  const std::size_t dim = grid.dim();
  std::vector<std::size_t> first(dim), last(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    Rational lo_j = rat(lo[j]);
    auto p = grid.interval_index(j, lo_j);
    if (!p || grid.levels[j][*p] != lo_j)
      throw std::runtime_error("box side is not a breakpoint");
    first[j] = *p;
    if (std::string(hi[j]) == "inf") {
      last[j] = grid.levels[j].size() - 1;
    } else {
      Rational hi_j = rat(hi[j]);
      auto ph = grid.interval_index(j, hi_j);
      if (!ph || grid.levels[j][*ph] != hi_j)
        throw std::runtime_error("box side is not a breakpoint");
      last[j] = *ph - 1;  // [lo, hi) ends just below the hi breakpoint
    }
  }
  std::set<std::size_t> ids;
  std::vector<std::size_t> idx = first;
  while (true) {
    std::size_t flat = 0, stride = 1;
    for (std::size_t j = dim; j-- > 0;) {
      flat += idx[j] * stride;
      stride *= grid.levels[j].size();
    }
    ids.insert(flat);
    std::size_t j = dim;
    bool done = true;
    while (j-- > 0) {
      if (++idx[j] <= last[j]) {
        done = false;
        break;
      }
      idx[j] = first[j];
    }
    if (done) break;
  }
  return ids;
}

inline std::set<std::size_t> region_flat_ids(const Region& region) {
  return {region.cells.begin(), region.cells.end()};
}

inline std::string data_file(const std::string& name) {
  return std::string(BSILP_TEST_DATA_DIR) + "/" + name;
}

}  // namespace test_support
