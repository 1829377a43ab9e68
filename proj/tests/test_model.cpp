#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace bsilp;
using namespace test_support;

TEST_CASE("extended values order with infinity on top", "[model]") {
  ExtendedValue inf = ExtendedValue::infinity();
  ExtendedValue zero{Rational(0)};
  ExtendedValue minus{Rational(-100)};
  CHECK(inf == ExtendedValue::infinity());
  CHECK(zero < inf);
  CHECK(minus < zero);
  CHECK(inf > zero);
  CHECK_FALSE(inf < inf);
  CHECK(inf >= zero);
  CHECK(zero.str() == "0");
  CHECK(inf.str() == "inf");
}

TEST_CASE("follower problem validation", "[model]") {
  CHECK_THROWS_AS(make_follower_problem({vec({"1"})}, vec({"1"}), vec({"1"}), {}),
                  ValidationError);
  CHECK_THROWS_AS(
      make_follower_problem({vec({"1"})}, vec({"1"}), vec({"1"}), {{0}, {0}}),
      ValidationError);
  CHECK_THROWS_AS(
      make_follower_problem({vec({"1", "2"})}, vec({"1"}), vec({"1"}), {{0, 0}}),
      ValidationError);
  CHECK_THROWS_AS(
      make_follower_problem({vec({"1"})}, vec({"1"}), vec({"1"}), {{0, 1}}),
      ValidationError);
}

TEST_CASE("point images and costs are precomputed", "[model]") {
  FollowerProblem fp = six_point_follower_2d();
  REQUIRE(fp.size() == 6);
  // point 3 = (4,2): image (-4, 2), follower cost 4-2 = 2, leader cost 6
  CHECK(fp.point_image[3][0] == Rational(-4));
  CHECK(fp.point_image[3][1] == Rational(2));
  CHECK(fp.point_follower_cost[3] == Rational(2));
  CHECK(fp.point_leader_cost[3] == Rational(6));
}

TEST_CASE("leader instance validation", "[model]") {
  FollowerProblem fp = two_step_follower();
  CHECK_THROWS_AS(make_leader_instance({}, {vec({"1"})},
                                       interval_polyhedron(rat("0"), rat("1")), fp),
                  ValidationError);
  CHECK_THROWS_AS(make_leader_instance(vec({"1"}), {},
                                       interval_polyhedron(rat("0"), rat("1")), fp),
                  ValidationError);
  CHECK_THROWS_AS(
      make_leader_instance(vec({"1"}), {vec({"1", "2"})},
                           interval_polyhedron(rat("0"), rat("1")), fp),
      ValidationError);
}

TEST_CASE("instance files load with exact numbers", "[model]") {
  InstanceBundle cube = load_instance(data_file("cube_cost_conflict.json"));
  CHECK(cube.instance.follower.size() == 64);
  CHECK(cube.instance.follower.rhs_dim == 2);
  CHECK(cube.instance.follower.follower_cost == vec({"-1", "-2", "-2"}));
  CHECK(cube.instance.follower.leader_cost == vec({"-3", "-2", "-1"}));

  InstanceBundle chain = load_instance(data_file("two_step_uniform.json"));
  CHECK(chain.instance.follower.size() == 2);
  REQUIRE(chain.measure.has_value());
  CHECK(chain.measure->kind == MeasureKind::box_uniform);

  InstanceBundle sqrt_chain = load_instance(data_file("two_step_sqrt.json"));
  REQUIRE(sqrt_chain.measure.has_value());
  CHECK(sqrt_chain.measure->kind == MeasureKind::sampler);
  CHECK(sqrt_chain.measure->sampler_name == "sqrt_density_unit");
}

TEST_CASE("schema violations are rejected", "[model]") {
  const std::string ok = R"({"format":1,"n":1,"m":1,"s":1,"c":[0],"T":[[1]],
    "W":[[1]],"d":[-1],"q":[1],"points":[[0],[1]],
    "X":{"A":[[1],[-1]],"b":[1,0]}})";
  CHECK_NOTHROW(parse_instance_text(ok));

  SECTION("empty point list") {
    std::string bad = ok;
    bad.replace(bad.find("[[0],[1]]"), 9, "[]");
    CHECK_THROWS_AS(parse_instance_text(bad), ValidationError);
  }
  SECTION("non-integer point coordinate") {
    std::string bad = ok;
    bad.replace(bad.find("[[0],[1]]"), 9, "[[0],[0.5]]");
    CHECK_THROWS_AS(parse_instance_text(bad), ValidationError);
  }
  SECTION("unquoted decimal literal") {
    std::string bad = ok;
    bad.replace(bad.find("\"d\":[-1]"), 8, "\"d\":[-1.5]");
    CHECK_THROWS_AS(parse_instance_text(bad), ValidationError);
  }
  SECTION("quoted decimal literal is fine") {
    std::string good = ok;
    good.replace(good.find("\"d\":[-1]"), 8, "\"d\":[\"-1.5\"]");
    InstanceBundle bundle = parse_instance_text(good);
    CHECK(bundle.instance.follower.follower_cost[0] == Rational(-3, 2));
  }
  SECTION("missing format version") {
    CHECK_THROWS_AS(parse_instance_text(R"({"n":1})"), ValidationError);
  }
  SECTION("not JSON at all") {
    CHECK_THROWS_AS(parse_instance_text("not json"), ValidationError);
  }
  SECTION("dimension mismatch") {
    std::string bad = ok;
    bad.replace(bad.find("\"m\":1"), 5, "\"m\":2");
    CHECK_THROWS_AS(parse_instance_text(bad), ValidationError);
  }
}

TEST_CASE("serialization round-trips exactly", "[model]") {
  for (const char* name : {"ceilfloor_box.json", "six_points_1d.json",
                           "six_points_2d.json", "cube_cost_conflict.json",
                           "two_step_uniform.json", "two_step_sqrt.json"}) {
    InstanceBundle a = load_instance(data_file(name));
    InstanceBundle b = parse_instance_text(serialize_instance(a));
    CHECK(a.instance.objective == b.instance.objective);
    CHECK(a.instance.T == b.instance.T);
    CHECK(a.instance.feasible.A == b.instance.feasible.A);
    CHECK(a.instance.feasible.b == b.instance.feasible.b);
    CHECK(a.instance.follower.W == b.instance.follower.W);
    CHECK(a.instance.follower.follower_cost == b.instance.follower.follower_cost);
    CHECK(a.instance.follower.leader_cost == b.instance.follower.leader_cost);
    CHECK(a.instance.follower.points == b.instance.follower.points);
    REQUIRE(a.measure.has_value() == b.measure.has_value());
    if (a.measure) {
      CHECK(a.measure->kind == b.measure->kind);
      CHECK(a.measure->atoms == b.measure->atoms);
      CHECK(a.measure->weights == b.measure->weights);
      CHECK(a.measure->lo == b.measure->lo);
      CHECK(a.measure->hi == b.measure->hi);
      CHECK(a.measure->sampler_name == b.measure->sampler_name);
    }
    CHECK(a.risk.kind == b.risk.kind);
    CHECK(a.risk.alpha == b.risk.alpha);
    CHECK(a.risk.compose == b.risk.compose);
  }
}

namespace {

// Independent enumeration of the realized constant-value table: walk every
// combination of breakpoints (one per coordinate), evaluate the follower at
// the corner directly, and collect both values.
struct ValueTable {
  Rational follower_lo, follower_hi, leader_lo, leader_hi;
};

ValueTable brute_force_value_table(const FollowerProblem& fp) {
  auto levels = raw_levels(fp);
  std::vector<std::size_t> idx(fp.rhs_dim, 0);
  ValueTable table;
  bool first = true;
  while (true) {
    RationalVector corner(fp.rhs_dim);
    for (std::size_t j = 0; j < fp.rhs_dim; ++j) corner[j] = levels[j][idx[j]];
    ArgminReport rep = evaluate_follower(fp, corner);
    if (rep.follower_value.is_finite()) {
      const Rational& fv = rep.follower_value.value();
      const Rational& lv = rep.leader_value.value();
      if (first) {
        table = {fv, fv, lv, lv};
        first = false;
      } else {
        table.follower_lo = std::min(table.follower_lo, fv);
        table.follower_hi = std::max(table.follower_hi, fv);
        table.leader_lo = std::min(table.leader_lo, lv);
        table.leader_hi = std::max(table.leader_hi, lv);
      }
    }
    std::size_t j = fp.rhs_dim;
    bool done = true;
    while (j-- > 0) {
      if (++idx[j] < levels[j].size()) {
        done = false;
        break;
      }
      idx[j] = 0;
    }
    if (done) break;
  }
  return table;
}

}  // namespace

TEST_CASE("objective bounds on the two-point chain", "[model]") {
  LeaderInstance inst = two_step_instance(rat("0"));
  ObjectiveBounds bounds = objective_bounds(inst);
  CHECK(bounds.growth == 0.0);
  CHECK(bounds.offset == 1.0);
  CHECK(bounds.leader_lo == Rational(0));
  CHECK(bounds.leader_hi == Rational(1));
}

TEST_CASE("objective bounds with a single candidate point", "[model]") {
  FollowerProblem fp = make_follower_problem({vec({"1", "0"}), vec({"0", "1"})},
                                             vec({"2", "3"}), vec({"-1", "4"}),
                                             {{2, 5}});
  LeaderInstance inst = make_leader_instance(
      vec({"1"}), {vec({"1"}), vec({"0"})},
      interval_polyhedron(rat("0"), rat("1")), fp);
  ObjectiveBounds bounds = objective_bounds(inst);
  CHECK(bounds.leader_lo == bounds.leader_hi);
  CHECK(bounds.leader_lo == Rational(-2 + 20));  // -1*2 + 4*5
}

TEST_CASE("objective bounds on the cube instance match brute force", "[model]") {
  InstanceBundle bundle = load_instance(data_file("cube_cost_conflict.json"));
  ObjectiveBounds bounds = objective_bounds(bundle.instance);
  ValueTable table = brute_force_value_table(bundle.instance.follower);
  CHECK(bounds.leader_lo == table.leader_lo);
  CHECK(bounds.leader_hi == table.leader_hi);
  CHECK(bounds.follower_lo == table.follower_lo);
  CHECK(bounds.follower_hi == table.follower_hi);
  // Frozen from the brute-force enumeration: the all-feasible corner selects
  // the point (3,3,3), whose leader cost is -18; the origin-only region
  // gives 0.
  CHECK(bounds.leader_lo == Rational(-18));
  CHECK(bounds.leader_hi == Rational(0));
  CHECK(bounds.follower_lo == Rational(-15));
}

TEST_CASE("growth envelope brackets sampled outcomes", "[model]") {
  for (const char* name : {"six_points_1d.json", "cube_cost_conflict.json"}) {
    InstanceBundle bundle = load_instance(data_file(name));
    const LeaderInstance& inst = bundle.instance;
    ObjectiveBounds bounds = objective_bounds(inst);
    CounterRng rng(2024);
    std::uint64_t c = 0;
    std::size_t hits = 0;
    while (hits < 1000) {
      RationalVector x(inst.dim);
      for (auto& v : x) v = rng.uniform_rational(c++) * 8 - 2;
      RationalVector t = random_parameter(inst.follower, rng, c);
      ArgminReport rep = evaluate_follower(inst.follower, t);
      if (!rep.leader_value.is_finite()) continue;
      ++hits;
      // z is defined by t = Tx + z, so the outcome at (x, z) is exactly
      // objective'x + leader value at t.
      double outcome =
          to_double(dot(inst.objective, x)) + rep.leader_value.as_double();
      double norm_x = euclidean_norm(x);
      CHECK(std::abs(outcome) <= bounds.growth * norm_x + bounds.offset + 1e-9);
    }
  }
}
