#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bsilp/measure.hpp"
#include "bsilp/model.hpp"
#include "bsilp/risk.hpp"

namespace bsilp {

// Everything an instance file carries: the validated problem data plus the
// optional noise measure and risk functional, and a content hash for
// provenance in reports.
struct InstanceBundle {
  LeaderInstance instance;
  std::optional<Measure> measure;
  RiskSpec risk;
  std::uint64_t source_hash = 0;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace io_detail {

using nlohmann::json;

// Exact numbers only: JSON integers or quoted literals ("0.5", "-7/3").
// Unquoted decimals would arrive as binary64 and are rejected.
inline Rational rational_field(const json& v, const std::string& where) {
  if (v.is_number_integer())
    return Rational(static_cast<long long>(v.get<std::int64_t>()));
  if (v.is_string()) {
    if (auto r = try_parse_rational(v.get<std::string>())) return *r;
    throw ValidationError(where + ": cannot parse '" + v.get<std::string>() +
                          "' as an exact number");
  }
  if (v.is_number_float())
    throw ValidationError(where + ": decimal literals must be quoted strings "
                          "to stay exact");
  throw ValidationError(where + ": expected a number");
}

inline RationalVector rational_vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array");
  RationalVector out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(rational_field(e, where));
  return out;
}

inline RationalMatrix rational_matrix(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array of rows");
  RationalMatrix out;
  out.reserve(v.size());
  for (const auto& row : v) out.push_back(rational_vector(row, where));
  return out;
}

inline double double_field(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + ": expected a number");
  return v.get<double>();
}

inline Measure measure_from_json(const json& v) {
  if (!v.is_object() || !v.contains("kind"))
    throw ValidationError("measure: expected an object with a 'kind' field");
  const std::string kind = v.at("kind").get<std::string>();
  if (kind == "discrete") {
    std::vector<RationalVector> atoms;
    std::vector<double> weights;
    for (const auto& atom : v.at("atoms")) {
      atoms.push_back(rational_vector(atom.at("point"), "measure.atoms.point"));
      weights.push_back(double_field(atom.at("weight"), "measure.atoms.weight"));
    }
    return Measure::discrete(std::move(atoms), std::move(weights));
  }
  if (kind == "box_uniform")
    return Measure::box_uniform(rational_vector(v.at("lo"), "measure.lo"),
                                rational_vector(v.at("hi"), "measure.hi"));
  if (kind == "mixture") {
    std::vector<Measure> components;
    std::vector<double> weights;
    for (const auto& comp : v.at("components")) {
      components.push_back(measure_from_json(comp.at("measure")));
      weights.push_back(double_field(comp.at("weight"), "measure.components.weight"));
    }
    return Measure::mixture(std::move(components), std::move(weights));
  }
  if (kind == "sampler") return Measure::sampler(v.at("name").get<std::string>());
  throw ValidationError("measure: unknown kind '" + kind + "'");
}

inline RiskSpec risk_from_json(const json& v) {
  RiskSpec spec;
  if (!v.is_object() || !v.contains("kind"))
    throw ValidationError("risk: expected an object with a 'kind' field");
  const std::string kind = v.at("kind").get<std::string>();
  if (kind == "expectation") spec.kind = RiskKind::expectation;
  else if (kind == "var") spec.kind = RiskKind::value_at_risk;
  else if (kind == "cvar") spec.kind = RiskKind::cvar;
  else if (kind == "excess_probability") spec.kind = RiskKind::excess_probability;
  else if (kind == "expected_excess") spec.kind = RiskKind::expected_excess;
  else if (kind == "mean_upper_semideviation")
    spec.kind = RiskKind::mean_upper_semideviation;
  else throw ValidationError("risk: unknown kind '" + kind + "'");
  if (v.contains("alpha")) spec.alpha = double_field(v.at("alpha"), "risk.alpha");
  if (v.contains("eta")) spec.eta = double_field(v.at("eta"), "risk.eta");
  if (v.contains("order")) spec.order = v.at("order").get<int>();
  if (v.contains("coefficient"))
    spec.coefficient = double_field(v.at("coefficient"), "risk.coefficient");
  if (v.contains("compose")) {
    const std::string c = v.at("compose").get<std::string>();
    if (c == "inside") spec.compose = Compose::inside;
    else if (c == "outside") spec.compose = Compose::outside;
    else throw ValidationError("risk: compose must be 'inside' or 'outside'");
  }
  validate(spec);
  return spec;
}

// Rationals serialize as JSON integers when integral and small enough,
// "p/q" strings otherwise; both forms parse back exactly.
inline json rational_to_json(const Rational& r) {
  if (denominator(r) == 1 && numerator(r) >= std::numeric_limits<std::int64_t>::min() &&
      numerator(r) <= std::numeric_limits<std::int64_t>::max())
    return json(numerator(r).convert_to<std::int64_t>());
  return json(format_rational(r));
}

inline json vector_to_json(const RationalVector& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(rational_to_json(e));
  return out;
}

inline json matrix_to_json(const RationalMatrix& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(vector_to_json(row));
  return out;
}

inline json measure_to_json(const Measure& m) {
  json out;
  switch (m.kind) {
    case MeasureKind::discrete: {
      out["kind"] = "discrete";
      json atoms = json::array();
      for (std::size_t i = 0; i < m.atoms.size(); ++i)
        atoms.push_back({{"point", vector_to_json(m.atoms[i])},
                         {"weight", m.weights[i]}});
      out["atoms"] = std::move(atoms);
      break;
    }
    case MeasureKind::box_uniform:
      out["kind"] = "box_uniform";
      out["lo"] = vector_to_json(m.lo);
      out["hi"] = vector_to_json(m.hi);
      break;
    case MeasureKind::mixture: {
      out["kind"] = "mixture";
      json comps = json::array();
      for (std::size_t i = 0; i < m.components.size(); ++i)
        comps.push_back({{"weight", m.mix_weights[i]},
                         {"measure", measure_to_json(m.components[i])}});
      out["components"] = std::move(comps);
      break;
    }
    case MeasureKind::sampler:
      out["kind"] = "sampler";
      out["name"] = m.sampler_name;
      break;
  }
  return out;
}

inline json risk_to_json(const RiskSpec& spec) {
  json out;
  switch (spec.kind) {
    case RiskKind::expectation: out["kind"] = "expectation"; break;
    case RiskKind::value_at_risk: out["kind"] = "var"; break;
    case RiskKind::cvar: out["kind"] = "cvar"; break;
    case RiskKind::excess_probability: out["kind"] = "excess_probability"; break;
    case RiskKind::expected_excess: out["kind"] = "expected_excess"; break;
    case RiskKind::mean_upper_semideviation:
      out["kind"] = "mean_upper_semideviation";
      break;
  }
  out["alpha"] = spec.alpha;
  out["eta"] = spec.eta;
  out["order"] = spec.order;
  out["coefficient"] = spec.coefficient;
  out["compose"] = spec.compose == Compose::inside ? "inside" : "outside";
  return out;
}

inline InstanceBundle parse_instance_object(const nlohmann::json& doc,
                                            const std::string& text);

}  // namespace io_detail

// Parses the version-1 instance schema. See README for the field list.
inline InstanceBundle parse_instance_text(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("instance file is not valid JSON: ") +
                          err.what());
  }
  if (!doc.is_object()) throw ValidationError("instance file must be a JSON object");
  try {
    return io_detail::parse_instance_object(doc, text);
  } catch (const json::exception& err) {
    throw ValidationError(std::string("instance file: ") + err.what());
  }
}

namespace io_detail {

inline InstanceBundle parse_instance_object(const nlohmann::json& doc,
                                            const std::string& text) {
  using nlohmann::json;
  if (doc.value("format", 0) != 1)
    throw ValidationError("instance file must declare \"format\": 1");

  auto require = [&](const char* key) -> const json& {
    if (!doc.contains(key))
      throw ValidationError(std::string("missing field '") + key + "'");
    return doc.at(key);
  };

  const auto n = require("n").get<std::int64_t>();
  const auto m = require("m").get<std::int64_t>();
  const auto s = require("s").get<std::int64_t>();
  if (n < 1 || m < 1 || s < 1)
    throw ValidationError("dimensions n, m, s must be positive");

  RationalMatrix w = rational_matrix(require("W"), "W");
  RationalVector d = rational_vector(require("d"), "d");
  RationalVector q = rational_vector(require("q"), "q");
  if (w.size() != static_cast<std::size_t>(s))
    throw ValidationError("W must have s rows");

  std::vector<IntPoint> points;
  for (const auto& p : require("points")) {
    IntPoint point;
    for (const auto& coord : p) {
      if (!coord.is_number_integer())
        throw ValidationError("candidate point coordinates must be integers");
      point.push_back(coord.get<std::int64_t>());
    }
    points.push_back(std::move(point));
  }
  FollowerProblem follower = make_follower_problem(
      std::move(w), std::move(d), std::move(q), std::move(points));
  if (follower.var_dim != static_cast<std::size_t>(m))
    throw ValidationError("W column count must equal m");

  RationalVector c = rational_vector(require("c"), "c");
  if (c.size() != static_cast<std::size_t>(n))
    throw ValidationError("c must have length n");
  RationalMatrix t = rational_matrix(require("T"), "T");

  const auto& xblock = require("X");
  Polyhedron feasible{rational_matrix(xblock.at("A"), "X.A"),
                      rational_vector(xblock.at("b"), "X.b")};

  InstanceBundle bundle;
  bundle.instance = make_leader_instance(std::move(c), std::move(t),
                                         std::move(feasible), std::move(follower));
  if (doc.contains("measure")) {
    bundle.measure = measure_from_json(doc.at("measure"));
    if (bundle.measure->dim() != static_cast<std::size_t>(s))
      throw ValidationError("measure dimension must equal s");
  }
  if (doc.contains("risk")) bundle.risk = risk_from_json(doc.at("risk"));
  bundle.source_hash = fnv1a64(text);
  return bundle;
}

}  // namespace io_detail

inline InstanceBundle load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_text(buf.str());
}

inline nlohmann::json instance_to_json(const InstanceBundle& bundle) {
  using nlohmann::json;
  const LeaderInstance& inst = bundle.instance;
  json doc;
  doc["format"] = 1;
  doc["n"] = inst.dim;
  doc["m"] = inst.follower.var_dim;
  doc["s"] = inst.follower.rhs_dim;
  doc["c"] = io_detail::vector_to_json(inst.objective);
  doc["T"] = io_detail::matrix_to_json(inst.T);
  doc["W"] = io_detail::matrix_to_json(inst.follower.W);
  doc["d"] = io_detail::vector_to_json(inst.follower.follower_cost);
  doc["q"] = io_detail::vector_to_json(inst.follower.leader_cost);
  json points = json::array();
  for (const auto& p : inst.follower.points) {
    json row = json::array();
    for (auto coord : p) row.push_back(coord);
    points.push_back(std::move(row));
  }
  doc["points"] = std::move(points);
  doc["X"] = {{"A", io_detail::matrix_to_json(inst.feasible.A)},
              {"b", io_detail::vector_to_json(inst.feasible.b)}};
  if (bundle.measure) doc["measure"] = io_detail::measure_to_json(*bundle.measure);
  doc["risk"] = io_detail::risk_to_json(bundle.risk);
  return doc;
}

inline std::string serialize_instance(const InstanceBundle& bundle) {
  return instance_to_json(bundle).dump(2) + "\n";
}

}  // namespace bsilp
