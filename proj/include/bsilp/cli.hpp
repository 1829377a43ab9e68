#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bsilp/instance_io.hpp"
#include "bsilp/stability.hpp"

namespace bsilp::cli {

// One parsed invocation: command name, instance, output destination, seed,
// and the remaining per-command flags as strings. Unknown flags are rejected
// by the front end before a CommandSpec is built.
struct CommandSpec {
  std::string command;
  std::string instance_path;
  std::string output_path;  // empty writes to stdout
  std::uint64_t seed = 0;
  std::map<std::string, std::string> flags;
};

namespace detail {

inline std::string flag(const CommandSpec& spec, const std::string& key,
                        const std::string& fallback = "") {
  auto it = spec.flags.find(key);
  return it == spec.flags.end() ? fallback : it->second;
}

inline std::string require_flag(const CommandSpec& spec, const std::string& key) {
  auto it = spec.flags.find(key);
  if (it == spec.flags.end() || it->second.empty())
    throw ValidationError("missing required flag --" + key);
  return it->second;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    auto begin = item.find_first_not_of(" \t");
    auto end = item.find_last_not_of(" \t");
    out.push_back(begin == std::string::npos
                      ? std::string()
                      : item.substr(begin, end - begin + 1));
  }
  return out;
}

inline RationalVector parse_vector(const std::string& text, const std::string& what) {
  RationalVector out;
  for (const auto& item : split(text, ',')) {
    auto r = try_parse_rational(item);
    if (!r) throw ValidationError(what + ": cannot parse '" + item + "'");
    out.push_back(*r);
  }
  if (out.empty()) throw ValidationError(what + ": empty vector");
  return out;
}

// "lo1,hi1;lo2,hi2;..." one lo,hi pair per axis.
inline BoxBounds parse_box(const std::string& text) {
  BoxBounds box;
  for (const auto& pair : split(text, ';')) {
    RationalVector bounds = parse_vector(pair, "box");
    if (bounds.size() != 2)
      throw ValidationError("box: each axis needs exactly 'lo,hi'");
    box.lo.push_back(bounds[0]);
    box.hi.push_back(bounds[1]);
  }
  return box;
}

inline std::size_t parse_size(const std::string& text, const std::string& what) {
  try {
    return static_cast<std::size_t>(std::stoull(text));
  } catch (...) {
    throw ValidationError(what + ": cannot parse '" + text + "' as a count");
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write output file '" + path + "'");
  out << text;
}

inline std::string hash_string(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline nlohmann::json cell_to_json(const Cell& cell) {
  nlohmann::json lo = nlohmann::json::array();
  nlohmann::json hi = nlohmann::json::array();
  for (std::size_t j = 0; j < cell.lower.size(); ++j) {
    lo.push_back(format_rational(cell.lower[j]));
    hi.push_back(cell.upper[j].str());
  }
  return {{"lo", std::move(lo)}, {"hi", std::move(hi)}};
}

inline nlohmann::json distribution_to_json(const OutcomeDistribution& dist) {
  nlohmann::json out;
  out["values"] = dist.values;
  out["probs"] = dist.probs;
  out["source"] =
      dist.source == OutcomeDistribution::Source::exact ? "exact" : "monte_carlo";
  if (dist.source == OutcomeDistribution::Source::monte_carlo) {
    out["samples"] = dist.sample_count;
    out["seed"] = dist.seed;
  }
  return out;
}

inline RiskSpec risk_for_run(const InstanceBundle& bundle, const CommandSpec& spec) {
  std::string text = flag(spec, "risk");
  if (text.empty()) return bundle.risk;
  // "kind" or "kind:param" (quantile level or excess threshold).
  RiskSpec out = bundle.risk;
  auto parts = split(text, ':');
  const std::string& kind = parts[0];
  if (kind == "expectation") out.kind = RiskKind::expectation;
  else if (kind == "var") out.kind = RiskKind::value_at_risk;
  else if (kind == "cvar") out.kind = RiskKind::cvar;
  else if (kind == "excess_probability") out.kind = RiskKind::excess_probability;
  else if (kind == "expected_excess") out.kind = RiskKind::expected_excess;
  else if (kind == "mean_upper_semideviation")
    out.kind = RiskKind::mean_upper_semideviation;
  else throw ValidationError("unknown risk kind '" + kind + "'");
  if (parts.size() > 1) {
    double value = std::stod(parts[1]);
    if (out.kind == RiskKind::value_at_risk || out.kind == RiskKind::cvar)
      out.alpha = value;
    else out.eta = value;
  }
  validate(out);
  return out;
}

inline std::string risk_kind_name(RiskKind kind) {
  switch (kind) {
    case RiskKind::expectation: return "expectation";
    case RiskKind::value_at_risk: return "var";
    case RiskKind::cvar: return "cvar";
    case RiskKind::excess_probability: return "excess_probability";
    case RiskKind::expected_excess: return "expected_excess";
    case RiskKind::mean_upper_semideviation: return "mean_upper_semideviation";
  }
  return "?";
}

inline const Measure& require_measure(const InstanceBundle& bundle) {
  if (!bundle.measure)
    throw ValidationError("instance file declares no measure");
  return *bundle.measure;
}

inline int run_partition(const InstanceBundle& bundle, const CommandSpec& spec) {
  std::size_t limit =
      parse_size(flag(spec, "limit", "10000000"), "limit");
  RegionPartition part = build_partition(bundle.instance.follower, limit);

  nlohmann::json doc;
  doc["command"] = "partition";
  doc["instance_hash"] = hash_string(bundle.source_hash);
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : part.grid().levels) {
    nlohmann::json axis = nlohmann::json::array();
    for (const auto& v : lv) axis.push_back(format_rational(v));
    levels.push_back(std::move(axis));
  }
  doc["grid_levels"] = std::move(levels);
  doc["region_count"] = part.regions().size();
  nlohmann::json regions = nlohmann::json::array();
  for (std::size_t k = 0; k < part.regions().size(); ++k) {
    const Region& region = part.regions()[k];
    nlohmann::json r;
    r["id"] = k;
    r["active"] = region.active;
    r["follower_argmin"] = region.follower_argmin;
    r["choice"] = region.choice;
    r["follower_value"] = format_rational(region.follower_value);
    r["leader_value"] = format_rational(region.leader_value);
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : part.cells_of(region)) cells.push_back(cell_to_json(cell));
    r["cells"] = std::move(cells);
    regions.push_back(std::move(r));
  }
  doc["regions"] = std::move(regions);
  write_text(spec.output_path, doc.dump(2) + "\n");

  // Optional 2-D region map for plotting: one row per cell with its corners.
  std::string map_path = flag(spec, "map");
  if (!map_path.empty()) {
    if (part.grid().dim() != 2)
      throw ValidationError("--map needs a two-dimensional parameter space");
    std::ostringstream csv;
    csv << "region,lo1,hi1,lo2,hi2\n";
    for (std::size_t k = 0; k < part.regions().size(); ++k)
      for (const auto& cell : part.cells_of(part.regions()[k])) {
        csv << k;
        for (std::size_t j = 0; j < 2; ++j)
          csv << ',' << format_double(to_double(cell.lower[j])) << ','
              << format_double(cell.upper[j].as_double());
        csv << '\n';
      }
    write_text(map_path, csv.str());
  }
  return 0;
}

inline int run_eval(const InstanceBundle& bundle, const CommandSpec& spec) {
  const Measure& measure = require_measure(bundle);
  RationalVector x = parse_vector(require_flag(spec, "x"), "x");
  RiskSpec risk = risk_for_run(bundle, spec);
  RegionPartition part = build_partition(bundle.instance.follower);
  OutcomeDistribution dist = outcome_distribution(
      bundle.instance, part, measure, x, risk.compose == Compose::inside);
  double value = evaluate_risk(dist, risk);
  if (risk.compose == Compose::outside)
    value += to_double(dot(bundle.instance.objective, x));

  nlohmann::json doc;
  doc["command"] = "eval";
  doc["instance_hash"] = hash_string(bundle.source_hash);
  nlohmann::json xs = nlohmann::json::array();
  for (const auto& v : x) xs.push_back(format_rational(v));
  doc["x"] = std::move(xs);
  doc["leader_cost"] = to_double(dot(bundle.instance.objective, x));
  doc["distribution"] = distribution_to_json(dist);
  doc["risk"] = {{"kind", risk_kind_name(risk.kind)},
                 {"compose", risk.compose == Compose::inside ? "inside" : "outside"},
                 {"value", value}};
  write_text(spec.output_path, doc.dump(2) + "\n");
  return 0;
}

inline int run_mc(const InstanceBundle& bundle, const CommandSpec& spec) {
  const Measure& measure = require_measure(bundle);
  RationalVector x = parse_vector(require_flag(spec, "x"), "x");
  RiskSpec risk = risk_for_run(bundle, spec);
  std::size_t count = parse_size(require_flag(spec, "count"), "count");
  McEstimate est = risk_value_mc(bundle.instance, measure, x, risk, count, spec.seed);

  nlohmann::json doc;
  doc["command"] = "mc";
  doc["instance_hash"] = hash_string(bundle.source_hash);
  nlohmann::json xs = nlohmann::json::array();
  for (const auto& v : x) xs.push_back(format_rational(v));
  doc["x"] = std::move(xs);
  doc["risk"] = {{"kind", risk_kind_name(risk.kind)},
                 {"estimate", est.estimate},
                 {"std_error", est.std_error}};
  doc["distribution"] = distribution_to_json(est.dist);
  write_text(spec.output_path, doc.dump(2) + "\n");
  return 0;
}

inline int run_feasible(const InstanceBundle& bundle, const CommandSpec& spec) {
  const Measure& measure = require_measure(bundle);
  RationalVector x = parse_vector(require_flag(spec, "x"), "x");
  RegionPartition part = build_partition(bundle.instance.follower);
  FeasibilityVerdict verdict = induced_feasible(bundle.instance, part, measure, x);

  nlohmann::json doc;
  doc["command"] = "feasible";
  doc["instance_hash"] = hash_string(bundle.source_hash);
  doc["in_x"] = verdict.in_polyhedron;
  doc["in_fz"] = verdict.in_induced;
  if (verdict.witness) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& v : *verdict.witness) w.push_back(format_rational(v));
    doc["witness"] = std::move(w);
  } else {
    doc["witness"] = nullptr;
  }
  write_text(spec.output_path, doc.dump(2) + "\n");
  return 0;
}

inline int run_fz_map(const InstanceBundle& bundle, const CommandSpec& spec) {
  const Measure& measure = require_measure(bundle);
  BoxBounds box = parse_box(require_flag(spec, "box"));
  std::size_t resolution = parse_size(require_flag(spec, "resolution"), "resolution");
  RegionPartition part = build_partition(bundle.instance.follower);
  auto scan = induced_feasible_scan(bundle.instance, part, measure, box, resolution);

  std::ostringstream csv;
  for (std::size_t j = 0; j < box.lo.size(); ++j) csv << 'x' << (j + 1) << ',';
  csv << "in_x,in_fz\n";
  for (const auto& [x, verdict] : scan) {
    for (const auto& v : x) csv << format_double(to_double(v)) << ',';
    csv << (verdict.in_polyhedron ? 1 : 0) << ',' << (verdict.in_induced ? 1 : 0)
        << '\n';
  }
  write_text(spec.output_path, csv.str());
  return 0;
}

inline int run_phi_curve(const InstanceBundle& bundle, const CommandSpec& spec) {
  RationalVector start = parse_vector(require_flag(spec, "start"), "start");
  RationalVector end = parse_vector(require_flag(spec, "end"), "end");
  std::size_t samples = parse_size(require_flag(spec, "samples"), "samples");
  auto curve = value_curve(bundle.instance.follower, start, end, samples);

  std::ostringstream csv;
  csv << "parameter,psi,phi\n";
  for (const auto& row : curve)
    csv << format_double(to_double(row.parameter)) << ','
        << format_double(row.follower_value.as_double()) << ','
        << format_double(row.leader_value.as_double()) << '\n';
  write_text(spec.output_path, csv.str());
  return 0;
}

inline int run_solve(const InstanceBundle& bundle, const CommandSpec& spec) {
  const Measure& measure = require_measure(bundle);
  RiskSpec risk = risk_for_run(bundle, spec);
  RegionPartition part = build_partition(bundle.instance.follower);
  McOptions mc{parse_size(flag(spec, "mc-count", "0"), "mc-count"), spec.seed};

  const std::string method = flag(spec, "method", "grid");
  SolveReport report;
  if (method == "grid") {
    BoxBounds box = parse_box(require_flag(spec, "box"));
    std::size_t resolution = parse_size(require_flag(spec, "resolution"), "resolution");
    report = solve_grid(bundle.instance, part, measure, risk, box, resolution, mc);
  } else if (method == "pattern") {
    RationalVector x0 = parse_vector(require_flag(spec, "x0"), "x0");
    auto step0 = try_parse_rational(flag(spec, "step0", "1/2"));
    auto shrink = try_parse_rational(flag(spec, "shrink", "1/2"));
    if (!step0 || !shrink) throw ValidationError("cannot parse step0/shrink");
    std::size_t budget = parse_size(flag(spec, "budget", "10000"), "budget");
    report = solve_pattern(bundle.instance, part, measure, risk, x0, *step0,
                           *shrink, budget, mc);
  } else {
    throw ValidationError("--method must be 'grid' or 'pattern'");
  }

  nlohmann::json doc;
  doc["command"] = "solve";
  doc["instance_hash"] = hash_string(bundle.source_hash);
  doc["method"] = method;
  switch (report.status) {
    case SolveReport::Status::converged: doc["status"] = "converged"; break;
    case SolveReport::Status::budget_exhausted:
      doc["status"] = "budget_exhausted";
      break;
    case SolveReport::Status::infeasible: doc["status"] = "infeasible"; break;
  }
  doc["evaluations"] = report.evaluations;
  if (report.status != SolveReport::Status::infeasible) {
    nlohmann::json xs = nlohmann::json::array();
    for (const auto& v : report.best_x) xs.push_back(format_rational(v));
    doc["best_x"] = std::move(xs);
    doc["best_value"] = report.best_value;
  }
  write_text(spec.output_path, doc.dump(2) + "\n");

  std::string trace_path = flag(spec, "trace");
  if (!trace_path.empty()) {
    std::ostringstream csv;
    for (std::size_t j = 0; j < bundle.instance.dim; ++j) csv << 'x' << (j + 1) << ',';
    csv << "value\n";
    for (const auto& [x, value] : report.trace) {
      for (const auto& v : x) csv << format_double(to_double(v)) << ',';
      csv << format_double(value) << '\n';
    }
    write_text(trace_path, csv.str());
  }
  return 0;
}

inline int run_stability(const InstanceBundle& bundle, const CommandSpec& spec) {
  const Measure& measure = require_measure(bundle);
  RationalVector x = parse_vector(require_flag(spec, "x"), "x");
  RiskSpec risk = risk_for_run(bundle, spec);
  BoxBounds box = parse_box(require_flag(spec, "box"));
  std::size_t resolution = parse_size(require_flag(spec, "resolution"), "resolution");
  std::size_t mc_count = parse_size(flag(spec, "mc-count", "0"), "mc-count");
  RegionPartition part = build_partition(bundle.instance.follower);

  PerturbationSequence seq;
  const std::string mode = flag(spec, "mode", "empirical");
  if (mode == "empirical") {
    std::vector<std::size_t> ns;
    for (const auto& item : detail::split(require_flag(spec, "counts"), ','))
      ns.push_back(parse_size(item, "counts"));
    seq = empirical_sequence(measure, ns, spec.seed);
  } else if (mode == "contamination") {
    RationalVector noise_point =
        parse_vector(require_flag(spec, "noise-point"), "noise-point");
    std::vector<double> eps;
    for (const auto& item : detail::split(require_flag(spec, "eps"), ','))
      eps.push_back(std::stod(item));
    seq = contamination_sequence(measure, Measure::point_mass(noise_point), eps);
  } else {
    throw ValidationError("--mode must be 'empirical' or 'contamination'");
  }

  ContinuityTable table = continuity_diagnostic(bundle.instance, part, risk, x, seq,
                                                box, resolution, mc_count, spec.seed);
  if (!table.warning.empty()) std::cerr << "warning: " << table.warning << "\n";
  std::ostringstream csv;
  csv << "label,q_deviation,value_deviation,solution_excess\n";
  for (const auto& row : table.rows)
    csv << row.label << ',' << format_double(row.q_deviation) << ','
        << format_double(row.value_deviation) << ','
        << format_double(row.solution_excess) << '\n';
  write_text(spec.output_path, csv.str());
  return 0;
}

inline int run_holder(const InstanceBundle& bundle, const CommandSpec& spec) {
  const Measure& measure = require_measure(bundle);
  RationalVector x0 = parse_vector(require_flag(spec, "x0"), "x0");
  RiskSpec risk = risk_for_run(bundle, spec);
  std::vector<Rational> radii;
  for (const auto& item : detail::split(require_flag(spec, "radii"), ',')) {
    auto r = try_parse_rational(item);
    if (!r) throw ValidationError("radii: cannot parse '" + item + "'");
    radii.push_back(*r);
  }
  std::size_t mc_count = parse_size(flag(spec, "mc-count", "0"), "mc-count");
  RegionPartition part = build_partition(bundle.instance.follower);
  HolderFit fit = holder_fit(bundle.instance, part, measure, risk, x0, radii,
                             mc_count, spec.seed);

  nlohmann::json doc;
  doc["command"] = "holder";
  doc["instance_hash"] = hash_string(bundle.source_hash);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [radius, deviation] : fit.table)
    rows.push_back({{"radius", radius}, {"deviation", deviation}});
  doc["rows"] = std::move(rows);
  doc["defined"] = fit.defined;
  if (fit.defined) {
    doc["exponent"] = fit.exponent;
    doc["constant"] = fit.constant;
  }
  write_text(spec.output_path, doc.dump(2) + "\n");
  return 0;
}

}  // namespace detail

// Executes one parsed command. Exit codes: 0 success, 1 validation or parse
// failure, 2 infeasibility, 3 resource guard.
inline int run(const CommandSpec& spec) {
  try {
    InstanceBundle bundle = load_instance(spec.instance_path);
    if (spec.command == "partition") return detail::run_partition(bundle, spec);
    if (spec.command == "eval") return detail::run_eval(bundle, spec);
    if (spec.command == "mc") return detail::run_mc(bundle, spec);
    if (spec.command == "feasible") return detail::run_feasible(bundle, spec);
    if (spec.command == "fz-map") return detail::run_fz_map(bundle, spec);
    if (spec.command == "phi-curve") return detail::run_phi_curve(bundle, spec);
    if (spec.command == "solve") return detail::run_solve(bundle, spec);
    if (spec.command == "stability") return detail::run_stability(bundle, spec);
    if (spec.command == "holder") return detail::run_holder(bundle, spec);
    throw ValidationError("unknown command '" + spec.command + "'");
  } catch (const ResourceLimitError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const InfeasibleError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}

}  // namespace bsilp::cli
