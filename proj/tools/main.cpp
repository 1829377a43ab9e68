// Command-line front end. Each subcommand reads an instance file and writes
// a JSON report or a CSV table; identical inputs and seeds produce
// byte-identical outputs.

#include <CLI11.hpp>

#include "bsilp/cli.hpp"

namespace {

struct FlagSink {
  bsilp::cli::CommandSpec spec;

  void add_common(CLI::App* cmd) {
    cmd->add_option("-i,--instance", spec.instance_path, "instance JSON file")
        ->required();
    cmd->add_option("-o,--output", spec.output_path,
                    "output file (stdout when omitted)");
    cmd->add_option("--seed", spec.seed, "random seed (default 0)");
  }

  void add_flag_option(CLI::App* cmd, const std::string& name,
                       const std::string& help) {
    cmd->add_option_function<std::string>(
        "--" + name,
        [this, name](const std::string& value) { spec.flags[name] = value; }, help);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Analysis toolkit for optimistic bi-level stochastic linear programs "
      "with a finite integer lower level"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<FlagSink>> sinks;
  auto make_command = [&](const std::string& name,
                          const std::string& help) -> std::pair<CLI::App*, FlagSink*> {
    CLI::App* cmd = app.add_subcommand(name, help);
    sinks.push_back(std::make_unique<FlagSink>());
    FlagSink* sink = sinks.back().get();
    sink->spec.command = name;
    sink->add_common(cmd);
    return {cmd, sink};
  };

  {
    auto [cmd, sink] = make_command(
        "partition", "build the constant-value region decomposition");
    sink->add_flag_option(cmd, "limit", "cell enumeration budget (default 1e7)");
    sink->add_flag_option(cmd, "map", "also write a 2-D region map CSV here");
  }
  {
    auto [cmd, sink] =
        make_command("eval", "exact outcome law and risk value at a decision");
    sink->add_flag_option(cmd, "x", "decision vector, e.g. '1/2,0.25'");
    sink->add_flag_option(cmd, "risk", "risk override, e.g. 'cvar:0.95'");
  }
  {
    auto [cmd, sink] = make_command("mc", "Monte Carlo risk estimate at a decision");
    sink->add_flag_option(cmd, "x", "decision vector");
    sink->add_flag_option(cmd, "risk", "risk override, e.g. 'expectation'");
    sink->add_flag_option(cmd, "count", "sample count (>= 100)");
  }
  {
    auto [cmd, sink] =
        make_command("feasible", "membership in X and the induced feasible set");
    sink->add_flag_option(cmd, "x", "decision vector");
  }
  {
    auto [cmd, sink] = make_command("fz-map", "feasibility verdicts on a grid");
    sink->add_flag_option(cmd, "box", "scan box 'lo1,hi1;lo2,hi2;...'");
    sink->add_flag_option(cmd, "resolution", "grid points per axis (>= 2)");
  }
  {
    auto [cmd, sink] = make_command(
        "phi-curve", "value functions along a parameter segment, as CSV");
    sink->add_flag_option(cmd, "start", "segment start in parameter space");
    sink->add_flag_option(cmd, "end", "segment end in parameter space");
    sink->add_flag_option(cmd, "samples", "number of samples (>= 2)");
  }
  {
    auto [cmd, sink] = make_command("solve", "minimize the risk objective");
    sink->add_flag_option(cmd, "method", "'grid' (default) or 'pattern'");
    sink->add_flag_option(cmd, "box", "grid method: search box");
    sink->add_flag_option(cmd, "resolution", "grid method: points per axis");
    sink->add_flag_option(cmd, "x0", "pattern method: start point");
    sink->add_flag_option(cmd, "step0", "pattern method: initial step (default 1/2)");
    sink->add_flag_option(cmd, "shrink", "pattern method: shrink factor (default 1/2)");
    sink->add_flag_option(cmd, "budget", "pattern method: poll budget (default 1e4)");
    sink->add_flag_option(cmd, "mc-count", "Monte Carlo samples per evaluation");
    sink->add_flag_option(cmd, "risk", "risk override");
    sink->add_flag_option(cmd, "trace", "also write the evaluation trace CSV here");
  }
  {
    auto [cmd, sink] = make_command(
        "stability", "risk/solution deviations under measure perturbations");
    sink->add_flag_option(cmd, "x", "decision vector");
    sink->add_flag_option(cmd, "mode", "'empirical' (default) or 'contamination'");
    sink->add_flag_option(cmd, "counts", "empirical sample sizes, e.g. '100,1000'");
    sink->add_flag_option(cmd, "noise-point", "contamination: atom location");
    sink->add_flag_option(cmd, "eps", "contamination levels, e.g. '0.2,0.1'");
    sink->add_flag_option(cmd, "box", "localization box");
    sink->add_flag_option(cmd, "resolution", "localization grid resolution");
    sink->add_flag_option(cmd, "mc-count", "Monte Carlo samples per evaluation");
    sink->add_flag_option(cmd, "risk", "risk override");
  }
  {
    auto [cmd, sink] =
        make_command("holder", "log-log modulus-of-continuity fit around a point");
    sink->add_flag_option(cmd, "x0", "center decision");
    sink->add_flag_option(cmd, "radii", "decreasing probe radii, e.g. '0.16,0.08'");
    sink->add_flag_option(cmd, "mc-count", "Monte Carlo samples per evaluation");
    sink->add_flag_option(cmd, "risk", "risk override");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& sink : sinks) {
    if (app.get_subcommand(sink->spec.command)->parsed())
      return bsilp::cli::run(sink->spec);
  }
  return 1;
}
