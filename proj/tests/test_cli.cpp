#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <sys/wait.h>

#include "bsilp/cli.hpp"
#include "support.hpp"

using namespace bsilp;
using namespace test_support;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("bsilp_test_" + name);
}

cli::CommandSpec make_spec(const std::string& command, const std::string& fixture,
                           const fs::path& out) {
  cli::CommandSpec spec;
  spec.command = command;
  spec.instance_path = data_file(fixture);
  spec.output_path = out.string();
  return spec;
}

}  // namespace

TEST_CASE("partition command reports the four regions", "[cli]") {
  fs::path out = temp_file("partition.json");
  cli::CommandSpec spec = make_spec("partition", "six_points_1d.json", out);
  REQUIRE(cli::run(spec) == 0);
  auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("command") == "partition");
  CHECK(doc.at("region_count") == 4);
  REQUIRE(doc.at("regions").size() == 4);
  CHECK(doc.at("regions")[0].at("cells")[0].at("lo")[0] == "2");
  CHECK(doc.at("instance_hash").get<std::string>().substr(0, 2) == "0x");
}

TEST_CASE("partition map CSV is emitted for planar instances", "[cli]") {
  fs::path out = temp_file("partition2d.json");
  fs::path map = temp_file("partition2d.csv");
  cli::CommandSpec spec = make_spec("partition", "six_points_2d.json", out);
  spec.flags["map"] = map.string();
  REQUIRE(cli::run(spec) == 0);
  std::string csv = read_file(map);
  CHECK(csv.rfind("region,lo1,hi1,lo2,hi2\n", 0) == 0);
  CHECK(csv.find("inf") != std::string::npos);
}

TEST_CASE("value curve CSV reproduces the step plateaus", "[cli]") {
  fs::path out = temp_file("curve.csv");
  cli::CommandSpec spec = make_spec("phi-curve", "ceilfloor_box.json", out);
  // diagonal segment (-t, t) for t from -1/2 to 5/2, sampled every 1/4
  spec.flags["start"] = "0.5,-0.5";
  spec.flags["end"] = "-2.5,2.5";
  spec.flags["samples"] = "13";
  REQUIRE(cli::run(spec) == 0);

  std::istringstream in(read_file(out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "parameter,psi,phi");
  std::vector<double> phi;
  while (std::getline(in, line)) {
    auto last = line.rfind(',');
    phi.push_back(std::stod(line.substr(last + 1)));
  }
  REQUIRE(phi.size() == 13);
  // t = -0.5 + 0.25*k; interior plateau values 1 on (0,1) and 3 on (1,2)
  CHECK(phi[3] == 1.0);   // t = 0.25
  CHECK(phi[4] == 1.0);   // t = 0.5
  CHECK(phi[5] == 1.0);   // t = 0.75
  CHECK(phi[7] == 3.0);   // t = 1.25
  CHECK(phi[8] == 3.0);   // t = 1.5
  CHECK(phi[9] == 3.0);   // t = 1.75
}

TEST_CASE("eval exits with code 2 outside the induced feasible set", "[cli]") {
  cli::CommandSpec spec =
      make_spec("eval", "two_step_uniform.json", temp_file("eval_bad.json"));
  spec.flags["x"] = "-1/2";
  CHECK(cli::run(spec) == 2);
}

TEST_CASE("eval emits the exact law and risk value", "[cli]") {
  fs::path out = temp_file("eval.json");
  cli::CommandSpec spec = make_spec("eval", "two_step_uniform.json", out);
  spec.flags["x"] = "1/2";
  REQUIRE(cli::run(spec) == 0);
  auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("distribution").at("values") == nlohmann::json({0.0, 1.0}));
  CHECK(doc.at("distribution").at("probs") == nlohmann::json({0.5, 0.5}));
  CHECK(doc.at("risk").at("value") == 0.5);
}

TEST_CASE("risk override flag is honored", "[cli]") {
  fs::path out = temp_file("eval_cvar.json");
  cli::CommandSpec spec = make_spec("eval", "two_step_uniform.json", out);
  spec.flags["x"] = "1/2";
  spec.flags["risk"] = "cvar:0.5";
  REQUIRE(cli::run(spec) == 0);
  auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("risk").at("kind") == "cvar");
  CHECK(doc.at("risk").at("value") == 1.0);
}

TEST_CASE("feasible and fz-map commands agree on the flip point", "[cli]") {
  fs::path out = temp_file("feasible.json");
  cli::CommandSpec spec = make_spec("feasible", "two_step_uniform.json", out);
  spec.flags["x"] = "0";
  REQUIRE(cli::run(spec) == 0);
  auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("in_fz") == true);
  CHECK(doc.at("witness").is_null());

  fs::path map = temp_file("fzmap.csv");
  cli::CommandSpec scan = make_spec("fz-map", "two_step_uniform.json", map);
  scan.flags["box"] = "-1,1";
  scan.flags["resolution"] = "21";
  REQUIRE(cli::run(scan) == 0);
  std::istringstream in(read_file(map));
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,in_x,in_fz");
  std::size_t feasible_rows = 0, rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.back() == '1') ++feasible_rows;
  }
  CHECK(rows == 21);
  CHECK(feasible_rows == 11);  // exactly the grid points with x >= 0
}

TEST_CASE("solve command writes a report and a trace", "[cli]") {
  fs::path out = temp_file("solve.json");
  fs::path trace = temp_file("solve_trace.csv");
  cli::CommandSpec spec = make_spec("solve", "six_points_1d.json", out);
  spec.flags["method"] = "grid";
  spec.flags["box"] = "3,6";
  spec.flags["resolution"] = "13";
  spec.flags["trace"] = trace.string();
  REQUIRE(cli::run(spec) == 0);
  auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("status") == "converged");
  CHECK(doc.at("evaluations") == 13);
  std::string csv = read_file(trace);
  CHECK(csv.rfind("x1,value\n", 0) == 0);
}

TEST_CASE("mc command is deterministic under a fixed seed", "[cli]") {
  fs::path out1 = temp_file("mc1.json");
  fs::path out2 = temp_file("mc2.json");
  for (const fs::path& out : {out1, out2}) {
    cli::CommandSpec spec = make_spec("mc", "two_step_sqrt.json", out);
    spec.flags["x"] = "3/4";
    spec.flags["count"] = "5000";
    spec.seed = 7;
    REQUIRE(cli::run(spec) == 0);
  }
  CHECK(read_file(out1) == read_file(out2));
  auto doc = nlohmann::json::parse(read_file(out1));
  CHECK(std::abs(doc.at("risk").at("estimate").get<double>() - 0.5) < 0.05);
}

TEST_CASE("partition output is byte-identical across runs", "[cli]") {
  fs::path out1 = temp_file("det1.json");
  fs::path out2 = temp_file("det2.json");
  REQUIRE(cli::run(make_spec("partition", "six_points_2d.json", out1)) == 0);
  REQUIRE(cli::run(make_spec("partition", "six_points_2d.json", out2)) == 0);
  CHECK(read_file(out1) == read_file(out2));
}

TEST_CASE("stability and holder commands produce their tables", "[cli]") {
  fs::path out = temp_file("stability.csv");
  cli::CommandSpec spec = make_spec("stability", "two_step_uniform.json", out);
  spec.flags["x"] = "1/2";
  spec.flags["counts"] = "100,1000";
  spec.flags["box"] = "3/10,7/10";
  spec.flags["resolution"] = "11";
  REQUIRE(cli::run(spec) == 0);
  std::string csv = read_file(out);
  CHECK(csv.rfind("label,q_deviation,value_deviation,solution_excess\n", 0) == 0);
  CHECK(csv.find("empirical_n=100") != std::string::npos);

  fs::path fit = temp_file("holder.json");
  cli::CommandSpec hspec = make_spec("holder", "two_step_uniform.json", fit);
  hspec.flags["x0"] = "2/5";
  hspec.flags["radii"] = "1/5,1/10,1/20";
  REQUIRE(cli::run(hspec) == 0);
  auto doc = nlohmann::json::parse(read_file(fit));
  CHECK(doc.at("defined") == true);
  CHECK(std::abs(doc.at("exponent").get<double>() - 1.0) < 0.05);
}

TEST_CASE("error exit codes", "[cli]") {
  fs::path bad = temp_file("bad_instance.json");
  std::ofstream(bad) << "{ not json";
  cli::CommandSpec spec;
  spec.command = "partition";
  spec.instance_path = bad.string();
  CHECK(cli::run(spec) == 1);

  cli::CommandSpec guard = make_spec("partition", "cube_cost_conflict.json",
                                     temp_file("guard.json"));
  guard.flags["limit"] = "10";
  CHECK(cli::run(guard) == 3);

  cli::CommandSpec unknown = make_spec("nonsense", "six_points_1d.json",
                                       temp_file("none.json"));
  CHECK(cli::run(unknown) == 1);
}

TEST_CASE("the installed binary wires arguments through", "[cli]") {
  fs::path out = temp_file("binary.json");
  std::string cmd = std::string(BSILP_CLI_PATH) + " partition -i " +
                    data_file("six_points_1d.json") + " -o " + out.string();
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc.at("region_count") == 4);

  std::string badflag = std::string(BSILP_CLI_PATH) +
                        " partition --no-such-flag -i " +
                        data_file("six_points_1d.json") + " >/dev/null 2>&1";
  status = std::system(badflag.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) != 0);
}
