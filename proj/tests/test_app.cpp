#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmlin/app.hpp"
#include "mmlin/error.hpp"
#include "mmlin/io.hpp"

using namespace mmlin;
using namespace mmlin::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(MMLIN_TEST_TMPDIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string run(const std::string& command, const ScenarioConfig& c, int expected = kExitOk) {
  std::ostringstream out, err;
  const int code = run_command(command, c, out, err);
  INFO(err.str());
  CHECK(code == expected);
  return out.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(io::format_shortest(0.1) == "0.1");
  CHECK(io::format_shortest(1e-300) == "1e-300");
  CHECK(std::stod(io::format_shortest(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(io::format_17(0.1) == "0.10000000000000001");
  nlohmann::ordered_json doc = {{"b", 0.5}, {"a", std::nan("")}, {"n", 3}, {"v", {1.5, true}}};
  CHECK(io::dump_json(doc) ==
        "{\n  \"b\": 0.5,\n  \"a\": null,\n  \"n\": 3,\n  \"v\": [\n    1.5,\n    true\n  ]\n}\n");
}

TEST_CASE("simulate table") {
  ScenarioConfig c;
  c.s0 = 0.5;
  c.n_grid = 16;
  const auto rows = lines(run("simulate", c));
  REQUIRE(rows.size() == 17);
  CHECK(rows[0] == "t,t_over_T,s_num,c_num,s_star,c_star,s_low,c_low,s_up,c_up");
  std::istringstream first(rows[1]);
  const double expected[] = {0, 0, 0.5, 0, 0.5, 0, 0.5, 0, 0.5, 0};
  for (double e : expected) {
    std::string cell;
    std::getline(first, cell, ',');
    CHECK(std::stod(cell) == doctest::Approx(e).epsilon(1e-15));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::count(rows[i].begin(), rows[i].end(), ',') == 9);
  }
  CHECK(rows.back().find(",1,") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
  ScenarioConfig c;
  c.s0 = 0.3;
  for (const char* cmd : {"bounds", "order", "timescales"}) {
    CHECK(run(cmd, c) == run(cmd, c));
  }
  c.trials = 4;
  c.seed = 11;
  CHECK(run("fit", c) == run("fit", c));
  CHECK(run("simulate", c) == run("simulate", c));
}

TEST_CASE("report contents") {
  ScenarioConfig c;
  auto doc = nlohmann::json::parse(run("timescales", c));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["command"] == "timescales");
  CHECK(doc["params"]["s0"] == 0.1);
  CHECK(doc["eta"].get<double>() == doctest::Approx(4.0 / 9.0));
  CHECK(doc["verdict"] == "marginal");
  CHECK(doc["thresholds"]["eta_sep"] == 0.1);
  CHECK(doc["thresholds"]["eta_marginal"] == 0.5);

  c.thresholds = {0.5, 0.6};
  doc = nlohmann::json::parse(run("timescales", c));
  CHECK(doc["verdict"] == "well-separated");
  CHECK(doc["thresholds"]["eta_sep"] == 0.5);

  doc = nlohmann::json::parse(run("bounds", ScenarioConfig{}));
  CHECK(doc["passed"] == true);
  CHECK(doc["n_grid"] == 512);

  doc = nlohmann::json::parse(run("order", ScenarioConfig{}));
  CHECK(doc["s0_max"] == 0.25);
  CHECK(doc["s0_values"].size() == 6);
  CHECK(doc["slope_s"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("exit codes") {
  ScenarioConfig c;
  c.s0 = 1.5;
  run("simulate", c, kExitInvalidInput);
  run("bounds", c, kExitInvalidInput);
  c.s0 = 0.1;
  c.n_points = 2;
  run("order", c, kExitInvalidInput);
  run("frobnicate", ScenarioConfig{}, kExitInvalidInput);
  run("fit", ScenarioConfig{}, kExitInvalidInput);
  ScenarioConfig few;
  few.integrator.max_steps = 5;
  run("bounds", few, kExitNumericalFailure);
  ScenarioConfig missing;
  missing.data_path = "/nonexistent/obs.csv";
  run("fit", missing, kExitInvalidInput);
}

TEST_CASE("config parsing") {
  const auto doc = nlohmann::json::parse(R"({
    "schema_version": 1,
    "params": {"k1": 2, "k_minus1": 0.5, "k2": 3, "e0": 0.7, "s0": 0.2},
    "integrator": {"rel_tol": 1e-8, "max_steps": 1000},
    "order": {"s0_max": 0.3, "n_points": 5},
    "timescales": {"eta_sep": 0.05},
    "fit": {"guess": {"k2": 4}, "trials": 3},
    "seed": 99
  })");
  const ScenarioConfig c = parse_config(doc);
  CHECK(c.k1 == 2);
  CHECK(c.k_minus1 == 0.5);
  CHECK(c.e0 == 0.7);
  CHECK(c.integrator.rel_tol == 1e-8);
  CHECK(c.integrator.abs_tol == IntegratorConfig{}.abs_tol);
  CHECK(c.integrator.max_steps == 1000);
  CHECK(c.s0_max.value() == 0.3);
  CHECK(c.n_points == 5);
  CHECK(c.thresholds.eta_sep == 0.05);
  CHECK(c.thresholds.eta_marginal == 0.5);
  CHECK(c.guess.value() == Rates{2, 0.5, 4});
  CHECK(c.trials == 3);
  CHECK(c.seed == 99);

  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"bogus": 1})")), InvalidInput);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"params": {"kk": 1}})")), InvalidInput);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"schema_version": 2})")), InvalidInput);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"params": {"k1": "x"}})")),
                  InvalidInput);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse("[1, 2]")), InvalidInput);

  const fs::path dir = scratch("config");
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_config_file((dir / "bad.json").string()), InvalidInput);
  CHECK_THROWS_AS(load_config_file((dir / "missing.json").string()), InvalidInput);
}

TEST_CASE("observation CSV reader") {
  std::istringstream ok("s,t,weight,c\n0.1,0,1,0\n0.09, 1 ,2,\n");
  const auto data = io::read_observations_csv(ok);
  REQUIRE(data.size() == 2);
  CHECK(data[1].t == 1.0);
  CHECK(data[1].s_obs == 0.09);
  CHECK(data[1].weight == 2.0);
  CHECK_FALSE(data[1].c_obs.has_value());
  CHECK(data[0].c_obs.value() == 0.0);

  std::istringstream no_s("t,c\n0,0\n");
  CHECK_THROWS_AS(io::read_observations_csv(no_s), InvalidInput);
  std::istringstream extra("t,s,q\n0,0,0\n");
  CHECK_THROWS_AS(io::read_observations_csv(extra), InvalidInput);
  std::istringstream bad("t,s\n0,abc\n");
  CHECK_THROWS_AS(io::read_observations_csv(bad), InvalidInput);
  std::istringstream ragged("t,s\n0,1,2\n");
  CHECK_THROWS_AS(io::read_observations_csv(ragged), InvalidInput);
  std::istringstream empty("");
  CHECK_THROWS_AS(io::read_observations_csv(empty), InvalidInput);

  std::ostringstream out;
  io::write_observations_csv(out, data);
  std::istringstream back(out.str());
  const auto again = io::read_observations_csv(back);
  REQUIRE(again.size() == 2);
  CHECK(again[1].s_obs == data[1].s_obs);
  CHECK(again[1].weight == data[1].weight);
}

TEST_CASE("fit round trip through emitted observations") {
  const fs::path dir = scratch("roundtrip");
  ScenarioConfig c;
  c.n_grid = 32;
  c.out_dir = dir.string();
  c.observations_path = (dir / "obs.csv").string();
  run("simulate", c);
  CHECK(fs::exists(dir / "simulate.csv"));
  REQUIRE(fs::exists(dir / "obs.csv"));

  ScenarioConfig f;
  f.out_dir = dir.string();
  f.data_path = c.observations_path;
  f.guess = Rates{1.5, 0.7, 1.3};
  run("fit", f);
  std::ifstream in(dir / "fit.json");
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["converged"] == true);
  CHECK(doc["n_observations"] == 50);
  CHECK(doc["estimates"]["k1"].get<double>() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(doc["estimates"]["k_minus1"].get<double>() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(doc["estimates"]["k2"].get<double>() == doctest::Approx(1.0).epsilon(1e-4));
}
