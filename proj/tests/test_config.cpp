#include <doctest.h>

#include <cmath>
#include <fstream>

#include "pplab/config.hpp"
#include "pplab/errors.hpp"

using namespace pplab;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const config_error& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const config_error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("full configuration") {
  const std::string text = R"({
  "problem": {
    "n": 2, "L": 8.0, "M": 64,
    "potential": {"sigma": 0.5, "lambda": {"kind": "power", "c": 1.5, "nu": 0.5}, "R0": 1.0, "mode": "lower_bounded"},
    "convection": {"lambda": {"kind": "exp_decay", "c": 0.2}, "c": [0.1, -0.2], "g": [0.0, 0.05]},
    "initial": {"C0": 2.0, "delta": -0.5, "alpha": 1.0, "d_pow": 1.0}
  },
  "solver": {"method": "picard", "max_terms": 40, "tol": 1e-9, "rho": 0.6, "quad_steps": 32},
  "outputs": {"directory": "runs/a", "formats": ["csv", "binary"], "time_grid": [0.25, 0.5, 1.0]},
  "seed": 42,
  "horizon": "inf"
})";
  const RunConfig c = parse_config(text);
  CHECK(c.grid.n == 2);
  CHECK(c.grid.L == 8.0);
  CHECK(c.grid.M == 64);
  CHECK(c.potential.sigma == 0.5);
  CHECK(c.potential.lambda.kind == TimeFactor::Kind::power);
  CHECK(c.potential.lambda.c == 1.5);
  CHECK(c.potential.lambda.nu == 0.5);
  CHECK(c.potential.R0 == 1.0);
  CHECK(c.potential.mode == PotentialMode::lower_bounded);
  REQUIRE(c.convection.has_value());
  CHECK(c.convection->lambda_b.kind == TimeFactor::Kind::exp_decay);
  CHECK(c.convection->c[1] == -0.2);
  CHECK(c.convection->c[2] == 0.0);
  CHECK(c.convection->g[1] == 0.05);
  CHECK(c.initial.C0 == 2.0);
  CHECK(c.initial.delta == -0.5);
  CHECK(c.initial.alpha == 1.0);
  CHECK(c.initial.d_pow == 1.0);
  CHECK(c.method == "picard");
  CHECK(c.series.max_terms == 40);
  CHECK(c.series.tol == 1e-9);
  CHECK(c.series.rho == 0.6);
  CHECK(c.series.quad_steps == 32);
  CHECK(c.out_dir == "runs/a");
  CHECK(c.formats == std::vector<std::string>{"csv", "binary"});
  CHECK(c.series.time_grid == std::vector<double>{0.25, 0.5, 1.0});
  CHECK(c.seed == 42);
  CHECK(std::isinf(c.horizon));
  CHECK(!c.scan.has_value());
}

TEST_CASE("defaults for an empty document") {
  const RunConfig c = parse_config("{}");
  CHECK(c.grid.n == 1);
  CHECK(c.grid.L == 20.0);
  CHECK(c.grid.M == 256);
  CHECK(c.method == "auto");
  CHECK(c.out_dir == "out");
  CHECK(c.formats == std::vector<std::string>{"csv"});
  CHECK(c.series.time_grid == std::vector<double>{1.0});
  CHECK(c.series.max_terms == 64);
  CHECK(c.series.tol == 1e-10);
  CHECK(c.potential.lambda.c == 0.0);
  CHECK(c.initial.C0 == 1.0);
  CHECK(c.seed == 0);
  CHECK(std::isinf(c.horizon));
}

TEST_CASE("unknown keys are reported with their line") {
  const std::string text = "{\n  \"problem\": {\n    \"n\": 1,\n    \"potentail\": {}\n  }\n}\n";
  CHECK(error_line(text) == 4);
  CHECK(error_text(text).find("unknown key 'potentail'") != std::string::npos);
  CHECK(error_text(text).find("/problem/potentail") != std::string::npos);
  CHECK(error_line("{\n\n\n  \"extra\": 1\n}") == 4);
}

TEST_CASE("type mismatches are reported with their line") {
  const std::string text = "{\n  \"solver\": {\n    \"tol\": \"small\"\n  }\n}";
  CHECK(error_line(text) == 3);
  CHECK(error_text(text).find("'tol' must be a number") != std::string::npos);
  CHECK(error_line("{\"problem\": {\"M\": 64.5}}") == 1);
  CHECK(error_line("{\n\"outputs\": {\n\"formats\": [\"csv\",\n \"pdf\"]}}") == 3);
  CHECK(error_line("{\n\"problem\": {\n\"potential\": {\n\"mode\": \"weird\"}}}") == 4);
  CHECK(error_line("{\n\"solver\": {\"method\": \"euler\"}}") == 2);
  CHECK(error_line("{\n\"seed\": -3}") == 2);
  CHECK(error_line("{\n\n\"horizon\": \"soon\"}") == 3);
}

TEST_CASE("malformed JSON is anchored to a line") {
  const std::string text = "{\n  \"problem\": {\n    \"n\": 1,,\n  }\n}";
  CHECK(error_line(text) == 3);
  CHECK(error_text(text).find("malformed JSON") != std::string::npos);
  CHECK(error_line("[1, 2") >= 1);
}

TEST_CASE("invalid grids and times are rejected") {
  CHECK_THROWS_AS(parse_config("{\"problem\": {\"n\": 4}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"problem\": {\"M\": 0}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"outputs\": {\"time_grid\": [1.0, 0.5]}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"outputs\": {\"time_grid\": []}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"solver\": {\"rho\": 1.5}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"problem\": {\"potential\": {\"lambda\": {\"c\": -1}}}}"), config_error);
}

TEST_CASE("scan ranges") {
  const RunConfig c = parse_config(R"({"scan": {
    "sigma": {"min": 0.5, "max": 1.5, "steps": 5},
    "Lambda0": [0.5, 1.0, 2.0],
    "lambda_family": "exp_decay", "R0": 0.0, "mode": "lower_bounded", "alpha": 0.0, "delta": -0.2}})");
  REQUIRE(c.scan.has_value());
  CHECK(c.scan->sigma == std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5});
  CHECK(c.scan->Lambda0 == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(c.scan->cells() == 15);
  CHECK(c.scan->family == TimeFactor::Kind::exp_decay);
  CHECK(c.scan->mode == PotentialMode::lower_bounded);
  CHECK(c.initial.delta == -0.2);

  const RunConfig empty = parse_config(R"({"scan": {"sigma": {"min": 0.5, "max": 1.5, "steps": 0}, "Lambda0": {"values": [1]}}})");
  CHECK(empty.scan->cells() == 0);
  const RunConfig single = parse_config(R"({"scan": {"sigma": {"min": 0.7, "steps": 1}, "Lambda0": [1]}})");
  CHECK(single.scan->sigma == std::vector<double>{0.7});

  CHECK(error_line("{\"scan\": {\n\"sigma\": {\"min\": 1, \"max\": 0, \"steps\": 3}}}") == 2);
  CHECK(error_line("{\"scan\": {\n\"sigma\": {\"values\": [1], \"steps\": 3}}}") == 2);
  CHECK(error_line("{\"scan\": {\n\"Lambda0\": {\"step\": 3}}}") == 2);
}

TEST_CASE("finite horizon and file loading") {
  CHECK(parse_config("{\"horizon\": 2.5}").horizon == 2.5);
  CHECK_THROWS_AS(parse_config("{\"horizon\": -1}"), config_error);
  const std::string path = "test_config_tmp.json";
  {
    std::ofstream f(path);
    f << "{\"problem\": {\"L\": 12}}";
  }
  CHECK(load_config(path).grid.L == 12.0);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), config_error);
}
