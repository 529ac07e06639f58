// Copyright 2026 The seqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqpt/experiment.hpp"

using namespace seqpt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seqpt_exp_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig small_config(const std::string& dir) {
  ExperimentConfig c;
  c.selection = CoefficientSelection::support;
  c.sample_size = 4;
  c.sqpt = false;
  c.states = 5;
  c.m_grid = {2, 72};
  c.repetitions = 2;
  c.out_dir = dir;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = ExperimentConfig::from_json(Json::object());
  CHECK(c.d1 == 2);
  CHECK(c.d2 == 3);
  CHECK(c.mode() == "shots:10000");
  CHECK(c.repetitions == 20);
  CHECK(c.comparisons.size() == 2);
  CHECK_NOTHROW(c.validate());

  const auto j = ExperimentConfig::from_json(
      Json::parse(R"({"mode": "noiseless", "coefficients": [[0, 0], [1, 10]], "seed": 9,
                      "comparisons": [{"label": "id", "channel": {"type": "identity", "dim": 6}}]})"));
  CHECK(j.exact);
  CHECK(j.selection == CoefficientSelection::explicit_list);
  CHECK(j.coefficients.size() == 2);
  CHECK(j.seed == 9);
  REQUIRE(j.comparisons.size() == 1);
  CHECK(j.comparisons[0].label == "id");

  const auto back = ExperimentConfig::from_json(j.to_json());
  CHECK(back.to_json() == j.to_json());
  CHECK(back.hash() == j.hash());
}

TEST_CASE("config validation names the field") {
  auto expect_field = [](const Json& j, const std::string& field) {
    try {
      ExperimentConfig::from_json(j).validate();
      FAIL("no error for field " << field);
    } catch (const ConfigError& e) {
      CHECK(e.field() == field);
      CHECK(std::string(e.what()).rfind("config." + field, 0) == 0);
    }
  };
  expect_field({{"bogus", 1}}, "bogus");
  expect_field({{"dims", {4, 3}}}, "dims[0]");
  expect_field({{"dims", {2, 2, 2}}}, "dims");
  expect_field({{"mode", "shots:abc"}}, "mode");
  expect_field({{"mode", "loud"}}, "mode");
  expect_field({{"m_grid", {0, 5}}}, "m_grid");
  expect_field({{"m_grid", {5, 73}}}, "m_grid");
  expect_field({{"m_grid", Json::array()}}, "m_grid");
  expect_field({{"repetitions", 0}}, "repetitions");
  expect_field({{"states", 0}}, "states");
  expect_field({{"sample_size", 100}}, "sample_size");
  expect_field({{"coefficients", {{0, 36}}}}, "coefficients");
  expect_field({{"coefficients", "some"}}, "coefficients");
  expect_field({{"schema_version", 99}}, "schema_version");
  expect_field({{"channel", {{"type", "identity"}, {"dim", 5}}}}, "channel");
}

TEST_CASE("config mode and hash") {
  ExperimentConfig c;
  c.set_mode("shots:250");
  CHECK_FALSE(c.exact);
  CHECK(c.shots == 250);
  c.set_mode("noiseless");
  CHECK(c.exact);
  CHECK(c.mode() == "noiseless");

  ExperimentConfig a, b;
  b.out_dir = "elsewhere";
  b.report = "r.json";
  CHECK(a.hash() == b.hash());
  b.seed = 43;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("config load") {
  const auto dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"seed": 5, "mode": "shots:100"})";
  const auto c = ExperimentConfig::load(dir / "c.json");
  CHECK(c.seed == 5);
  CHECK(c.shots == 100);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "bad.json"), Error);
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "missing.json"), Error);
  fs::remove_all(dir);
}

TEST_CASE("reconstruct: identity channel, noiseless") {
  const auto dir = scratch("identity");
  ExperimentConfig c;
  c.channel = {{"type", "identity"}, {"dim", 6}};
  c.exact = true;
  c.sqpt = false;
  c.out_dir = dir.string();
  const auto r = cmd_reconstruct(c);
  CHECK(r.audits_passed);
  const auto rows = csv_rows(dir / "fidelity.csv");
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"method", "reference", "fidelity"});
  CHECK(rows[1][0] == "seqpt");
  CHECK(rows[1][1] == "target");
  CHECK(std::stod(rows[1][2]) >= 1.0 - 1e-8);

  const Json report = Json::parse(slurp(dir / "reconstruction.json"));
  CHECK(report.at("kind") == "seqpt_reconstruction");
  CHECK(report.at("config_hash") == c.hash());
  CHECK(report.at("coefficient_count") == 666);
  const std::string csv = slurp(dir / "chi_abs.csv");
  CHECK(csv.find("# config_hash=" + c.hash()) != std::string::npos);
  CHECK(csv.find("# seed=42") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("reconstruct: selective output marks unestimated entries") {
  const auto dir = scratch("selective");
  auto c = small_config(dir.string());
  c.exact = true;
  c.sample_size = 72;
  const auto r = cmd_reconstruct(c);
  CHECK(r.audits_passed);
  const Json report = Json::parse(slurp(dir / "reconstruction.json"));
  CHECK(report.at("coefficient_count") == 21);
  const auto& entries = report.at("chi").at("entries");
  CHECK(entries.at(0).at(0).is_array());
  CHECK(entries.at(35).at(35).is_null());
  CHECK(report.at("fidelity").at("target").get<double>() >= 1.0 - 1e-8);
  fs::remove_all(dir);
}

TEST_CASE("outputs are byte-identical on re-run") {
  const auto dir = scratch("det");
  auto c = small_config(dir.string());
  c.shots = 500;
  const std::vector<std::string> files{"reconstruction.json", "chi_abs.csv", "fidelity.csv",
                                       "qst_histogram.csv", "qst_summary.csv", "efficiency.csv",
                                       "efficiency_points.csv"};
  auto run = [&] {
    cmd_reconstruct(c);
    cmd_qst_histogram(c);
    cmd_efficiency_curve(c);
    std::vector<std::string> out;
    for (const auto& f : files) out.push_back(slurp(dir / f));
    return out;
  };
  const auto first = run();
  const auto second = run();
  for (std::size_t k = 0; k < files.size(); ++k) {
    INFO(files[k]);
    CHECK_FALSE(first[k].empty());
    CHECK(first[k] == second[k]);
  }
  c.seed = 7;
  cmd_reconstruct(c);
  CHECK(slurp(dir / "chi_abs.csv") != first[1]);
  fs::remove_all(dir);
}

TEST_CASE("efficiency curve, noiseless full design") {
  const auto dir = scratch("eff");
  auto c = small_config(dir.string());
  c.exact = true;
  c.m_grid = {72};
  const auto r = cmd_efficiency_curve(c);
  CHECK(r.audits_passed);
  const auto rows = csv_rows(dir / "efficiency.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"settings_count", "M", "target_label", "fidelity_mean",
                                            "fidelity_std", "repetitions"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k][0] == "1512");
    if (rows[k][2] == "target") CHECK(std::stod(rows[k][3]) >= 1.0 - 1e-8);
  }
  CHECK(csv_rows(dir / "efficiency_points.csv").size() == 1 + 2 * 3);
  fs::remove_all(dir);
}

TEST_CASE("qst histogram") {
  const auto dir = scratch("hist");
  auto c = small_config(dir.string());
  CHECK_THROWS_WITH_AS(cmd_qst_histogram(c), doctest::Contains("missing reconstruction input"),
                       Error);
  c.exact = true;
  c.sample_size = 72;
  c.selection = CoefficientSelection::full;
  c.sqpt = true;
  cmd_reconstruct(c);
  const auto r = cmd_qst_histogram(c);
  CHECK(r.audits_passed);
  const auto rows = csv_rows(dir / "qst_histogram.csv");
  REQUIRE(rows.size() == 1 + c.states);
  CHECK(rows[0] == std::vector<std::string>{"state", "fidelity_seqpt", "fidelity_sqpt"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(std::stod(rows[k][1]) >= 1.0 - 1e-8);
    CHECK(std::stod(rows[k][2]) >= 1.0 - 1e-8);
  }
  const auto summary = csv_rows(dir / "qst_summary.csv");
  CHECK(summary[0] == std::vector<std::string>{"method", "states", "mean", "std", "min", "max"});
  fs::remove_all(dir);
}

TEST_CASE("format_number") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}
