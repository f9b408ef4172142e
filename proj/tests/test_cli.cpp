#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

using dirac::cli::parse_args;
using dirac::cli::run;
using dirac::cli::RunConfig;
using dirac::testing::fixture_path;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"dirac"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto cfg = parse_args(static_cast<int>(argv.size()), argv.data(), out);
  REQUIRE(cfg.has_value());
  const int code = run(*cfg, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dirac_cli_" + name);
}

}  // namespace

TEST_CASE("parse_args reads windows with negative bounds") {
  std::ostringstream out;
  const char* argv[] = {"dirac", "spectrum", "--problem", "x.toml", "--window", "-5.5", "5.5", "--grid", "17"};
  const auto cfg = parse_args(9, argv, out);
  REQUIRE(cfg.has_value());
  CHECK(cfg->command == "spectrum");
  REQUIRE(cfg->window.has_value());
  CHECK(cfg->window->first == -5.5);
  CHECK(cfg->window->second == 5.5);
  CHECK(cfg->grid == 17);
}

TEST_CASE("parse_args rejects unknown commands and returns nullopt on help") {
  std::ostringstream out;
  const char* bad[] = {"dirac", "frobnicate"};
  CHECK_THROWS_AS(parse_args(2, bad, out), std::invalid_argument);
  const char* help[] = {"dirac", "--help"};
  CHECK_FALSE(parse_args(2, help, out).has_value());
  CHECK(out.str().find("--window") != std::string::npos);
}

TEST_CASE("spectrum of the free problem lists the integers") {
  const auto r = invoke({"spectrum", "--problem", fixture_path("free.toml"), "--window", "-5.5", "5.5"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 11);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(std::stoll(rows[k][0]) == static_cast<long long>(k));
    CHECK(std::abs(std::stod(rows[k][1]) - (static_cast<double>(k) - 5.0)) <= 1e-8);
  }
  CHECK(r.out.find("# command = spectrum") != std::string::npos);
}

TEST_CASE("validate reports failures with exit code 1") {
  const auto r = invoke({"validate", "--problem", fixture_path("bad_theta.toml")});
  CHECK(r.code == 1);
  CHECK(r.err.find("theta must be nonzero") != std::string::npos);

  const auto ok = invoke({"validate", "--problem", fixture_path("theta2.toml")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("valid = true") != std::string::npos);
}

TEST_CASE("missing files exit with code 3") {
  const auto r = invoke({"spectrum", "--problem", fixture_path("does_not_exist.toml"), "--window", "0", "1"});
  CHECK(r.code == 3);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("numerical failures exit with code 2 and name the operation") {
  const auto r = invoke({"spectrum", "--problem", fixture_path("free.toml"), "--window", "-1e7", "1e7"});
  CHECK(r.code == 2);
  CHECK(r.err.find("find_eigenvalues") != std::string::npos);
}

TEST_CASE("pmatrix of a problem against itself") {
  const auto f = fixture_path("transmission.toml");
  const auto r = invoke({"pmatrix", "--problem", f, "--problem2", f, "--grid", "10", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["command"] == "pmatrix");
  CHECK(j["rows"].size() + j["summary"]["dropped"].get<long long>() == 10);
  CHECK(j["summary"]["max_deviation"].get<double>() <= 1e-7);
  CHECK(j["summary"]["max_discrepancy"].get<double>() <= 1e-7);
}

TEST_CASE("json output parses and carries the column names") {
  const auto r = invoke({"scan", "--problem", fixture_path("free.toml"), "--window", "0.1", "2.1", "--grid", "5",
                         "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["columns"].size() == 4);
  CHECK(j["columns"][0] == "lambda");
  REQUIRE(j["rows"].size() == 5);
  for (const auto& row : j["rows"]) {
    const double lam = row[0].get<double>();
    CHECK(std::abs(row[1].get<double>() - std::sin(lam * dirac::testing::kPi)) <= 1e-9);
  }
}

TEST_CASE("weyl output marks poles as null") {
  const auto r = invoke({"weyl", "--problem", fixture_path("free.toml"), "--window", "0", "2", "--grid", "3",
                         "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["rows"].size() == 3);
  CHECK(j["rows"][0][1].is_null());
  CHECK(j["rows"][2][1].is_null());
}

TEST_CASE("repeated runs are byte-identical") {
  const std::vector<std::string> args{"asympt", "--problem", fixture_path("transmission.toml"), "--window", "100", "140",
                                      "--grid", "50"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("--out writes the report to a file") {
  const auto path = temp_file("out.csv");
  const auto r = invoke({"spectrum", "--problem", fixture_path("free.toml"), "--window", "0.5", "3.5", "--out",
                         path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(csv_rows(text.str()).size() == 3);
  std::filesystem::remove(path);
}

TEST_CASE("spectrum output feeds reconstruct") {
  const auto truth = fixture_path("constant_potential.toml");
  const auto main_path = temp_file("main.csv");
  const auto aux_path = temp_file("aux.csv");
  REQUIRE(invoke({"spectrum", "--problem", truth, "--window", "0", "9.9", "--out", main_path.string()}).code == 0);
  REQUIRE(invoke({"spectrum", "--problem", truth, "--window", "0", "9.9", "--auxiliary", "--out",
                  aux_path.string()})
              .code == 0);

  const auto r = invoke({"reconstruct", "--problem", fixture_path("free.toml"), "--targets", main_path.string(),
                         "--aux-targets", aux_path.string(), "--param", "v=p0,r0:-0.6:0.6", "--start", "0",
                         "--format", "json"});
  std::filesystem::remove(main_path);
  std::filesystem::remove(aux_path);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["summary"]["rms"].get<double>() <= 1e-7);
  const auto& first = j["rows"][0];
  CHECK(first[0] == "parameter");
  CHECK(std::abs(first[3].get<double>() - 0.3) <= 1e-6);
}

TEST_CASE("reconstruct rejects malformed parameter specs") {
  const auto r = invoke({"reconstruct", "--problem", fixture_path("free.toml"), "--param", "v=zz:0:1"});
  CHECK(r.code == 1);
}
