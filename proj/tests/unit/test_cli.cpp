#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sharpmtg/cli.hpp"

using namespace sharpmtg;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"sharpmtg"};
  argv.insert(argv.end(), args);
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("constant") {
  const Outcome r = run({"constant", "--p", "6"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["c_p"].get<double>() - (2.0 + std::sqrt(3.0))) < 1e-9);
  CHECK(j["alpha"].get<double>() == doctest::Approx(2.0));
  for (const char* k : {"p", "alpha", "z_p", "c_p", "a_p", "i_p"}) CHECK(j.contains(k));
}

TEST_CASE("constant at p = 2") {
  const Outcome r = run({"constant", "--p", "2"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["c_p"].get<double>() == 1.0);
  CHECK(j["z_p"].get<double>() == 0.0);
  CHECK(j["a_p"].is_null());
}

TEST_CASE("usage errors") {
  CHECK(run({"constant", "--p", "1.5"}).code == kExitUsage);
  CHECK(run({"constant", "--p", "abc"}).code == kExitUsage);
  CHECK(run({"constant"}).code == kExitUsage);
  CHECK(run({"constant", "--p", "6", "--zero-tol", "0"}).code == kExitUsage);
  CHECK(run({"verify", "--p", "6", "--num-tol", "-1"}).code == kExitUsage);
  CHECK(run({"verify", "--p", "2"}).code == kExitUsage);
  CHECK(run({"simulate", "--p", "6", "--strategy", "nope"}).code == kExitUsage);
  CHECK(run({"simulate", "--p", "6", "--paths", "10"}).code == kExitUsage);
  CHECK(run({"table", "--p-list", "6,3"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("table") {
  const Outcome r = run({"table", "--p-list", "3,6,12"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# j0 = ", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("# j0^2/2 = 2.89159", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("# 4/j0^2 = 0.69166", 0) == 0);
  std::getline(in, line);
  CHECK(line == "p,z_p,c_p,p_one_minus_z,cp_over_p,fg1_constant,baj_constant");
  double z_prev = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<double> cols;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cols.push_back(std::stod(cell));
    REQUIRE(cols.size() == 7);
    CHECK(cols[1] > z_prev);
    CHECK(cols[5] == doctest::Approx(std::sqrt(2.0 * (cols[0] * cols[0] - cols[0]))));
    z_prev = cols[1];
    if (cols[0] == 12.0) CHECK(cols[3] == doctest::Approx(2.7048).epsilon(1e-4));
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("verify") {
  for (const char* p : {"6", "7.5"}) {
    const Outcome r = run({"verify", "--p", p});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"].get<bool>());
    CHECK(j["override_c"].is_null());
    CHECK(j["lemmas"]["checks"].size() > 5);
  }
  const Outcome bad = run({"verify", "--p", "6", "--override-c", "3.5"});
  CHECK(bad.code == kExitVerificationFailed);
  const auto j = nlohmann::json::parse(bad.out);
  CHECK_FALSE(j["pass"].get<bool>());
  bool majorization_failed = false;
  for (const auto& c : j["checks"]) {
    if (c["name"] == "majorization") majorization_failed = !c["pass"].get<bool>();
  }
  CHECK(majorization_failed);
}

TEST_CASE("verify csv dumps the candidate") {
  const Outcome r = run({"verify", "--p", "6", "--grid", "100", "--format", "csv"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("s,g,dg,d2g,Dg,Dtilde_g\n", 0) == 0);
}

TEST_CASE("simulate") {
  const Outcome r = run({"simulate", "--p", "6", "--strategy", "identity,rotation", "--paths", "2000", "--steps", "16",
                         "--seed", "5"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "strategy,p,n_paths,n_steps,seed,est_Zp,est_Wp,ratio,se");
  std::getline(in, line);
  CHECK(line.rfind("identity,6,2000,16,5,", 0) == 0);
  CHECK(line.find(",1,0") != std::string::npos);
  std::getline(in, line);
  CHECK(line.rfind("rotation,6,", 0) == 0);

  const Outcome again = run({"simulate", "--p", "6", "--strategy", "identity,rotation", "--paths", "2000", "--steps",
                             "16", "--seed", "5"});
  CHECK(again.out == r.out);

  const Outcome js = run({"simulate", "--p-list", "3,6", "--strategy", "greedy", "--paths", "2000", "--steps", "16",
                          "--format", "json"});
  REQUIRE(js.code == kExitOk);
  CHECK(nlohmann::json::parse(js.out)["runs"].size() == 2);
}

TEST_CASE("output file") {
  const auto path = std::filesystem::temp_directory_path() / "sharpmtg_cli_test.json";
  const std::string name = path.string();
  const Outcome r = run({"constant", "--p", "6", "--out", name.c_str()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream text;
  text << f.rdbuf();
  CHECK(text.str() == run({"constant", "--p", "6"}).out);
  std::filesystem::remove(path);
  CHECK(run({"constant", "--p", "6", "--out", "/nonexistent-dir/x.json"}).code == kExitUsage);
}
