// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests of the command-line tool (subprocess invocations).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "asymptotica/verify.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(ASYMPTOTICA_CLI_PATH) + " " + args +
                    " 2>/dev/null";
  std::FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  int status = pclose(p);
  r.exit_code = WEXITSTATUS(status);
  return r;
}

double first_number(const std::string& s) {
  std::istringstream ss(s);
  double v;
  ss >> v;
  REQUIRE(ss.good());
  return v;
}

}  // namespace

TEST_CASE("constants gamma") {
  auto r = run_cli("constants gamma --delta 0 --tol 1e-8");
  CHECK(r.exit_code == 0);
  CHECK(first_number(r.out) == doctest::Approx(0.5772156649).epsilon(1e-8));
  // out-of-range delta is a usage error
  CHECK(run_cli("constants gamma --delta 2").exit_code == 2);
}

TEST_CASE("constants eta") {
  auto r = run_cli("constants eta --dist rademacher --delta 0");
  CHECK(r.exit_code == 0);
  CHECK(first_number(r.out) == doctest::Approx(0.69314718).epsilon(1e-8));
  // general laws cannot certify 1e-8: tolerance exit
  CHECK(run_cli("constants eta --dist uniform3 --delta 0 --tol 1e-8")
            .exit_code == 3);
  // missing --dist
  CHECK(run_cli("constants eta --delta 0").exit_code == 2);
}

TEST_CASE("series subcommands") {
  auto r = run_cli(
      "series davis --dist rademacher --delta 0 --eps 0.1 --remainder");
  CHECK(r.exit_code == 0);
  // at eps = 0.1 the remainder still carries the lattice bias: ~ +0.3465
  CHECK(first_number(r.out) == doctest::Approx(0.3465).epsilon(0.01));
  CHECK(r.out.find("leading_term") != std::string::npos);

  auto k = run_cli("series klesov --normal --eps 0.1 --remainder");
  CHECK(k.exit_code == 0);
  CHECK(std::fabs(first_number(k.out) - (-0.5)) < 0.05);

  CHECK(run_cli("series davis --dist rademacher --eps 0").exit_code == 2);
  CHECK(run_cli("series normal --eps 0.1 --delta 7").exit_code == 2);
}

TEST_CASE("verify writes a pass report") {
  std::string path = "cli_report_test.json";
  auto r = run_cli(
      "verify theorem11 --dist rademacher --delta 0 --out " + path);
  CHECK(r.exit_code == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  auto rep = asymptotica::verify::report_from_json(ss.str());
  CHECK(rep.pass);
  CHECK(rep.mode == "theorem11");
  CHECK(std::fabs(rep.extrapolated.limit - (-0.1159)) < 0.02);
  std::remove(path.c_str());

  CHECK(run_cli("verify theorem11 --delta 0").exit_code == 2);  // no dist
  CHECK(run_cli("verify theorem11 --dist rademacher --eps-grid 0.1,0.2,0.3")
            .exit_code == 2);
}

TEST_CASE("verify gs at delta 1") {
  auto r = run_cli("verify gs --dist rademacher --delta 1 --format json");
  CHECK(r.exit_code == 0);
  auto rep = asymptotica::verify::report_from_json(r.out);
  CHECK(rep.target == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(rep.pass);
}

TEST_CASE("dist queries") {
  auto r = run_cli("dist pzero --dist rademacher --n 100");
  CHECK(r.exit_code == 0);
  CHECK(first_number(r.out) == doctest::Approx(0.07958924).epsilon(1e-7));
  auto k = run_cli("dist kolmogorov --dist rademacher --n 1");
  CHECK(first_number(k.out) == doctest::Approx(0.68268949).epsilon(1e-7));
  CHECK(run_cli("dist pzero --dist rademacher --n 0").exit_code == 2);
  auto mc = run_cli(
      "dist mc --dist rademacher --n 100 --t 20 --reps 50000 --seed 7");
  CHECK(mc.exit_code == 0);
  CHECK(std::fabs(first_number(mc.out) - 0.0569) < 0.01);
}

TEST_CASE("thread count does not change results") {
  std::string cmd = "constants gamma --delta 1 --tol 1e-6";
  auto run_env = [&](const char* env) {
    std::string full = std::string(env) + " " + ASYMPTOTICA_CLI_PATH + " " +
                       cmd + " 2>/dev/null";
    std::FILE* p = popen(full.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) out += buf;
    pclose(p);
    return out;
  };
  auto a = run_env("ASYMPTOTICA_THREADS=1");
  auto b = run_env("ASYMPTOTICA_THREADS=4");
  CHECK(a == b);  // byte-identical across worker counts
}

TEST_CASE("json and csv output formats") {
  auto j = run_cli("constants gamma --delta 0 --tol 1e-6 --format json");
  CHECK(j.exit_code == 0);
  CHECK(j.out.find("\"value\"") != std::string::npos);
  CHECK(j.out.find("\"bound_kind\": \"rigorous\"") != std::string::npos);
  auto c = run_cli("constants gamma --delta 0 --tol 1e-6 --format csv");
  CHECK(c.out.find("value,error_bound,terms_used") != std::string::npos);
}
