#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = LIFTLINE_CLI_PATH;
const std::string kScenario =
    std::string(LIFTLINE_SCENARIO_DIR) + "/badgastein.json";

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("thresholds reproduces the reference values") {
  RunResult r = run("thresholds " + kScenario);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("station,closed_form,bisect") == 0);
  CHECK(r.out.find("1,1.6,1.6") != std::string::npos);
  CHECK(r.out.find("2,1.176470588,1.176470588") != std::string::npos);
  CHECK(r.out.find("3,1.199040767,1.199040767") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("").exit_code == 2);
  CHECK(run("frobnicate " + kScenario).exit_code == 2);
  CHECK(run("analyze --lambda -1 " + kScenario).exit_code == 2);
  CHECK(run("analyze /nonexistent.json").exit_code == 1);
  CHECK(run("sweep --axis bogus --grid 1 " + kScenario).exit_code == 2);
  CHECK(run("sweep " + kScenario).exit_code == 2);  // missing grid
}

TEST_CASE("analyze emits the documented columns") {
  RunResult r = run("analyze --lambda 0.5 " + kScenario);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("station,lambda_m,expected_capacity,capacity_variance,"
                   "scaled_threshold,load_factor,stable,w_mean_s,w_var_s2,"
                   "e_t,e_r") == 0);
  // four station rows plus header
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines == 5);
}

TEST_CASE("analytic output is reproducible bit for bit") {
  std::string a = run("analyze --lambda 1.0 " + kScenario).out;
  std::string b = run("analyze --lambda 1.0 " + kScenario).out;
  CHECK(a == b);
  CHECK(!a.empty());
}

TEST_CASE("sweep over eta reproduces the plateau") {
  RunResult r = run("sweep --axis eta --station 1 --grid 8,7,6 " + kScenario);
  CHECK(r.exit_code == 0);
  // station 2's scaled threshold appears identically in every block
  size_t first = r.out.find(",2,1.176470588,");
  REQUIRE(first != std::string::npos);
  size_t second = r.out.find(",2,1.176470588,", first + 1);
  CHECK(second != std::string::npos);
}

TEST_CASE("simulate writes csv and manifest next to the output") {
  std::string out = "cli_sim_test.csv";
  RunResult r = run("simulate --horizon 5000 --reps 2 --seed 3 --out " + out +
                    " " + kScenario);
  CHECK(r.exit_code == 0);
  std::string csv = slurp(out);
  CHECK(csv.find("station,w_mean_s,") == 0);
  std::string manifest = slurp(out + ".manifest.json");
  CHECK(manifest.find("\"command\": \"simulate\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 3") != std::string::npos);
  // same seed, same bytes
  std::string out2 = "cli_sim_test2.csv";
  run("simulate --horizon 5000 --reps 2 --seed 3 --out " + out2 + " " +
      kScenario);
  CHECK(slurp(out2) == csv);
  std::remove(out.c_str());
  std::remove((out + ".manifest.json").c_str());
  std::remove(out2.c_str());
  std::remove((out2 + ".manifest.json").c_str());
}

TEST_CASE("validate passes in decorrelated mode at moderate load") {
  RunResult r = run("validate --horizon 200000 --reps 4 --seed 11 "
                    "--decorrelate --lambda 1.0 " +
                    kScenario);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("station,metric,analytic,simulated") == 0);
  CHECK(r.out.find(",0\n") == std::string::npos);  // no failing rows
}

TEST_CASE("fig5 lists the four occupancy laws") {
  RunResult r =
      run("fig5 " + std::string(LIFTLINE_SCENARIO_DIR) + "/fig5.json");
  CHECK(r.exit_code == 0);
  for (const char* law : {"delta4", "half_2_6", "half_1_7", "half_0_8"})
    CHECK(r.out.find(law) != std::string::npos);
}
