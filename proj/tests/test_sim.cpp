#include "doctest.h"

#include <cmath>
#include <string>

#include "liftline/chain.hpp"
#include "liftline/sim.hpp"

using namespace liftline;

static Scenario reference() {
  return load_scenario(std::string(LIFTLINE_SCENARIO_DIR) + "/badgastein.json");
}

TEST_CASE("identical seeds reproduce the estimate bit for bit") {
  Scenario s = reference();
  SimConfig cfg;
  cfg.horizon = 20000;
  cfg.replications = 3;
  cfg.seed = 42;
  SimEstimate a = simulate(s, cfg);
  SimEstimate b = simulate(s, cfg);
  REQUIRE(a.stations.size() == b.stations.size());
  for (size_t m = 0; m < a.stations.size(); ++m) {
    CHECK(a.stations[m].w_mean == b.stations[m].w_mean);
    CHECK(a.stations[m].w_var == b.stations[m].w_var);
    CHECK(a.stations[m].w_mean_hw == b.stations[m].w_mean_hw);
    CHECK(a.stations[m].board_mean == b.stations[m].board_mean);
    CHECK(a.stations[m].cap_mean == b.stations[m].cap_mean);
    CHECK(a.stations[m].n_waits == b.stations[m].n_waits);
    CHECK(a.stations[m].queue_hist == b.stations[m].queue_hist);
  }
  cfg.seed = 43;
  SimEstimate c = simulate(s, cfg);
  CHECK(c.stations[0].w_mean != a.stations[0].w_mean);
}

TEST_CASE("thread count does not change the estimate") {
  Scenario s = reference();
  SimConfig cfg;
  cfg.horizon = 10000;
  cfg.replications = 4;
  cfg.seed = 7;
  cfg.threads = 1;
  SimEstimate serial = simulate(s, cfg);
  cfg.threads = 4;
  SimEstimate parallel = simulate(s, cfg);
  for (size_t m = 0; m < serial.stations.size(); ++m) {
    CHECK(serial.stations[m].w_mean == parallel.stations[m].w_mean);
    CHECK(serial.stations[m].w_mean_hw == parallel.stations[m].w_mean_hw);
  }
}

TEST_CASE("no arrivals, no waits") {
  Scenario s = reference();
  s.lambda = 0.0;
  SimConfig cfg;
  cfg.horizon = 5000;
  SimEstimate est = simulate(s, cfg);
  for (const auto& st : est.stations) {
    CHECK(st.n_waits == 0);
    CHECK(st.n_censored == 0);
    CHECK(!st.overload);
  }
  CHECK(est.stations[0].cap_mean == doctest::Approx(8.0));
}

TEST_CASE("full deboarding at the last station empties returning cabins") {
  // sigma_last = 1 in the reference line; station 1 must see cap 8 always
  Scenario s = reference();
  s.lambda = 1.0;
  SimConfig cfg;
  cfg.horizon = 20000;
  SimEstimate est = simulate(s, cfg);
  CHECK(est.stations[0].cap_mean == doctest::Approx(8.0));
  CHECK(est.stations[0].cap_var == doctest::Approx(0.0));
}

TEST_CASE("waits are causal and censoring is counted") {
  Scenario s = reference();
  s.lambda = 1.15;
  SimConfig cfg;
  cfg.horizon = 5000;
  cfg.seed = 3;
  SimEstimate est = simulate(s, cfg);
  for (const auto& st : est.stations) {
    if (st.n_waits > 0) CHECK(st.w_mean > 0.0);
    CHECK(st.n_censored >= 0);
  }
  // near station 2's threshold some passengers are still queued at the end
  CHECK(est.stations[1].n_censored > 0);
}

TEST_CASE("histogram mass equals the number of admitted arrivals") {
  Scenario s = reference();
  s.lambda = 0.8;
  SimConfig cfg;
  cfg.horizon = 20000;
  cfg.seed = 9;
  SimEstimate est = simulate(s, cfg);
  for (const auto& st : est.stations) {
    double mass = 0.0;
    for (double c : st.queue_hist) mass += c;
    // every recorded arrival saw some queue length
    CHECK(mass >= static_cast<double>(st.n_waits));
  }
}

TEST_CASE("single station estimate matches the analytic solve") {
  Scenario s;
  s.line.beta = 10.0;
  s.line.gamma = 8;
  s.line.stations = {{1.0, 1.0, 8}};
  s.lambda = 0.5;
  LineSolution sol = solve_line(s);
  SimConfig cfg;
  cfg.horizon = 400000;
  cfg.replications = 3;
  cfg.seed = 21;
  SimEstimate est = simulate(s, cfg);
  REQUIRE(sol.stations[0].queue);
  CHECK(std::abs(est.stations[0].w_mean - sol.stations[0].queue->wait.mean) <
        3.0 * est.stations[0].w_mean_hw + 1e-9);
  CHECK(std::abs(est.stations[0].board_mean - 5.0) <
        3.0 * est.stations[0].board_mean_hw + 1e-9);
}

TEST_CASE("ride decorrelation keeps marginals but matches the chain") {
  Scenario s = reference();
  s.lambda = 1.0;
  SimConfig cfg;
  cfg.horizon = 300000;
  cfg.replications = 3;
  cfg.seed = 5;
  SimEstimate faithful = simulate(s, cfg);
  cfg.decorrelate_rides = true;
  SimEstimate oracle = simulate(s, cfg);
  // capacity marginal at station 2 is unchanged by the shuffle
  CHECK(std::abs(faithful.stations[1].cap_mean - oracle.stations[1].cap_mean) <
        0.02);
  // the faithful line carries positive serial correlation in capacities,
  // which lengthens downstream waits above the independent-capacity model
  LineSolution sol = solve_line(s);
  CHECK(faithful.stations[1].w_mean >
        sol.stations[1].queue->wait.mean + 0.5);
  CHECK(std::abs(oracle.stations[1].w_mean -
                 sol.stations[1].queue->wait.mean) <
        3.0 * oracle.stations[1].w_mean_hw + 1e-9);
}

TEST_CASE("stability probe verdicts around a known threshold") {
  Scenario s;
  s.line.beta = 10.0;
  s.line.gamma = 8;
  s.line.stations = {{1.0, 1.0, 8}};
  s.lambda = 0.5;
  auto probes =
      stability_probe(s, {0.7, 0.9}, ArrivalKind::poisson, 200000, 17);
  REQUIRE(probes.size() == 2);
  CHECK(probes[0].verdicts[0] == Verdict::stable);
  CHECK(probes[1].verdicts[0] == Verdict::unstable);
  CHECK(probes[1].slopes[0] > 0.0);
}

TEST_CASE("probe works with deterministic arrivals") {
  Scenario s;
  s.line.beta = 10.0;
  s.line.gamma = 8;
  s.line.stations = {{1.0, 1.0, 8}};
  auto probes = stability_probe(s, {0.7, 0.9}, ArrivalKind::deterministic,
                                200000, 29);
  CHECK(probes[0].verdicts[0] == Verdict::stable);
  CHECK(probes[1].verdicts[0] == Verdict::unstable);
}

TEST_CASE("simulate validates its configuration") {
  Scenario s = reference();
  SimConfig cfg;
  cfg.horizon = 100;
  cfg.warmup = 100;
  CHECK_THROWS(simulate(s, cfg));
  cfg.warmup = 10;
  cfg.replications = 0;
  CHECK_THROWS(simulate(s, cfg));
  Scenario bad = s;
  bad.line.stations[0].nu = 2.0;
  CHECK_THROWS(simulate(bad, SimConfig{}));
}
