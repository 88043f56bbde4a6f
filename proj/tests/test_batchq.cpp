#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "liftline/batchq.hpp"

using namespace liftline;

TEST_CASE("unit-capacity root set is just the unit root") {
  RootSet rs = find_roots(0.5, Pmf::delta(1));
  REQUIRE(rs.roots.size() == 1);
  CHECK(rs.roots[0] == std::complex<double>(1.0));
  CHECK(rs.interior().empty());
}

TEST_CASE("pair-capacity interior root matches real-axis bisection") {
  // capacity 2, load 0.1: the single interior root of
  // z^2 = exp((z-1) load) is real and negative
  double load = 0.1;
  auto f = [&](double x) { return x * x - std::exp((x - 1.0) * load); };
  double lo = -1.0, hi = 0.0;
  REQUIRE(f(lo) * f(hi) < 0.0);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  double oracle = 0.5 * (lo + hi);
  RootSet rs = find_roots(load, Pmf::delta(2));
  REQUIRE(rs.interior().size() == 1);
  CHECK(std::abs(rs.interior()[0] - std::complex<double>(oracle)) < 1e-9);
}

TEST_CASE("interior roots satisfy the characteristic equation") {
  for (double load : {0.5, 2.5, 6.0}) {
    for (const Pmf& cap :
         {Pmf::delta(8), Pmf::binomial(8, 0.9),
          Pmf(std::vector<double>{0, 0, 0.5, 0, 0, 0, 0.5})}) {
      if (cap.mean() <= load) continue;
      RootSet rs = find_roots(load, cap);
      CHECK(static_cast<int>(rs.interior().size()) == cap.support_max() - 1);
      for (auto z : rs.interior()) {
        CHECK(std::abs(z) < 1.0);
        std::complex<double> res =
            1.0 - std::exp((z - 1.0) * load) * cap.pgf(1.0 / z);
        CHECK(std::abs(res) < 1e-9);
      }
    }
  }
}

TEST_CASE("root finding requires a stable station") {
  CHECK_THROWS_AS(find_roots(9.0, Pmf::delta(8)), BatchqError);
  CHECK_THROWS_AS(find_roots(8.0, Pmf::delta(8)), BatchqError);
}

TEST_CASE("spectral inversion matches the power-iterated chain") {
  for (double rho : {0.1, 0.5, 0.9}) {
    for (const Pmf& cap : {Pmf::delta(4), Pmf::delta(8),
                           Pmf::binomial(8, 0.54)}) {
      double load = rho * cap.mean();
      RootSet rs = find_roots(load, cap);
      Pmf z = z_stationary(load, cap, rs);
      Pmf oracle = z_oracle(load, cap, default_k_max(load, cap, 1e-13));
      CHECK(z.tv_distance(oracle) < 1e-7);
    }
  }
}

TEST_CASE("unit capacity reduces to the classical single-server recursion") {
  // Z' = max(Z-1, 0) + Poisson(load): direct fixed-point iteration
  double load = 0.7;
  Pmf cap = Pmf::delta(1);
  Pmf z = z_stationary(load, cap, find_roots(load, cap));
  Pmf oracle = z_oracle(load, cap, 400);
  CHECK(z.tv_distance(oracle) < 1e-9);
  // M/D/1 mean queue at departure epochs: rho + rho^2 / (2 (1 - rho))
  double rho = load;
  CHECK(z.mean() ==
        doctest::Approx(rho + rho * rho / (2.0 * (1.0 - rho))).epsilon(1e-6));
}

TEST_CASE("vanishing load empties the queue") {
  QueueSolution s = solve_station(0.0, 10.0, Pmf::delta(8));
  CHECK(s.z.tv_distance(Pmf::delta(0)) == 0.0);
  CHECK(s.left.tv_distance(Pmf::delta(0)) == 0.0);
  CHECK(s.wait.mean == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(s.wait.variance == doctest::Approx(100.0 / 12.0).epsilon(1e-3));
}

TEST_CASE("left-behind queue") {
  Pmf z(std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2});
  Pmf left = left_behind(z, Pmf::delta(2));
  CHECK(left.at(0) == doctest::Approx(0.6));
  CHECK(left.at(1) == doctest::Approx(0.2));
  CHECK(left.at(2) == doctest::Approx(0.2));
}

TEST_CASE("little's law ties waiting time to the arrival-seen queue") {
  for (double lambda : {0.05, 0.2, 0.3}) {
    Pmf cap = Pmf::binomial(8, 0.5);
    QueueSolution s = solve_station(lambda, 10.0, cap);
    CHECK(lambda * s.wait.mean == doctest::Approx(s.q.mean()).epsilon(1e-4));
  }
}

TEST_CASE("waiting time grows with load") {
  Pmf cap = Pmf::delta(8);
  double prev = 0.0;
  for (double lambda : {0.1, 0.3, 0.5, 0.7}) {
    QueueSolution s = solve_station(lambda, 10.0, cap);
    CHECK(s.wait.mean > prev);
    prev = s.wait.mean;
  }
}

TEST_CASE("capacity variance worsens waiting at equal mean") {
  double lambda = 0.3, beta = 10.0;
  Pmf lo = Pmf::delta(4);
  Pmf hi(std::vector<double>{0.5, 0, 0, 0, 0, 0, 0, 0, 0.5});  // mean 4, var 16
  double w_lo = solve_station(lambda, beta, lo).wait.mean;
  double w_hi = solve_station(lambda, beta, hi).wait.mean;
  CHECK(w_hi > w_lo);
}

TEST_CASE("waiting-time cdf is a proper distribution") {
  QueueSolution s = solve_station(0.5, 10.0, Pmf::delta(8));
  REQUIRE(!s.wait.cdf.empty());
  double prev = -1.0;
  for (double c : s.wait.cdf) {
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(s.wait.cdf.back() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("tail decay root bounds the truncation") {
  double load = 2.5;
  Pmf cap = Pmf::delta(8);
  double x0 = tail_decay_root(load, cap);
  CHECK(x0 > 1.0);
  CHECK(std::abs(load * (x0 - 1.0) + std::log(cap.pgf(1.0 / x0).real())) <
        1e-8);
  int k = default_k_max(load, cap, 1e-12);
  CHECK(k >= 32);
  Pmf z = z_stationary(load, cap, find_roots(load, cap), k);
  CHECK(z.at(k) < 1e-10);
}
