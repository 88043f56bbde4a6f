#include "doctest.h"

#include <complex>

#include "liftline/pmf.hpp"

using liftline::Pmf;

TEST_CASE("four occupancy laws with mean 4 and variances 0, 4, 9, 16") {
  Pmf d4 = Pmf::delta(4);
  Pmf two_six(std::vector<double>{0, 0, 0.5, 0, 0, 0, 0.5});
  Pmf one_seven(std::vector<double>{0, 0.5, 0, 0, 0, 0, 0, 0.5});
  Pmf zero_eight(std::vector<double>{0.5, 0, 0, 0, 0, 0, 0, 0, 0.5});
  for (const Pmf* p : {&d4, &two_six, &one_seven, &zero_eight})
    CHECK(p->mean() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(d4.variance() == doctest::Approx(0.0));
  CHECK(two_six.variance() == doctest::Approx(4.0));
  CHECK(one_seven.variance() == doctest::Approx(9.0));
  CHECK(zero_eight.variance() == doctest::Approx(16.0));
}

TEST_CASE("pgf evaluation") {
  Pmf d4 = Pmf::delta(4);
  std::complex<double> z(0.3, 0.4);
  CHECK(std::abs(d4.pgf(z) - std::pow(z, 4)) < 1e-14);
  Pmf zero_eight(std::vector<double>{0.5, 0, 0, 0, 0, 0, 0, 0, 0.5});
  // even symmetric law: pgf at -1 equals total even mass = 1
  CHECK(zero_eight.pgf(-1.0).real() == doctest::Approx(1.0));
  CHECK(zero_eight.pgf(1.0).real() == doctest::Approx(1.0));
}

TEST_CASE("cdf and support") {
  Pmf p(std::vector<double>{0.2, 0.0, 0.8});
  CHECK(p.support_max() == 2);
  CHECK(p.cdf(-1) == 0.0);
  CHECK(p.cdf(0) == doctest::Approx(0.2));
  CHECK(p.cdf(1) == doctest::Approx(0.2));
  CHECK(p.cdf(2) == 1.0);
  CHECK(p.cdf(100) == 1.0);
  CHECK(p.at(3) == 0.0);
  CHECK(p.at(-1) == 0.0);
}

TEST_CASE("constructor rejects bad mass") {
  CHECK_THROWS(Pmf(std::vector<double>{0.5, 0.4}));
  CHECK_THROWS(Pmf(std::vector<double>{1.2, -0.2}));
  CHECK_THROWS(Pmf(std::vector<double>{}));
}

TEST_CASE("binomial thinning") {
  Pmf d2 = Pmf::delta(2);
  Pmf t = d2.thin(0.5);
  CHECK(t.at(0) == doctest::Approx(0.25));
  CHECK(t.at(1) == doctest::Approx(0.5));
  CHECK(t.at(2) == doctest::Approx(0.25));
  CHECK(d2.thin(1.0).at(2) == doctest::Approx(1.0));
  CHECK(d2.thin(0.0).at(0) == doctest::Approx(1.0));
  // mean scales by the keep probability
  Pmf p(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(p.thin(0.3).mean() == doctest::Approx(0.3 * p.mean()).epsilon(1e-12));
}

TEST_CASE("binomial family") {
  Pmf b = Pmf::binomial(8, 0.54);
  CHECK(b.mean() == doctest::Approx(8 * 0.54).epsilon(1e-12));
  CHECK(b.variance() == doctest::Approx(8 * 0.54 * 0.46).epsilon(1e-12));
  CHECK(Pmf::binomial(5, 1.0).at(5) == doctest::Approx(1.0));
  CHECK(Pmf::binomial(5, 0.0).at(0) == doctest::Approx(1.0));
}

TEST_CASE("poisson moments") {
  Pmf p = Pmf::poisson(2.5);
  CHECK(p.mean() == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(p.variance() == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(Pmf::poisson(0.0).at(0) == 1.0);
}

TEST_CASE("convolution adds independent variables") {
  Pmf a = Pmf::delta(3);
  Pmf b(std::vector<double>{0.5, 0.5});
  Pmf c = convolve(a, b);
  CHECK(c.at(3) == doctest::Approx(0.5));
  CHECK(c.at(4) == doctest::Approx(0.5));
  Pmf p = Pmf::binomial(4, 0.3);
  Pmf q = Pmf::binomial(6, 0.3);
  CHECK(convolve(p, q).tv_distance(Pmf::binomial(10, 0.3)) < 1e-12);
}

TEST_CASE("total variation distance") {
  Pmf a = Pmf::delta(0);
  Pmf b = Pmf::delta(5);
  CHECK(a.tv_distance(b) == doctest::Approx(1.0));
  CHECK(a.tv_distance(a) == 0.0);
}
