#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "skewspec/errors.hpp"
#include "skewspec/torus.hpp"

using namespace skewspec;

TEST_SUITE_BEGIN("torus");

TEST_CASE("frac stays in [0,1)") {
  CHECK(frac(0.0) == 0.0);
  CHECK(frac(1.0) == 0.0);
  CHECK(frac(-1.0) == 0.0);
  CHECK(frac(1.25) == doctest::Approx(0.25));
  CHECK(frac(-0.25) == doctest::Approx(0.75));
  CHECK(frac(-1e-17) < 1.0);
  CHECK(frac(-1e-17) >= 0.0);
}

TEST_CASE("skew shift hand cases") {
  SkewShiftMap m2(2, 0.5);
  TorusPoint x({0.25, 0.5});
  TorusPoint y = m2.step(x);
  CHECK(y[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(0.75).epsilon(1e-15));

  SkewShiftMap m3(3, 0.1);
  TorusPoint x3({0.9, 0.9, 0.9});
  TorusPoint y3 = m3.step(x3);
  CHECK(y3[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(y3[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(y3[2] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("iterate composition is exact and inverse round-trips") {
  SkewShiftMap m(3, kGoldenOmega);
  Rng rng(91);
  TorusPoint x = TorusPoint::random(3, rng);

  TorusPoint direct = m.iterate(x, 700);
  TorusPoint split = m.iterate(m.iterate(x, 300), 400);
  for (int i = 0; i < 3; ++i) CHECK(direct[i] == split[i]);  // same fold, bitwise equal

  TorusPoint back = m.iterate(m.iterate(x, 10000), -10000);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(back[i] - x[i]) < 1e-11);
}

TEST_CASE("closed form for the last coordinate, r = 2") {
  SkewShiftMap m(2, kGoldenOmega);
  Rng rng(12);
  TorusPoint x = TorusPoint::random(2, rng);
  TorusPoint y = x;
  for (long n = 1; n <= 1000; ++n) {
    y = m.step(y);
    double pred = m.closed_form_last(x, n);
    CHECK(circle_dist(y[1], pred) < 1e-9);
  }
  CHECK(m.closed_form_last(x, 0) == doctest::Approx(x[1]));
  // from the origin the last coordinate is frac(omega n(n-1)/2)
  TorusPoint origin({0.0, 0.0});
  double pred3 = m.closed_form_last(origin, 3);
  CHECK(pred3 == doctest::Approx(frac(3.0 * kGoldenOmega)).epsilon(1e-12));
}

TEST_CASE("diophantine quality") {
  // rational frequency collapses at its denominator
  DiophantineReport rat = diophantine_quality(0.5, 10);
  CHECK(rat.kappa_lower == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rat.worst_q == 2);

  // q_max = 1 reduces to dist(omega, Z)
  DiophantineReport one = diophantine_quality(0.3, 1);
  CHECK(one.kappa_lower == doctest::Approx(0.3));

  // golden mean: the minimum of q^2 dist(q omega, Z) over q <= 1000 sits at
  // q = 1 with value (3 - sqrt 5)/2; later q only grow the product.
  DiophantineReport gold = diophantine_quality(kGoldenOmega, 1000);
  CHECK(gold.kappa_lower == doctest::Approx(0.38196601125010515).epsilon(1e-10));
  CHECK(gold.worst_q == 1);
  CHECK(gold.kappa_lower >= 0.0);

  // monotone nonincreasing in q_max
  double prev = diophantine_quality(kGoldenOmega, 10).kappa_lower;
  for (long q : {100L, 1000L, 5000L}) {
    double cur = diophantine_quality(kGoldenOmega, q).kappa_lower;
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("ball region membership and measure") {
  BallRegion ball(TorusPoint({0.05, 0.95}), 0.1);
  CHECK(ball.contains(TorusPoint({0.99, 0.03})));  // wraps around both axes
  CHECK(!ball.contains(TorusPoint({0.2, 0.95})));
  CHECK(ball.measure() == doctest::Approx(0.04));

  BallRegion all(TorusPoint({0.5, 0.5}), 0.6);
  CHECK(all.measure() == doctest::Approx(1.0));
  CHECK(all.contains(TorusPoint({0.0, 0.0})));
}

TEST_CASE("return times: covering region hits every step") {
  SkewShiftMap m(2, kGoldenOmega);
  BallRegion all(TorusPoint({0.5, 0.5}), 0.5);
  ReturnTimeStats st = return_time_count(m, TorusPoint({0.1, 0.2}), all, 500);
  CHECK(st.hits == 500);
  CHECK(st.frequency == doctest::Approx(1.0));
  CHECK(st.target_measure == doctest::Approx(1.0));
}

TEST_CASE("return times approach the target measure") {
  SkewShiftMap m(2, kGoldenOmega);
  Rng rng(2026);
  std::vector<double> err3, err4, err5;
  for (int trial = 0; trial < 5; ++trial) {
    Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
    TorusPoint x = TorusPoint::random(2, sub);
    BallRegion ball(TorusPoint::random(2, sub), 0.1);
    double target = ball.measure();
    err3.push_back(std::fabs(return_time_count(m, x, ball, 1000).frequency - target));
    err4.push_back(std::fabs(return_time_count(m, x, ball, 10000).frequency - target));
    err5.push_back(std::fabs(return_time_count(m, x, ball, 100000).frequency - target));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  double m3 = median(err3), m4 = median(err4), m5 = median(err5);
  CHECK(m4 < m3);
  CHECK(m5 < m4);
  CHECK(m5 < 0.01);
}

TEST_CASE("contract violations") {
  CHECK_THROWS_AS(SkewShiftMap(0, 0.3), contract_error);
  CHECK_THROWS_AS(diophantine_quality(0.3, 0), contract_error);
  CHECK_THROWS_AS(BallRegion(TorusPoint({0.1}), 0.0), contract_error);
  SkewShiftMap m(2, 0.3);
  CHECK_THROWS_AS(m.step(TorusPoint({0.1, 0.2, 0.3})), contract_error);
  CHECK_THROWS_AS(TorusPoint({0.1, std::nan("")}), contract_error);
}

TEST_SUITE_END();
