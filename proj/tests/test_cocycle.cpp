#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "skewspec/cocycle.hpp"
#include "skewspec/errors.hpp"
#include "skewspec/rng.hpp"

using namespace skewspec;

namespace {

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace

TEST_SUITE_BEGIN("cocycle");

TEST_CASE("transfer step hand values") {
  Eigen::Matrix2cd s = szego_step(cplx(1.0, 0.0), cplx(0.5, 0.0));
  double r = 1.0 / std::sqrt(0.75);
  CHECK(std::abs(s(0, 0) - r) < 1e-15);
  CHECK(std::abs(s(0, 1) + 0.5 * r) < 1e-15);
  CHECK(std::abs(s(1, 0) + 0.5 * r) < 1e-15);
  CHECK(std::abs(s(1, 1) - r) < 1e-15);

  Eigen::Matrix2cd h = schrodinger_step(0.0, 0.0);
  CHECK(h(0, 0) == cplx(0.0, 0.0));
  CHECK(h(0, 1) == cplx(-1.0, 0.0));
  CHECK(h(1, 0) == cplx(1.0, 0.0));
  CHECK(h(1, 1) == cplx(0.0, 0.0));
  Eigen::Matrix2cd h2 = schrodinger_step(2.0, 0.5);
  CHECK(h2(0, 0) == cplx(1.5, 0.0));

  CHECK_THROWS_AS(szego_step(cplx(1.0, 0.0), cplx(1.0, 0.0)), contract_error);
}

TEST_CASE("step determinants") {
  Rng rng(55);
  for (int t = 0; t < 50; ++t) {
    cplx z = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 6.28));
    cplx alpha = std::polar(rng.uniform(0.0, 0.95), rng.uniform(0.0, 6.28));
    Eigen::Matrix2cd s = szego_step(z, alpha);
    cplx det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    CHECK(std::abs(std::abs(det) - std::abs(z)) < 1e-14);

    Eigen::Matrix2cd h = schrodinger_step(rng.uniform(-3.0, 3.0), rng.uniform(-2.0, 2.0));
    cplx dh = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    CHECK(dh == cplx(1.0, 0.0));  // exact: products of 0 and +-1 entries
  }
}

TEST_CASE("verblunsky growth rate at coupling one half") {
  SkewShiftMap map(2, kGoldenOmega);
  SamplingFunction f = SamplingFunction::canonical(2, cplx(0.5, 0.0));
  LyapunovEstimate est = lyapunov_szego(f, map, unit_phase(0.3), 100000, 32, 7);
  const double target = 0.14384103622589045;  // -log(1 - 1/4) / 2
  CHECK(std::fabs(est.value - target) <= 0.02 * target);
  CHECK(est.std_error > 0.0);
  CHECK(est.value >= -3.0 * est.std_error);
  CHECK(est.renorms == 32L * 3125L);
  CHECK(est.det_drift < 1e-10);
}

TEST_CASE("growth rate does not depend on the circle point") {
  SkewShiftMap map(2, kGoldenOmega);
  SamplingFunction f = SamplingFunction::canonical(2, cplx(0.5, 0.0));
  std::vector<double> angles = {0.05, 0.17, 0.3, 0.55, 0.81};
  std::vector<LyapunovEstimate> runs;
  for (size_t i = 0; i < angles.size(); ++i)
    runs.push_back(lyapunov_szego(f, map, unit_phase(angles[i]), 30000, 16, 900 + i));
  for (size_t i = 0; i < runs.size(); ++i)
    for (size_t j = i + 1; j < runs.size(); ++j) {
      double pooled = std::sqrt(runs[i].std_error * runs[i].std_error +
                                runs[j].std_error * runs[j].std_error);
      CHECK(std::fabs(runs[i].value - runs[j].value) <= 3.0 * pooled);
    }
}

TEST_CASE("schrodinger growth rate at zero energy matches the closed form") {
  SkewShiftMap map(2, kGoldenOmega);
  struct Pin {
    double g, target, rel;
  };
  // Pinned curve: L(0) = log(1 + g^2) / 2, transported from the unitary side
  // at z = -1. Three routes that skip that transport (the transfer product
  // below, the Thouless integral, and an independent long-double rerun) agree
  // with each other on ~0.1176 at g = 1, about a third of the pinned value:
  // taking the real part of the tridiagonal form changes the operator, so a
  // kernel element of the complex form does not solve the real one. The pins
  // stay as stated; this case documents the gap rather than hiding it.
  for (Pin pin : {Pin{1.0, 0.34657359027997264, 0.02}, Pin{0.5, 0.11157177565710488, 0.03},
                  Pin{0.25, 0.03031231090821742, 0.03}}) {
    LyapunovEstimate est = lyapunov_schrodinger(pin.g, map, 0.0, 100000, 32, 21);
    CHECK(std::fabs(est.value - pin.target) <= pin.rel * pin.target);
    CHECK(est.det_drift < 1e-10);
    CHECK(est.value >= -3.0 * est.std_error);
  }
}

TEST_CASE("small coupling growth scales quadratically") {
  SkewShiftMap map(2, kGoldenOmega);
  std::vector<double> gs = {0.1, 0.2, 0.4};
  std::vector<double> lx, ly;
  for (double g : gs) {
    LyapunovEstimate est = lyapunov_schrodinger(g, map, 0.0, 100000, 32, 33);
    REQUIRE(est.value > 0.0);
    lx.push_back(std::log(g));
    ly.push_back(std::log(est.value));
  }
  double slope = fit_slope(lx, ly);
  CHECK(slope >= 1.8);
  CHECK(slope <= 2.2);
}

TEST_CASE("zero potential has zero growth") {
  SkewShiftMap map(2, kGoldenOmega);
  LyapunovEstimate est = lyapunov_schrodinger(0.0, map, 0.0, 100000, 8, 5);
  CHECK(std::fabs(est.value) < 1e-3);
  CHECK(est.det_drift < 1e-12);
}

TEST_CASE("orbit mode follows one orbit and reproduces the sampled answer") {
  SkewShiftMap map(2, kGoldenOmega);
  SamplingFunction f = SamplingFunction::canonical(2, cplx(0.5, 0.0));
  TorusPoint start({0.2, 0.7});
  LyapunovEstimate orbit =
      lyapunov_szego(f, map, unit_phase(0.3), 100000, 8, 7, OrbitAverage::orbit, &start);
  LyapunovEstimate again =
      lyapunov_szego(f, map, unit_phase(0.3), 100000, 8, 7, OrbitAverage::orbit, &start);
  CHECK(orbit.value == again.value);
  const double target = 0.14384103622589045;
  CHECK(std::fabs(orbit.value - target) <= 0.03 * target);

  // null start draws the base point from the seed
  LyapunovEstimate drawn =
      lyapunov_szego(f, map, unit_phase(0.3), 2000, 2, 11, OrbitAverage::orbit, nullptr);
  LyapunovEstimate drawn2 =
      lyapunov_szego(f, map, unit_phase(0.3), 2000, 2, 11, OrbitAverage::orbit, nullptr);
  CHECK(drawn.value == drawn2.value);
  TorusPoint bad({0.1, 0.2, 0.3});
  CHECK_THROWS_AS(
      lyapunov_szego(f, map, unit_phase(0.3), 2000, 2, 11, OrbitAverage::orbit, &bad),
      contract_error);
}

TEST_CASE("estimates are reproducible and thread independent") {
  SkewShiftMap map(2, kGoldenOmega);
  LyapunovEstimate a = lyapunov_schrodinger(0.7, map, 0.3, 4000, 6, 99, OrbitAverage::sampled,
                                            nullptr, 1);
  LyapunovEstimate b = lyapunov_schrodinger(0.7, map, 0.3, 4000, 6, 99, OrbitAverage::sampled,
                                            nullptr, 4);
  LyapunovEstimate c = lyapunov_schrodinger(0.7, map, 0.3, 4000, 6, 98);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.value != c.value);
  CHECK_THROWS_AS(lyapunov_schrodinger(0.7, map, 0.3, 100, 4, 1), contract_error);
  CHECK_THROWS_AS(lyapunov_schrodinger(0.7, map, 0.3, 4000, 0, 1), contract_error);
}

TEST_CASE("thouless integral against hand tables") {
  // unit mass spread over a 2e-9 bin around t0: the integral is log|E - t0|
  IDSTable narrow;
  narrow.energies = {-4.0, 0.25 - 1e-9, 0.25 + 1e-9, 4.0};
  narrow.k = {0.0, 0.0, 1.0, 1.0};
  double expect = std::log(1.05);
  CHECK(std::fabs(thouless_L(narrow, 1.3) - expect) < 1e-6);

  // degenerate zero-width bin takes the exact point-mass path
  IDSTable point;
  point.energies = {-4.0, 0.25, 0.25, 4.0};
  point.k = {0.0, 0.0, 1.0, 1.0};
  CHECK(std::fabs(thouless_L(point, 1.3) - expect) < 1e-15);

  CHECK_THROWS_AS(thouless_L(point, 5.0), contract_error);
  CHECK_THROWS_AS(thouless_L(point, -4.5), contract_error);
}

TEST_CASE("thouless integral of the free chain at energy three") {
  SkewShiftMap map(2, kGoldenOmega);
  std::vector<double> grid;
  for (int j = 0; j <= 1024; ++j) grid.push_back(-4.0 + 8.0 * j / 1024.0);
  IDSTable table = ids_estimate_grid(0.0, map, 2048, 8, grid, 12);
  double value = thouless_L(table, 3.0);
  const double expect = 0.9624236501192069;  // acosh(3/2)
  CHECK(std::fabs(value - expect) <= 0.02 * expect);
}

TEST_CASE("thouless integral matches the direct growth rate at coupling one") {
  SkewShiftMap map(2, kGoldenOmega);
  IDSTable table = ids_estimate(1.0, map, 2048, 16, 513, 44);
  for (double e : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    LyapunovEstimate est = lyapunov_schrodinger(1.0, map, e, 50000, 16, 61);
    CHECK(std::fabs(thouless_L(table, e) - est.value) < 0.02);
  }
}

TEST_SUITE_END();
