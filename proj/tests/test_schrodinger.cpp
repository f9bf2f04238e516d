#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "skewspec/errors.hpp"
#include "skewspec/schrodinger.hpp"

using namespace skewspec;

TEST_SUITE_BEGIN("schrodinger");

TEST_CASE("sampling function values and range") {
  CHECK(skew_sampling_f(TorusPoint({0.0, 0.0})) == doctest::Approx(0.0));
  CHECK(skew_sampling_f(TorusPoint({0.25, 0.0})) == doctest::Approx(1.0));
  CHECK(skew_sampling_f(TorusPoint({0.5, 0.5})) == doctest::Approx(-2.0));
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    TorusPoint y = TorusPoint::random(2, rng);
    CHECK(std::fabs(skew_sampling_f(y)) <= 2.0 + 1e-15);
  }
}

TEST_CASE("window restriction matches pointwise evaluation") {
  SkewShiftMap map(2, kGoldenOmega);
  PotentialSpec spec(0.8, map, TorusPoint({0.12, 0.93}));
  SchrodingerFiniteOp op = restrict_schrodinger(spec, -7, 40);
  CHECK(op.size() == 48);
  for (long n = -7; n <= 40; ++n) {
    CHECK(op.v_at(n) == doctest::Approx(spec.at(n)).epsilon(1e-12));
    CHECK(std::fabs(op.v_at(n)) <= 2.0 * 0.8 + 1e-14);
  }
  CHECK_THROWS_AS(restrict_schrodinger(spec, 3, 2), contract_error);
  CHECK_THROWS_AS(PotentialSpec(-1.0, map, TorusPoint({0.1, 0.2})), contract_error);
  CHECK_NOTHROW(PotentialSpec(0.0, map, TorusPoint({0.1, 0.2})));  // free chain
}

TEST_CASE("shifted system layout") {
  SchrodingerFiniteOp op;
  op.a = 0;
  op.b = 2;
  op.v = {0.5, -0.25, 1.0};
  TridiagonalSystem sys = op.shifted(cplx(0.1, 0.2));
  REQUIRE(sys.diag.size() == 3);
  CHECK(std::abs(sys.diag[0] - cplx(0.4, -0.2)) < 1e-15);
  CHECK(std::abs(sys.diag[1] - cplx(-0.35, -0.2)) < 1e-15);
  CHECK(std::abs(sys.upper[0] - cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(sys.lower[1] - cplx(1.0, 0.0)) < 1e-15);
  Eigen::MatrixXd dense = op.dense();
  CHECK(dense(0, 0) == 0.5);
  CHECK(dense(1, 0) == 1.0);
  CHECK(dense(0, 2) == 0.0);
}

TEST_CASE("resolvent entry on a single site") {
  SchrodingerFiniteOp op;
  op.a = 5;
  op.b = 5;
  op.v = {0.0};
  GreenEntry e = green_entry(op, cplx(0.0, 1.0), 5, 5);
  CHECK(std::abs(e.value - cplx(0.0, 1.0)) < 1e-15);
  CHECK(e.residual < 1e-14);
}

TEST_CASE("resolvent entries match a dense inverse") {
  SkewShiftMap map(2, kGoldenOmega);
  PotentialSpec spec(1.0, map, TorusPoint({0.41, 0.18}));
  SchrodingerFiniteOp op = restrict_schrodinger(spec, 0, 23);
  long n = op.size();

  for (cplx z : {cplx(0.3, 0.7), cplx(-1.2, 0.05), cplx(2.5, -0.4)}) {
    Eigen::MatrixXcd dense = op.dense().cast<cplx>() -
                             z * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd inv = dense.partialPivLu().inverse();
    for (long k = op.a; k <= op.b; k += 5)
      for (long l = op.a; l <= op.b; l += 7) {
        GreenEntry e = green_entry(op, z, k, l);
        CHECK(std::abs(e.value - inv(k - op.a, l - op.a)) < 1e-12);
        // off the real axis the resolvent is bounded by 1/|Im z|
        CHECK(std::abs(e.value) <= 1.0 / std::fabs(z.imag()) + 1e-12);
      }
  }
}

TEST_CASE("resolvent is symmetric in its indices") {
  SkewShiftMap map(2, 0.3);
  PotentialSpec spec(0.5, map, TorusPoint({0.77, 0.02}));
  SchrodingerFiniteOp op = restrict_schrodinger(spec, 2, 33);
  cplx z(0.4, 0.9);
  for (auto [k, l] : {std::pair<long, long>{2, 33}, {5, 20}, {14, 15}}) {
    GreenEntry a = green_entry(op, z, k, l);
    GreenEntry b = green_entry(op, z, l, k);
    CHECK(std::abs(a.value - b.value) < 1e-13);
  }
}

TEST_CASE("exact eigenvalue is rejected") {
  SchrodingerFiniteOp op;
  op.a = 0;
  op.b = 1;
  op.v = {0.0, 0.0};
  // H = [[0,1],[1,0]], z = 1 is an eigenvalue and the pivots vanish exactly
  CHECK_THROWS_AS(green_entry(op, cplx(1.0, 0.0), 0, 1), numeric_error);
  CHECK_THROWS_AS(green_entry(op, cplx(1.0, 0.0), 0, 99), contract_error);
}

TEST_SUITE_END();
