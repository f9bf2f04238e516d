#include <doctest.h>

#include <cmath>

#include "skewspec/cmv.hpp"
#include "skewspec/errors.hpp"
#include "skewspec/schrodinger.hpp"

using namespace skewspec;

TEST_SUITE_BEGIN("cmv");

namespace {

VerblunskyPath zero_path(long a, long b) {
  VerblunskyPath p;
  p.a = a;
  p.b = b;
  p.alphas.assign(static_cast<size_t>(b - a + 1), cplx(0.0, 0.0));
  p.rhos.assign(static_cast<size_t>(b - a + 1), 1.0);
  return p;
}

VerblunskyPath canonical_path(double lambda, long a, long b, double x1 = 0.2,
                              double x2 = 0.7) {
  SamplingFunction f = SamplingFunction::canonical(2, cplx(lambda, 0.0));
  SkewShiftMap map(2, kGoldenOmega);
  return verblunsky_path(f, map, TorusPoint({x1, x2}), a, b);
}

}  // namespace

TEST_CASE("theta block is unitary") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    double mod = rng.uniform(0.0, 0.999);
    double arg = rng.uniform(0.0, 2.0 * M_PI);
    ThetaBlock blk{cplx(mod * std::cos(arg), mod * std::sin(arg)),
                   std::sqrt(1.0 - mod * mod)};
    CHECK(blk.unitarity_defect() < 1e-15);
  }
}

TEST_CASE("free window [0,3] is the expected signed permutation") {
  FiniteCmv op = assemble_finite_cmv(zero_path(0, 3), cplx(1.0, 0.0), cplx(1.0, 0.0));
  REQUIRE(op.has_dense);
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
  want(0, 2) = 1.0;
  want(1, 0) = -1.0;
  want(2, 3) = 1.0;
  want(3, 1) = 1.0;
  CHECK((op.op - want).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(op.unitarity_defect < 1e-14);
}

TEST_CASE("single site window") {
  FiniteCmv op = assemble_finite_cmv(zero_path(0, 0), unit_phase(0.2), unit_phase(0.4));
  CHECK(op.size() == 1);
  CHECK(std::abs(std::abs(op.op(0, 0)) - 1.0) < 1e-14);
  cplx z(0.3, 0.4);
  TridiagonalMatrix a = tridiagonal_a(op, z);
  CHECK(std::abs(a.diag[0] - (z * unit_phase(0.4) + unit_phase(0.2))) < 1e-14);
}

TEST_CASE("unitarity across the four end-parity layouts") {
  for (auto [a, b] : {std::pair<long, long>{0, 63}, {0, 64}, {1, 64}, {1, 63}}) {
    FiniteCmv op = assemble_finite_cmv(canonical_path(0.5, a, b), unit_phase(0.15),
                                       unit_phase(0.85));
    CHECK(op.unitarity_defect < 1e-12);
    // factors themselves are unitary and at most 2-banded
    long n = op.size();
    CHECK((op.factor_l.adjoint() * op.factor_l - Eigen::MatrixXcd::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((op.factor_m.adjoint() * op.factor_m - Eigen::MatrixXcd::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        if (std::labs(i - j) >= 2) {
          CHECK(op.factor_l(i, j) == cplx(0.0, 0.0));
          CHECK(op.factor_m(i, j) == cplx(0.0, 0.0));
        }
  }
}

TEST_CASE("closed-form tridiagonal equals the factor product") {
  Rng rng(77);
  for (int trial = 0; trial < 12; ++trial) {
    long a = static_cast<long>(rng.uniform_index(4));
    long b = a + 16 + static_cast<long>(rng.uniform_index(17));
    double angle = rng.uniform(0.0, 1.0);
    cplx z = unit_phase(angle);
    FiniteCmv op = assemble_finite_cmv(canonical_path(0.5, a, b),
                                       unit_phase(rng.uniform01()),
                                       unit_phase(rng.uniform01()));
    Eigen::MatrixXcd product = a_matrix_from_factors(op, z);
    Eigen::MatrixXcd closed = tridiagonal_a(op, z).dense();
    CHECK((product - closed).cwiseAbs().maxCoeff() < 1e-13);
    // the product form is genuinely tridiagonal
    long n = op.size();
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        if (std::labs(i - j) >= 2) CHECK(std::abs(product(i, j)) < 1e-15);
  }
}

TEST_CASE("free coefficients give alternating off-diagonals at z = 1") {
  FiniteCmv op = assemble_finite_cmv(zero_path(0, 9), cplx(1.0, 0.0), cplx(1.0, 0.0));
  TridiagonalMatrix a = tridiagonal_a(op, cplx(1.0, 0.0));
  for (long j = 1; j < 9; ++j) CHECK(std::abs(a.diag[static_cast<size_t>(j)]) < 1e-15);
  CHECK(std::abs(a.diag[0] - cplx(1.0, 0.0)) < 1e-15);  // picks up beta at the low end
  for (long j = 0; j < 9; ++j) {
    cplx want = (j % 2 == 0) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
    CHECK(std::abs(a.off[static_cast<size_t>(j)] - want) < 1e-15);
  }
}

TEST_CASE("reduction constants at lambda = 0.6") {
  FiniteCmv op = assemble_finite_cmv(canonical_path(0.6, 0, 40), cplx(1.0, 0.0),
                                     cplx(1.0, 0.0));
  SchrodingerReduction red = schrodinger_reduction(op);
  CHECK(red.g == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(red.rho == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(red.b_off == doctest::Approx(-0.8).epsilon(1e-12));
  for (size_t i = 0; i < red.diagonal.size(); ++i)
    CHECK(red.diagonal[i] == doctest::Approx(red.b_diag[i] / 0.8).epsilon(1e-12));
}

TEST_CASE("reduction rejects non-constant modulus") {
  TrigPolynomial tp(2);
  tp.add({0, 1}, cplx(0.3, 0.0));
  tp.add({1, 0}, cplx(0.2, 0.0));
  SamplingFunction f = SamplingFunction::trig_poly(tp);
  SkewShiftMap map(2, kGoldenOmega);
  VerblunskyPath p = verblunsky_path(f, map, TorusPoint({0.3, 0.1}), 0, 20);
  FiniteCmv op = assemble_finite_cmv(p, cplx(1.0, 0.0), cplx(1.0, 0.0));
  CHECK_THROWS_AS(schrodinger_reduction(op), contract_error);
}

TEST_CASE("reduction equals the direct schrodinger window") {
  double lambda = 0.5;
  SkewShiftMap map(2, kGoldenOmega);
  TorusPoint x({0.31, 0.64});
  long a = 1, b = 100;
  VerblunskyPath p = canonical_path(lambda, a, b, 0.31, 0.64);

  // boundary phases encode the orbit's real parts so the edge rows agree too
  auto phase_for = [&](long n) {
    double c = lambda * std::cos(2.0 * M_PI * map.iterate(x, n).coords[1]);
    return cplx(c, std::sqrt(1.0 - c * c));
  };
  FiniteCmv op = assemble_finite_cmv(p, phase_for(a - 1), phase_for(b));
  SchrodingerReduction red = schrodinger_reduction(op);

  double g = lambda / std::sqrt(1.0 - lambda * lambda);
  PotentialSpec spec(g, map, map.inverse_step(x));
  SchrodingerFiniteOp direct = restrict_schrodinger(spec, a, b);
  REQUIRE(direct.size() == static_cast<long>(red.diagonal.size()));
  for (long n = a; n <= b; ++n)
    CHECK(std::fabs(red.diagonal[static_cast<size_t>(n - a)] - direct.v_at(n)) < 1e-12);

  // spectra of B / rho and of the reduced operator coincide (sign conjugation)
  long n = op.size();
  Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    bmat(i, i) = red.b_diag[static_cast<size_t>(i)];
    if (i + 1 < n) {
      bmat(i, i + 1) = red.b_off;
      bmat(i + 1, i) = red.b_off;
    }
  }
  Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    hmat(i, i) = red.diagonal[static_cast<size_t>(i)];
    if (i + 1 < n) {
      hmat(i, i + 1) = 1.0;
      hmat(i + 1, i) = 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(bmat / red.rho), eh(hmat);
  CHECK((eb.eigenvalues() - eh.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dense assembly rejects oversized windows but keeps the path") {
  VerblunskyPath p = zero_path(0, 1500);
  CHECK_THROWS_AS(assemble_finite_cmv(p, cplx(1.0, 0.0), cplx(1.0, 0.0)), contract_error);
  FiniteCmv op = assemble_finite_cmv(p, cplx(1.0, 0.0), cplx(1.0, 0.0), false);
  CHECK(!op.has_dense);
  TridiagonalMatrix a = tridiagonal_a(op, cplx(-1.0, 0.0));
  CHECK(a.size() == 1501);
}

TEST_CASE("boundary phases must be unimodular") {
  CHECK_THROWS_AS(assemble_finite_cmv(zero_path(0, 4), cplx(0.5, 0.0), cplx(1.0, 0.0)),
                  contract_error);
}

TEST_SUITE_END();
