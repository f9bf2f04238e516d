#include "skewspec/cmv.hpp"

#include <cmath>

#include "skewspec/errors.hpp"

namespace skewspec {

namespace {
constexpr long kDenseCap = 1024;
constexpr double kUnimodularTol = 1e-12;

bool unimodular(cplx z) { return std::fabs(std::abs(z) - 1.0) <= kUnimodularTol; }
}  // namespace

Eigen::Matrix2cd ThetaBlock::matrix() const {
  Eigen::Matrix2cd m;
  m << std::conj(alpha), cplx(rho, 0.0), cplx(rho, 0.0), -alpha;
  return m;
}

double ThetaBlock::unitarity_defect() const {
  Eigen::Matrix2cd m = matrix();
  return (m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

cplx FiniteCmv::alpha_slot(long n) const {
  if (n == a - 1) return beta;
  if (n == b) return beta_tilde;
  require(n >= a && n < b, "FiniteCmv::alpha_slot: index outside [a-1, b]");
  return path.alpha(n);
}

double FiniteCmv::rho_slot(long n) const {
  if (n == a - 1 || n == b) return 0.0;
  require(n >= a && n < b, "FiniteCmv::rho_slot: index outside [a-1, b]");
  return path.rho(n);
}

FiniteCmv assemble_finite_cmv(const VerblunskyPath& path, cplx beta, cplx beta_tilde,
                              bool with_dense) {
  require(path.b >= path.a, "assemble_finite_cmv: empty path");
  require(unimodular(beta) && unimodular(beta_tilde),
          "assemble_finite_cmv: boundary phases must be unimodular");
  FiniteCmv op;
  op.a = path.a;
  op.b = path.b;
  op.path = path;
  op.beta = beta;
  op.beta_tilde = beta_tilde;

  if (!with_dense) return op;
  long n = op.size();
  require(n <= kDenseCap,
          "assemble_finite_cmv: dense assembly capped at 1024 sites; use the "
          "tridiagonal form for larger windows");

  auto fill_factor = [&](long parity) {
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, n);
    // blocks start at sites m with m mod 2 == parity, covering {m, m+1}
    long first = op.a - 1;
    while (((first % 2) + 2) % 2 != parity) ++first;
    for (long m = first; m <= op.b; m += 2) {
      long i = m - op.a;       // local row of the block start
      if (m < op.a) {          // straddles the lower end: keep the (a, a) corner
        f(0, 0) = -op.alpha_slot(m);
      } else if (m == op.b) {  // straddles the upper end: keep the (b, b) corner
        f(n - 1, n - 1) = std::conj(op.alpha_slot(m));
      } else {
        ThetaBlock blk{op.path.alpha(m), op.path.rho(m)};
        f.block<2, 2>(i, i) = blk.matrix();
      }
    }
    return f;
  };

  op.factor_l = fill_factor(0);
  op.factor_m = fill_factor(1);
  op.op = op.factor_l * op.factor_m;
  op.unitarity_defect =
      (op.op.adjoint() * op.op - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  op.has_dense = true;
  if (op.unitarity_defect > 1e-10)
    throw numeric_error("assemble_finite_cmv: unitarity certification failed",
                        op.unitarity_defect);
  return op;
}

Eigen::MatrixXcd TridiagonalMatrix::dense() const {
  long n = size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (long j = 0; j < n; ++j) {
    m(j, j) = diag[static_cast<size_t>(j)];
    if (j + 1 < n) {
      m(j, j + 1) = off[static_cast<size_t>(j)];
      m(j + 1, j) = off[static_cast<size_t>(j)];
    }
  }
  return m;
}

TridiagonalMatrix tridiagonal_a(const FiniteCmv& op, cplx z) {
  require(std::isfinite(z.real()) && std::isfinite(z.imag()), "tridiagonal_a: z must be finite");
  long n = op.size();
  TridiagonalMatrix t;
  t.diag.resize(static_cast<size_t>(n));
  t.off.resize(static_cast<size_t>(n > 0 ? n - 1 : 0));
  for (long j = op.a; j <= op.b; ++j) {
    bool even = ((j % 2) + 2) % 2 == 0;
    cplx d = even ? z * op.alpha_slot(j) + op.alpha_slot(j - 1)
                  : -z * std::conj(op.alpha_slot(j - 1)) - std::conj(op.alpha_slot(j));
    t.diag[static_cast<size_t>(j - op.a)] = d;
    if (j < op.b) {
      double rho = op.rho_slot(j);
      t.off[static_cast<size_t>(j - op.a)] = even ? z * rho : cplx(-rho, 0.0);
    }
  }
  return t;
}

Eigen::MatrixXcd a_matrix_from_factors(const FiniteCmv& op, cplx z) {
  require(op.has_dense, "a_matrix_from_factors: dense factors were not assembled");
  return z * op.factor_l.adjoint() - op.factor_m;
}

SchrodingerReduction schrodinger_reduction(const FiniteCmv& op) {
  long n = op.size();
  double mod = std::abs(op.path.alpha(op.a));
  for (long j = op.a; j <= op.b; ++j)
    if (std::fabs(std::abs(op.path.alpha(j)) - mod) > 1e-12)
      throw contract_error(
          "schrodinger_reduction: reduction unavailable, |alpha| is not constant "
          "along the path (first deviation at n = " +
          std::to_string(j) + ")");
  require(mod > 0.0 && mod < 1.0, "schrodinger_reduction: need 0 < |alpha| < 1");

  SchrodingerReduction red;
  red.a = op.a;
  red.b = op.b;
  red.rho = std::sqrt(1.0 - mod * mod);
  red.g = mod / red.rho;
  red.b_off = -red.rho;
  red.b_diag.resize(static_cast<size_t>(n));
  red.diagonal.resize(static_cast<size_t>(n));
  for (long j = op.a; j <= op.b; ++j) {
    double bj = (op.alpha_slot(j - 1) - op.alpha_slot(j)).real();
    red.b_diag[static_cast<size_t>(j - op.a)] = bj;
    red.diagonal[static_cast<size_t>(j - op.a)] = bj / red.rho;
  }
  return red;
}

}  // namespace skewspec
