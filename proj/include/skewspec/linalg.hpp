#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace skewspec {

using cplx = std::complex<double>;

// LU factorization of a complex tridiagonal matrix with partial pivoting.
// Row swaps introduce one extra superdiagonal of fill (standard gttrf layout).
class TridiagFactor {
 public:
  // lower[j] couples row j+1 to column j; upper[j] row j to column j+1.
  TridiagFactor(const std::vector<cplx>& lower, const std::vector<cplx>& diag,
                const std::vector<cplx>& upper);

  long size() const { return n_; }
  bool singular() const { return singular_; }
  // |pivot|_min / |pivot|_max, a cheap conditioning proxy; 0 when singular.
  double pivot_ratio() const;

  // Solves A x = b in place. Throws numeric_error when the factorization hit a
  // zero pivot.
  void solve(std::vector<cplx>& b) const;
  void solve(Eigen::VectorXcd& b) const;

 private:
  long n_;
  bool singular_ = false;
  std::vector<cplx> du0_, du1_, du2_, mult_;
  std::vector<unsigned char> swapped_;
};

struct TridiagonalSystem {
  std::vector<cplx> lower, diag, upper;
};

// Largest singular value of inv(A) (= 1 / sigma_min(A)) by power iteration on
// inv(A) inv(A)*, certified through the Rayleigh residual on A* A. Throws
// numeric_error when A is numerically singular.
struct InverseNormResult {
  double norm = 0.0;      // estimate of ||inv(A)||_2
  double residual = 0.0;  // ||A*A v - sigma^2 v|| / sigma^2 at the returned vector
  int iterations = 0;
};

InverseNormResult inverse_operator_norm(const TridiagonalSystem& a, int max_iter = 200,
                                        double tol = 1e-10);

// All columns of inv(A) for a tridiagonal A; column l is inv(A) e_l.
Eigen::MatrixXcd tridiag_inverse(const TridiagonalSystem& a);

struct CertifiedColumn {
  std::vector<cplx> values;
  double residual = 0.0;            // ||A col - e_l||_inf after one refinement pass
  double condition_estimate = 0.0;  // 1 / pivot ratio of the factorization
};

// Column col of inv(A) with a residual certificate. Throws numeric_error when
// the pivots collapse or the certificate fails (z effectively on the spectrum).
CertifiedColumn certified_inverse_column(const TridiagonalSystem& a, long col);

double frobenius(const Eigen::Matrix2cd& m);

}  // namespace skewspec
