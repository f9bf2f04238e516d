#pragma once

#include <Eigen/Dense>

#include "skewspec/sampling.hpp"

namespace skewspec {

// 2x2 rotation block [[conj(alpha), rho], [rho, -alpha]]; unitary when
// |alpha|^2 + rho^2 = 1.
struct ThetaBlock {
  cplx alpha{0.0, 0.0};
  double rho = 1.0;

  Eigen::Matrix2cd matrix() const;
  double unitarity_defect() const;  // max entry of |Theta* Theta - I|
};

// Unitary window E = L * M on sites [a, b]. L carries the even-indexed blocks,
// M the odd ones; the blocks straddling the ends are collapsed to unimodular
// scalars by the boundary phases (alpha_{a-1} = beta, alpha_b = beta_tilde).
struct FiniteCmv {
  long a = 0;
  long b = -1;
  VerblunskyPath path;
  cplx beta{1.0, 0.0};
  cplx beta_tilde{1.0, 0.0};

  bool has_dense = false;
  Eigen::MatrixXcd factor_l, factor_m, op;  // filled when has_dense
  double unitarity_defect = 0.0;            // max entry of |E* E - I|

  long size() const { return b - a + 1; }
  // alpha with the boundary substitution: slot a-1 gives beta, slot b gives
  // beta_tilde, interior slots come from the path.
  cplx alpha_slot(long n) const;
  double rho_slot(long n) const;  // zero at the boundary slots
};

// Dense factors are assembled when with_dense is set (size capped at 1024);
// larger windows keep only the path and are served by the tridiagonal form.
FiniteCmv assemble_finite_cmv(const VerblunskyPath& path, cplx beta, cplx beta_tilde,
                              bool with_dense = true);

// Tridiagonal A(z) = z L* - M, stored as diagonal plus the (equal) off-diagonals.
struct TridiagonalMatrix {
  std::vector<cplx> diag;
  std::vector<cplx> off;  // off[j] couples sites j and j+1

  long size() const { return static_cast<long>(diag.size()); }
  Eigen::MatrixXcd dense() const;
};

// Closed form: diag_j = z a_j + a_{j-1} (j even) or -z conj(a_{j-1}) - conj(a_j)
// (j odd); off_j = z rho_j (j even) or -rho_j (j odd). Indices are absolute sites.
TridiagonalMatrix tridiagonal_a(const FiniteCmv& op, cplx z);

// Oracle route: the literal product z L* - M from the dense factors.
Eigen::MatrixXcd a_matrix_from_factors(const FiniteCmv& op, cplx z);

struct SchrodingerReduction {
  long a = 0;
  long b = -1;
  double g = 0.0;                 // |lambda| / sqrt(1 - |lambda|^2)
  double rho = 0.0;               // the constant sqrt(1 - |lambda|^2)
  std::vector<double> diagonal;   // potential values, off-diagonals are exactly 1
  std::vector<double> b_diag;     // Re(z A) diagonal before scaling
  double b_off = 0.0;             // constant off-diagonal of B, equals -rho
};

// Real reduction at z = -1: B = Re(z L* - M) has diag Re(a_{j-1} - a_j) and
// off-diagonals -rho. Conjugating B/rho by the alternating sign matrix gives a
// discrete Schrodinger operator with off-diagonals exactly 1; the diagonal it
// produces is the potential returned here. Requires constant |alpha| on the path.
SchrodingerReduction schrodinger_reduction(const FiniteCmv& op);

}  // namespace skewspec
