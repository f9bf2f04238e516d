#pragma once

#include "skewspec/linalg.hpp"
#include "skewspec/torus.hpp"

namespace skewspec {

// V(n) = g f(T^n x) with f(y) = cos(2 pi y_r) - cos(2 pi (y_r + y_{r-1})).
struct PotentialSpec {
  double g = 1.0;
  SkewShiftMap map{2, 0.0};
  TorusPoint x;

  PotentialSpec(double g_, SkewShiftMap map_, TorusPoint x_);
  double at(long n) const;  // iterates from x; fine for one-off queries
};

double skew_sampling_f(const TorusPoint& y);

// H on sites [a, b] with Dirichlet truncation: off-diagonals exactly 1,
// diagonal the potential window.
struct SchrodingerFiniteOp {
  long a = 0;
  long b = -1;
  std::vector<double> v;

  long size() const { return b - a + 1; }
  double v_at(long n) const { return v[static_cast<size_t>(n - a)]; }
  TridiagonalSystem shifted(cplx z) const;  // H - z as a complex tridiagonal system
  Eigen::MatrixXd dense() const;
};

// Builds V(n) for n in [a, b] from a single orbit sweep.
SchrodingerFiniteOp restrict_schrodinger(const PotentialSpec& spec, long a, long b);

struct GreenEntry {
  cplx value{0.0, 0.0};
  double residual = 0.0;            // ||(H - z) col - delta_l||_inf after refinement
  double condition_estimate = 0.0;  // 1 / pivot ratio of the factorization
};

// <delta_k, (H - z)^{-1} delta_l>; throws numeric_error near eigenvalues where
// the residual certification fails.
GreenEntry green_entry(const SchrodingerFiniteOp& op, cplx z, long k, long l);

}  // namespace skewspec
