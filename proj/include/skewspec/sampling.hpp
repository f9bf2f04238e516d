#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skewspec/torus.hpp"

namespace skewspec {

using cplx = std::complex<double>;

inline cplx unit_phase(double t) {  // e(t) = exp(2*pi*i*t)
  double a = 6.283185307179586476925286766559 * t;
  return cplx(std::cos(a), std::sin(a));
}

// Finite Fourier sum g(x) = sum_k ghat(k) e(k.x) with k in Z^r, |k|_inf <= degree().
// Coefficients are kept in a sorted map so that iteration, arithmetic and
// serialization are deterministic.
struct TrigPolynomial {
  int r = 0;
  std::map<std::vector<int>, cplx> coeffs;

  explicit TrigPolynomial(int r_ = 0) : r(r_) {}

  int degree() const;
  void add(const std::vector<int>& k, cplx c);  // accumulates, drops exact zeros
  cplx eval(const TorusPoint& x) const;
  double coeff_abs_sum() const;
  // sum_k |ghat(k)| 2 pi |k|_inf, a Lipschitz bound in the sup metric
  double lipschitz_bound() const;

  TrigPolynomial truncated(int D) const;
  TrigPolynomial conjugated() const;              // coefficients conj, lattice negated
  TrigPolynomial product(const TrigPolynomial& other) const;

  std::string to_json() const;
  static TrigPolynomial from_json(const std::string& text);
};

// Verblunsky generator f on T^r with sup |f| < 1.
// canonical: f(x) = lambda e(x_r); trig_poly: an explicit coefficient table.
class SamplingFunction {
 public:
  enum class Kind { canonical, trig_poly };

  static SamplingFunction canonical(int r, cplx lambda);
  static SamplingFunction trig_poly(TrigPolynomial tp);

  Kind kind() const { return kind_; }
  int r() const { return r_; }
  cplx lambda() const { return lambda_; }

  cplx eval(const TorusPoint& x) const;
  const TrigPolynomial& fourier() const { return table_; }

  // sup_grid |f| + Lipschitz slack; must be < 1 for a valid generator.
  double sup_bound(int grid_per_dim = 64) const;

 private:
  SamplingFunction() = default;
  Kind kind_ = Kind::canonical;
  int r_ = 2;
  cplx lambda_{0.0, 0.0};
  TrigPolynomial table_;
};

// alpha_n = f(T^n x) for n in [a, b], rho_n = sqrt(1 - |alpha_n|^2).
struct VerblunskyPath {
  long a = 0;
  long b = -1;
  std::vector<cplx> alphas;
  std::vector<double> rhos;

  long size() const { return b - a + 1; }
  cplx alpha(long n) const { return alphas[static_cast<size_t>(n - a)]; }
  double rho(long n) const { return rhos[static_cast<size_t>(n - a)]; }
  VerblunskyPath window(long a2, long b2) const;  // slice to [a2, b2]
};

VerblunskyPath verblunsky_path(const SamplingFunction& f, const SkewShiftMap& map,
                               const TorusPoint& x, long a, long b);

// Degree-D truncation of the coefficient table of f.
TrigPolynomial trig_truncate(const SamplingFunction& f, int D);

// Partial sum of sqrt(1-x) = sum_n c_n x^n with c_0 = 1, c_{n+1} = c_n (2n-1)/(2n+2).
// For |x| <= r < 1 the truncation error is at most r^N / (1-r).
double sqrt_taylor(double x, int N);

// The affine form of n steps of the map: iterate(x, n) = U x + c mod 1 with U
// integer unipotent. Exposed for the polynomial lift and for grid oracles.
struct SkewAffine {
  int r = 0;
  std::vector<std::vector<std::int64_t>> u;  // r x r, lower triangular, ones on diagonal
  std::vector<double> c;

  TorusPoint apply(const TorusPoint& x) const;
};

SkewAffine skew_affine_power(const SkewShiftMap& map, long n);

// Lift g(T^n x) to a trig polynomial in x: lattice points map to U^T k and
// coefficients pick up the phase e(k.c).
TrigPolynomial compose_skew_lift(const TrigPolynomial& g, const SkewShiftMap& map, long n);

struct RhoApproxResult {
  TrigPolynomial p_alpha;    // approximates x -> f(T^n x), degree grows with n
  TrigPolynomial p_rho;      // sqrt-Taylor composition approximating rho along the orbit
  double alpha_sup_error = 0.0;  // sup over the evaluation grid
  double rho_sup_error = 0.0;
  int taylor_terms = 0;
};

// p_alpha: degree-floor(sqrt(D)) truncation of f composed with n map steps.
// p_rho: sum_{m<=floor(sqrt(D))} c_m (|p_alpha|^2)^m.
RhoApproxResult rho_poly_approx(const SamplingFunction& f, const SkewShiftMap& map,
                                long n, int D, int grid_per_dim = 128);

// Largest |g(x) - samples| over the dyadic grid (points j/grid per axis).
double grid_sup_error(const TrigPolynomial& g, const SkewShiftMap& map, long n,
                      const SamplingFunction& f, int grid_per_dim, bool compare_rho);

}  // namespace skewspec
