#pragma once

#include <string>

#include "skewspec/cmv.hpp"
#include "skewspec/schrodinger.hpp"

namespace skewspec {

struct SuitabilityParams {
  double gamma = 0.0;  // off-diagonal decay rate, > 0
  double Gamma = 0.0;  // inverse-norm budget exponent, > 0
  int p = 0;           // dyadic safety level, >= 0
};

struct SuitabilityVerdict {
  bool norm_ok = false;
  bool decay_ok = false;
  long worst_k = 0;  // binding pair of the decay condition (violating pair if any)
  long worst_l = 0;
  double margin = 0.0;  // minimal log-slack over both conditions; < 0 means violated
  double inverse_norm = 0.0;

  bool suitable() const { return norm_ok && decay_ok; }
};

// <delta_k, A(z)^{-1} delta_l> through the window's tridiagonal form, residual
// certified; throws numeric_error when z is effectively on the spectrum.
GreenEntry green_entry_cmv(const FiniteCmv& op, cplx z, long k, long l);

// Suitability of a symmetric window [-N, N]:
//   (1) ||A(z)^{-1}|| <= 2^{-p} e^Gamma,
//   (2) |G(z; k, l)| <= 2^{-(p+1)} e^{-gamma |k-l|} whenever 2|k-l| >= N.
// margin is the smallest log-slack across both; worst_k/worst_l the binding pair.
SuitabilityVerdict suitability_classify(const FiniteCmv& op, cplx z,
                                        const SuitabilityParams& params, int threads = 1);
// Same conditions for H - z (z = E on the real axis for the usual census).
SuitabilityVerdict suitability_classify(const SchrodingerFiniteOp& op, cplx z,
                                        const SuitabilityParams& params, int threads = 1);

std::string verdict_to_json(const SuitabilityVerdict& v, long half_width, cplx z,
                            const SuitabilityParams& params);

// Perturbation radius for the alpha-data and z under which a (gamma, Gamma, p)
// verdict survives at level p-1: exp(-(2 Gamma + gamma * interval_len)).
// A radius >= 1 means the budget is degenerate and controls nothing.
double perturb_suitability_margin(const SuitabilityParams& params, long interval_len);

struct RestrictionCheck {
  double identity_residual = 0.0;   // relative max-entry defect of the resolvent identity
  double cross_block_max = 0.0;     // max |(A1 (+) B)^{-1}| across the partition; exactly 0
  double geometric_constant = 0.0;  // observed constant of the two-scale Green bound
};

// Splits the window of op into [c, d] and its complement: A1 is the literal
// restriction of A = A(z) to the complement, B the [c, d] window re-assembled
// with its own boundary phases. Checks
//   A^{-1} - (A1 (+) B)^{-1} = A^{-1} Gamma (A1 (+) B)^{-1},  Gamma = (A1 (+) B) - A,
// entrywise, with the block inverse computed block by block so entries across
// the partition stay exactly zero.
RestrictionCheck restriction_identity_check(const FiniteCmv& op, long c, long d, cplx z,
                                            cplx beta_inner = cplx(1.0, 0.0),
                                            cplx beta_tilde_inner = cplx(1.0, 0.0));

struct SolutionBoundReport {
  double max_ratio = 0.0;      // max over interior sites of |psi(n)| / rhs(n)
  long worst_site = 0;
  double pair_residual = 0.0;  // ||E psi - z psi||_inf / ||psi||_inf of the input pair
};

// For an eigenpair (z, psi) of the surrounding operator and an inner window
// [a, b], checks
//   |psi(n)| <= 2 |G(z; n, a)| sup_{m in {a-1, a}} |psi(m)|
//             + 2 |G(z; n, b)| sup_{m in {b, b+1}} |psi(m)|,  a < n < b,
// where G belongs to the inner window with boundary phases aligned to the orbit
// (the alignment is what keeps the edge defect within twice the neighboring
// amplitudes). Throws contract_error when (z, psi) is not an eigenpair.
SolutionBoundReport solution_bound_check(const FiniteCmv& big, cplx z,
                                         const Eigen::VectorXcd& psi, long a, long b);

struct PhaseSweepResult {
  cplx beta{1.0, 0.0};
  cplx beta_tilde{1.0, 0.0};
  double inverse_norm = 0.0;
  double edge_green_max = 0.0;  // sup over 2|l| <= N of |G(l, -N)|, |G(l, N)|
  bool heuristic = true;        // grid search only, no optimality claim
};

// Sweeps (beta, beta_tilde) over a grid x grid lattice of roots of unity on a
// symmetric window and keeps the pair minimizing inverse_norm * edge_green_max.
// Pairs that land on the spectrum are skipped.
PhaseSweepResult best_boundary_phases(const VerblunskyPath& path, cplx z, int grid = 8);

}  // namespace skewspec
