#pragma once

#include <cstdint>
#include <vector>

#include "skewspec/cmv.hpp"
#include "skewspec/schrodinger.hpp"

namespace skewspec {

// Real symmetric tridiagonal matrix; off[j] couples sites j and j+1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  long size() const { return static_cast<long>(diag.size()); }
};

SymTridiag sym_tridiag(const SchrodingerFiniteOp& op);

// Number of eigenvalues <= x, from the signs of the LDL^T pivots of A - x.
// Exact zero pivots are nudged negative so exact eigenvalues are counted.
long sturm_count(const SymTridiag& m, double x);

// All eigenvalues, ascending, by index-wise Sturm bisection with an
// inverse-iteration Rayleigh polish. Each lands within 1e-10 * ||A|| of a true
// eigenvalue and the count at every threshold is exact.
std::vector<double> eigs_symmetric_tridiag(const SymTridiag& m);
std::vector<double> eigs_symmetric_tridiag(const SchrodingerFiniteOp& op);

// Eigenvalues with (0-based) indices in [k_lo, k_hi], same accuracy contract.
std::vector<double> eigs_index_range(const SymTridiag& m, long k_lo, long k_hi);

// Eigenvalues of the unitary window, sorted by argument; dense path, N <= 512.
std::vector<cplx> cmv_eigenvalues(const FiniteCmv& op);

struct IDSTable {
  std::vector<double> energies;  // sorted ascending
  std::vector<double> k;         // nondecreasing, in [0, 1]
  long n_used = 0;
  int samples = 0;
};

// Averaged normalized eigenvalue counting function of H^{[1,N]} over M seeded
// base points. The uniform builder spans the Gershgorin range so k starts at 0
// and ends at 1; the explicit-grid builder evaluates exactly the given energies.
IDSTable ids_estimate(double g, const SkewShiftMap& map, long n, int samples,
                      int grid_points, std::uint64_t seed, int threads = 1);
IDSTable ids_estimate_grid(double g, const SkewShiftMap& map, long n, int samples,
                           const std::vector<double>& energies, std::uint64_t seed,
                           int threads = 1);

// Linear interpolation in the table; energies outside the grid are a contract
// violation.
double ids_value(const IDSTable& table, double energy);

struct ZeroSpectrumReport {
  std::vector<long> sizes;
  std::vector<double> min_abs_eig;
  bool nonincreasing = false;
};

// min |eig(H^{[1,N]})| for each N in sizes (two Sturm bisections per scale).
ZeroSpectrumReport zero_in_spectrum_check(const PotentialSpec& spec,
                                          const std::vector<long>& sizes);

struct SpacingStats {
  std::vector<double> gaps;       // normalized consecutive differences
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> cdf_grid;   // fixed grid, offset from s = 1 so a rigid
                                  // spectrum compares exactly against the clock
  std::vector<double> cdf;        // empirical CDF of the normalized gaps
  double ks_poisson = 0.0;        // sup distance to 1 - exp(-s)
  double ks_clock = 0.0;          // sup distance to the unit step at s = 1
};

// Gap statistics in [center - halfwidth, center + halfwidth], normalized by
// N times the local density of states (Gaussian kernel, bandwidth 4/N).
// Throws contract_error when the window holds fewer than 50 eigenvalues.
SpacingStats spacing_stats(const PotentialSpec& spec, long n, double center,
                           double halfwidth);
// Same statistics for an explicit (sorted) eigenvalue set; n sets the kernel
// bandwidth and the density scale.
SpacingStats spacing_from_eigenvalues(const std::vector<double>& eigs, long n,
                                      double center, double halfwidth);

}  // namespace skewspec
