#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "skewspec/sampling.hpp"
#include "skewspec/spectral.hpp"

namespace skewspec {

// One-step transfer matrices. The szego step has |det| = |z|; the schrodinger
// step has det exactly 1.
Eigen::Matrix2cd szego_step(cplx z, cplx alpha);
Eigen::Matrix2cd schrodinger_step(double energy, double v);

enum class OrbitAverage {
  sampled,  // independent seeded base points (default)
  orbit,    // consecutive length-N segments of a single orbit
};

struct LyapunovEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample std dev of the per-sample means / sqrt(M)
  long steps = 0;
  int samples = 0;
  long renorms = 0;
  // Worst per-renorm-block gap between the accumulated step log-dets and the
  // expected value. The determinant of the full renormalized product is
  // rounding noise once the singular values split past 1/eps, so the
  // bookkeeping is certified block by block.
  double det_drift = 0.0;
};

// Mean growth rate (1/N) E log ||S_N|| of the transfer product, renormalized
// every 32 steps (Frobenius). Per-sample substream (seed, sample); the result
// is independent of the worker count. In orbit mode the base point (start, or
// one drawn from the seed when null) anchors all samples along one orbit.
LyapunovEstimate lyapunov_szego(const SamplingFunction& f, const SkewShiftMap& map,
                                cplx z, long steps, int samples, std::uint64_t seed,
                                OrbitAverage mode = OrbitAverage::sampled,
                                const TorusPoint* start = nullptr, int threads = 1);

LyapunovEstimate lyapunov_schrodinger(double g, const SkewShiftMap& map, double energy,
                                      long steps, int samples, std::uint64_t seed,
                                      OrbitAverage mode = OrbitAverage::sampled,
                                      const TorusPoint* start = nullptr, int threads = 1);

// Thouless integral  L(E) = int log|E - t| dk(t)  against a tabulated counting
// function, bin-uniform measure. The antiderivative (t-E) log|t-E| - t handles
// the bin containing E exactly, so no points are excluded. E must lie inside
// the tabulated range (no extrapolation).
double thouless_L(const IDSTable& ids, double energy);

}  // namespace skewspec
