#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "skewspec/green.hpp"

namespace skewspec {

// One family of experiments over random base points x in T^r. The operator at
// each sample is the CMV window [-N, N] with alpha_n = lambda e((T^n x)_r) and
// fixed boundary phases; suitability is judged against the decay rate gamma,
// the norm budget Gamma = N^tau and the dyadic level p.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int samples = 400;                      // M, drawn independently per scale
  std::vector<long> scales{32, 64, 128};  // window half-widths N, ascending
  double lambda = 0.5;                    // 0 < |lambda| < 1
  int r = 2;
  double omega = kGoldenOmega;
  cplx z{-1.0, 0.0};  // |z| = 1; z = -1 enables the Schrodinger route
  cplx beta{1.0, 0.0};
  cplx beta_tilde{1.0, 0.0};
  double gamma = 0.0;  // decay rate; 0 resolves to 1/sqrt(N) at each scale
  double tau = 0.5;    // norm budget exponent
  int p = 3;
  int threads = 1;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// 95% Wilson score interval for hits out of trials.
WilsonInterval wilson_interval(long hits, long trials);

struct ScaleCensus {
  long scale = 0;  // window [-scale, scale]
  double gamma = 0.0;
  double Gamma = 0.0;
  int p = 0;
  int samples = 0;
  long unsuitable = 0;          // A(z) window fails the suitability test
  long unsuitable_reduced = 0;  // reduced H - 0 window fails it (z = -1 only)
  long verdict_mismatch = 0;    // samples where the two routes disagree
  double p_hat = 0.0;
  WilsonInterval ci;
  double p_hat_reduced = 0.0;
  WilsonInterval ci_reduced;
};

struct UnsuitableMeasureReport {
  std::vector<ScaleCensus> scales;
  bool nonincreasing = false;          // p_hat over ascending scales
  bool nonincreasing_reduced = false;  // same flag for the reduced route
  bool has_reduced_route = false;
};

// Draws M base points per scale (substream seed / {N, sample}), classifies the
// window as A(z) and, when z = -1, also classifies the reduced Schrodinger
// operator at E = 0 built from the same window. The two constructions are
// checked to agree on the interior potential; the verdicts are counted
// separately because the reduction takes a real part, so agreement is an
// empirical outcome, not an identity. Samples whose window is numerically
// singular at z count as unsuitable (no finite budget holds). audit, when
// set, receives one CSV row per sample.
UnsuitableMeasureReport measure_unsuitable(const ExperimentConfig& config,
                                           std::ostream* audit = nullptr);

std::string census_to_json(const UnsuitableMeasureReport& report);

struct WegnerTailReport {
  long scale = 0;
  int samples = 0;
  std::vector<double> thresholds;  // B grid
  std::vector<double> prob_full;   // fraction of samples with ||A(z)^{-1}|| > B
  std::vector<double> prob_sub;    // pooled over the random subwindows
  std::vector<std::pair<long, long>> windows;  // the subwindows [k, l]
  double slope_full = 0.0;  // least-squares slope of log P against log B
  double slope_sub = 0.0;
};

// Exceedance curve of the resolvent norm over the threshold grid at the
// largest configured scale: the full window plus 16 random subwindows shared
// across samples. Norms whose certificate fails count as +infinity. The tail
// fit uses grid points with 2/trials <= P <= 1/2 and needs at least three.
WegnerTailReport wegner_tail_estimate(const ExperimentConfig& config,
                                      const std::vector<double>& thresholds);

std::string wegner_to_json(const WegnerTailReport& report);

}  // namespace skewspec
