#include "skewspec/cocycle.hpp"

#include <cmath>
#include <vector>

#include "skewspec/errors.hpp"
#include "skewspec/parallel.hpp"
#include "skewspec/schrodinger.hpp"

namespace skewspec {

namespace {

constexpr long kRenormEvery = 32;

struct SampleOut {
  double value = 0.0;
  double drift = 0.0;
  long renorms = 0;
};

// Runs one length-N product from base point y, folding the norm into an
// accumulator every kRenormEvery steps so the entries never overflow.
template <typename StepAt>
SampleOut run_product(const SkewShiftMap& map, TorusPoint y, long steps,
                      double logdet_step, StepAt&& step_at) {
  Eigen::Matrix2cd prod = Eigen::Matrix2cd::Identity();
  SampleOut out;
  double acc = 0.0;
  double block_det = 0.0;
  long block_len = 0;
  for (long k = 0; k < steps; ++k) {
    Eigen::Matrix2cd s = step_at(y);
    y = map.step(y);
    prod = (s * prod).eval();
    block_det += std::log(std::abs(s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0)));
    ++block_len;
    if (block_len == kRenormEvery || k + 1 == steps) {
      double nm = frobenius(prod);
      if (!(nm > 0.0) || !std::isfinite(nm))
        throw numeric_error("lyapunov_estimate: transfer product norm collapsed");
      acc += std::log(nm);
      prod /= nm;
      ++out.renorms;
      out.drift = std::max(out.drift,
                           std::abs(block_det - logdet_step * static_cast<double>(block_len)));
      block_det = 0.0;
      block_len = 0;
    }
  }
  out.value = acc / static_cast<double>(steps);
  return out;
}

std::vector<TorusPoint> base_points(const SkewShiftMap& map, long steps, int samples,
                                    std::uint64_t seed, OrbitAverage mode,
                                    const TorusPoint* start) {
  std::vector<TorusPoint> pts(static_cast<size_t>(samples));
  if (mode == OrbitAverage::sampled) {
    for (int j = 0; j < samples; ++j) {
      Rng rng(seed, {static_cast<std::uint64_t>(j)});
      pts[static_cast<size_t>(j)] = TorusPoint::random(map.r, rng);
    }
    return pts;
  }
  TorusPoint y;
  if (start != nullptr) {
    require(start->dim() == map.r, "lyapunov_estimate: base point dimension mismatch");
    y = *start;
  } else {
    Rng rng(seed, {0});
    y = TorusPoint::random(map.r, rng);
  }
  for (int j = 0; j < samples; ++j) {
    pts[static_cast<size_t>(j)] = y;
    if (j + 1 < samples)
      for (long k = 0; k < steps; ++k) y = map.step(y);
  }
  return pts;
}

template <typename StepAt>
LyapunovEstimate lyapunov_generic(const SkewShiftMap& map, long steps, int samples,
                                  std::uint64_t seed, OrbitAverage mode,
                                  const TorusPoint* start, int threads, double logdet_step,
                                  StepAt&& step_at) {
  require(steps >= 1000, "lyapunov_estimate: fewer than 1000 steps");
  require(samples >= 1, "lyapunov_estimate: need at least one sample");

  std::vector<TorusPoint> pts = base_points(map, steps, samples, seed, mode, start);
  std::vector<SampleOut> outs(static_cast<size_t>(samples));
  parallel_for(samples, threads, [&](long j) {
    outs[static_cast<size_t>(j)] =
        run_product(map, pts[static_cast<size_t>(j)], steps, logdet_step, step_at);
  });

  LyapunovEstimate est;
  est.steps = steps;
  est.samples = samples;
  for (const SampleOut& o : outs) {
    est.value += o.value;
    est.renorms += o.renorms;
    est.det_drift = std::max(est.det_drift, o.drift);
  }
  est.value /= static_cast<double>(samples);
  if (samples > 1) {
    double var = 0.0;
    for (const SampleOut& o : outs) var += (o.value - est.value) * (o.value - est.value);
    var /= static_cast<double>(samples - 1);
    est.std_error = std::sqrt(var / static_cast<double>(samples));
  }
  return est;
}

}  // namespace

Eigen::Matrix2cd szego_step(cplx z, cplx alpha) {
  double a2 = std::norm(alpha);
  require(a2 < 1.0, "szego_step: |alpha| must be below 1");
  double rho = std::sqrt(1.0 - a2);
  Eigen::Matrix2cd s;
  s << z / rho, -std::conj(alpha) / rho, -z * alpha / rho, cplx(1.0 / rho, 0.0);
  return s;
}

Eigen::Matrix2cd schrodinger_step(double energy, double v) {
  Eigen::Matrix2cd s;
  s << cplx(energy - v, 0.0), cplx(-1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0);
  return s;
}

LyapunovEstimate lyapunov_szego(const SamplingFunction& f, const SkewShiftMap& map,
                                cplx z, long steps, int samples, std::uint64_t seed,
                                OrbitAverage mode, const TorusPoint* start, int threads) {
  require(std::abs(z) > 0.0, "lyapunov_szego: z must be nonzero");
  require(f.r() == map.r, "lyapunov_szego: generator dimension mismatch");
  double logdet = std::log(std::abs(z));
  return lyapunov_generic(map, steps, samples, seed, mode, start, threads, logdet,
                          [&](const TorusPoint& y) { return szego_step(z, f.eval(y)); });
}

LyapunovEstimate lyapunov_schrodinger(double g, const SkewShiftMap& map, double energy,
                                      long steps, int samples, std::uint64_t seed,
                                      OrbitAverage mode, const TorusPoint* start,
                                      int threads) {
  return lyapunov_generic(map, steps, samples, seed, mode, start, threads, 0.0,
                          [&](const TorusPoint& y) {
                            return schrodinger_step(energy, g * skew_sampling_f(y));
                          });
}

double thouless_L(const IDSTable& ids, double energy) {
  require(ids.energies.size() >= 2 && ids.energies.size() == ids.k.size(),
          "thouless_L: malformed ids table");
  require(energy >= ids.energies.front() && energy <= ids.energies.back(),
          "thouless_L: energy outside the tabulated grid (no extrapolation)");
  auto antideriv = [energy](double t) {
    double u = t - energy;
    return (u == 0.0 ? 0.0 : u * std::log(std::abs(u))) - t;
  };
  double acc = 0.0;
  for (size_t i = 0; i + 1 < ids.energies.size(); ++i) {
    double mass = ids.k[i + 1] - ids.k[i];
    if (mass == 0.0) continue;
    double w = ids.energies[i + 1] - ids.energies[i];
    if (w <= 0.0) {
      acc += mass * std::log(std::abs(ids.energies[i] - energy));
      continue;
    }
    acc += mass / w * (antideriv(ids.energies[i + 1]) - antideriv(ids.energies[i]));
  }
  return acc;
}

}  // namespace skewspec
