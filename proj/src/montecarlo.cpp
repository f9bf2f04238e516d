#include "skewspec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "skewspec/errors.hpp"
#include "skewspec/parallel.hpp"
#include "skewspec/report.hpp"

namespace skewspec {

namespace {

constexpr int kSubwindows = 16;
constexpr long kMinSubwindowSpan = 8;  // smallest |k - l| a subwindow may have

void check_config(const ExperimentConfig& c) {
  require(c.samples >= 1, "experiment: samples must be >= 1");
  require(!c.scales.empty(), "experiment: scales must be nonempty");
  for (size_t i = 0; i < c.scales.size(); ++i) {
    require(c.scales[i] >= 1, "experiment: scales must be >= 1");
    if (i > 0) {
      require(c.scales[i] > c.scales[i - 1], "experiment: scales must be strictly ascending");
    }
  }
  double al = std::fabs(c.lambda);
  require(al > 0.0 && al < 1.0, "experiment: lambda must satisfy 0 < |lambda| < 1");
  require(c.r >= 2, "experiment: r must be >= 2");
  require(std::isfinite(c.omega), "experiment: omega must be finite");
  require(std::fabs(std::abs(c.z) - 1.0) <= 1e-12, "experiment: z must lie on the unit circle");
  require(std::fabs(std::abs(c.beta) - 1.0) <= 1e-12 &&
              std::fabs(std::abs(c.beta_tilde) - 1.0) <= 1e-12,
          "experiment: boundary phases must be unimodular");
  require(c.gamma >= 0.0 && std::isfinite(c.gamma),
          "experiment: gamma must be >= 0 (0 selects the per-scale default)");
  require(c.tau > 0.0 && std::isfinite(c.tau), "experiment: tau must be > 0");
  require(c.p >= 0, "experiment: p must be >= 0");
}

SuitabilityParams scale_params(const ExperimentConfig& c, long n) {
  SuitabilityParams prm;
  prm.gamma = c.gamma > 0.0 ? c.gamma : 1.0 / std::sqrt(static_cast<double>(n));
  prm.Gamma = std::pow(static_cast<double>(n), c.tau);
  prm.p = c.p;
  return prm;
}

TridiagonalSystem to_system(const TridiagonalMatrix& m) {
  TridiagonalSystem sys;
  sys.diag = m.diag;
  sys.lower = m.off;
  sys.upper = m.off;
  return sys;
}

bool reduced_route_enabled(const ExperimentConfig& c) {
  return c.z == cplx(-1.0, 0.0);
}

struct SampleVerdict {
  bool unsuitable = false;
  bool unsuitable_reduced = false;
  double margin = 0.0;
  double margin_reduced = 0.0;
};

// Classifies one sampled window on both routes. A numeric_error from the
// classifier means the certificate failed outright (z on the spectrum to
// machine precision), which no finite budget survives.
SampleVerdict classify_sample(const ExperimentConfig& c, const SamplingFunction& f,
                              const SkewShiftMap& map, long n, const SuitabilityParams& prm,
                              int sample) {
  Rng rng(c.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(sample)});
  TorusPoint x = TorusPoint::random(c.r, rng);
  VerblunskyPath path = verblunsky_path(f, map, x, -n, n);
  FiniteCmv op = assemble_finite_cmv(path, c.beta, c.beta_tilde, /*with_dense=*/false);

  SampleVerdict out;
  try {
    SuitabilityVerdict v = suitability_classify(op, c.z, prm, 1);
    out.unsuitable = !v.suitable();
    out.margin = v.margin;
  } catch (const numeric_error&) {
    out.unsuitable = true;
    out.margin = -std::numeric_limits<double>::infinity();
  }

  if (reduced_route_enabled(c)) {
    SchrodingerReduction red = schrodinger_reduction(op);
    // The reduced diagonal must reproduce the direct potential window on the
    // interior (edge rows carry the boundary phases instead of orbit values).
    SchrodingerFiniteOp direct =
        restrict_schrodinger(PotentialSpec(red.g, map, map.inverse_step(x)), -n, n);
    double defect = 0.0;
    for (size_t i = 1; i + 1 < red.diagonal.size(); ++i) {
      defect = std::max(defect, std::fabs(red.diagonal[i] - direct.v[i]));
    }
    if (!(defect <= 1e-10)) {
      throw numeric_error("census: reduced window disagrees with the direct potential", defect);
    }
    SchrodingerFiniteOp h{red.a, red.b, red.diagonal};
    try {
      SuitabilityVerdict v = suitability_classify(h, cplx(0.0, 0.0), prm, 1);
      out.unsuitable_reduced = !v.suitable();
      out.margin_reduced = v.margin;
    } catch (const numeric_error&) {
      out.unsuitable_reduced = true;
      out.margin_reduced = -std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

double tail_slope(const std::vector<double>& thresholds, const std::vector<double>& prob,
                  double p_min) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < thresholds.size(); ++i) {
    if (prob[i] >= p_min && prob[i] <= 0.5) {
      lx.push_back(std::log(thresholds[i]));
      ly.push_back(std::log(prob[i]));
    }
  }
  if (lx.size() < 3) {
    throw numeric_error("wegner tail: fewer than 3 resolvable grid points in the fit window");
  }
  double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw numeric_error("wegner tail: degenerate threshold grid in the fit window");
  }
  return sxy / sxx;
}

}  // namespace

WilsonInterval wilson_interval(long hits, long trials) {
  require(trials >= 1 && hits >= 0 && hits <= trials, "wilson_interval: bad counts");
  const double zs = 1.959963984540054;  // 97.5% normal quantile
  double n = static_cast<double>(trials);
  double ph = static_cast<double>(hits) / n;
  double z2 = zs * zs;
  double denom = 1.0 + z2 / n;
  double center = (ph + z2 / (2.0 * n)) / denom;
  double half = zs * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w;
  w.lo = std::max(0.0, center - half);
  w.hi = std::min(1.0, center + half);
  // the score interval pins these endpoints exactly; drop the float residue
  if (hits == 0) w.lo = 0.0;
  if (hits == trials) w.hi = 1.0;
  return w;
}

UnsuitableMeasureReport measure_unsuitable(const ExperimentConfig& config, std::ostream* audit) {
  check_config(config);
  SamplingFunction f = SamplingFunction::canonical(config.r, cplx(config.lambda, 0.0));
  SkewShiftMap map(config.r, config.omega);
  bool dual = reduced_route_enabled(config);

  UnsuitableMeasureReport report;
  report.has_reduced_route = dual;
  std::vector<std::vector<std::string>> audit_rows;

  for (long n : config.scales) {
    SuitabilityParams prm = scale_params(config, n);
    long m = config.samples;
    std::vector<SampleVerdict> verdicts(static_cast<size_t>(m));
    parallel_for(m, config.threads, [&](long j) {
      verdicts[static_cast<size_t>(j)] =
          classify_sample(config, f, map, n, prm, static_cast<int>(j));
    });

    ScaleCensus census;
    census.scale = n;
    census.gamma = prm.gamma;
    census.Gamma = prm.Gamma;
    census.p = prm.p;
    census.samples = config.samples;
    for (long j = 0; j < m; ++j) {
      const SampleVerdict& v = verdicts[static_cast<size_t>(j)];
      census.unsuitable += v.unsuitable ? 1 : 0;
      if (dual) {
        census.unsuitable_reduced += v.unsuitable_reduced ? 1 : 0;
        census.verdict_mismatch += (v.unsuitable != v.unsuitable_reduced) ? 1 : 0;
      }
      if (audit != nullptr) {
        audit_rows.push_back({std::to_string(n), std::to_string(j),
                              v.unsuitable ? "0" : "1", fmt_g17(v.margin),
                              dual ? (v.unsuitable_reduced ? "0" : "1") : "",
                              dual ? fmt_g17(v.margin_reduced) : ""});
      }
    }
    census.p_hat = static_cast<double>(census.unsuitable) / static_cast<double>(m);
    census.ci = wilson_interval(census.unsuitable, m);
    if (dual) {
      census.p_hat_reduced = static_cast<double>(census.unsuitable_reduced) / static_cast<double>(m);
      census.ci_reduced = wilson_interval(census.unsuitable_reduced, m);
    }
    report.scales.push_back(census);
  }

  report.nonincreasing = true;
  report.nonincreasing_reduced = dual;
  for (size_t i = 1; i < report.scales.size(); ++i) {
    if (report.scales[i].p_hat > report.scales[i - 1].p_hat) report.nonincreasing = false;
    if (dual && report.scales[i].p_hat_reduced > report.scales[i - 1].p_hat_reduced) {
      report.nonincreasing_reduced = false;
    }
  }

  if (audit != nullptr) {
    write_csv(*audit,
              {"scale", "sample", "suitable", "margin", "suitable_reduced", "margin_reduced"},
              audit_rows);
  }
  return report;
}

std::string census_to_json(const UnsuitableMeasureReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = "unsuitable_census";
  j["has_reduced_route"] = report.has_reduced_route;
  j["nonincreasing"] = report.nonincreasing;
  j["nonincreasing_reduced"] = report.nonincreasing_reduced;
  j["scales"] = nlohmann::ordered_json::array();
  for (const ScaleCensus& c : report.scales) {
    nlohmann::ordered_json s;
    s["N"] = c.scale;
    s["gamma"] = c.gamma;
    s["Gamma"] = c.Gamma;
    s["p"] = c.p;
    s["samples"] = c.samples;
    s["unsuitable"] = c.unsuitable;
    s["p_hat"] = c.p_hat;
    s["ci_lo"] = c.ci.lo;
    s["ci_hi"] = c.ci.hi;
    s["unsuitable_reduced"] = c.unsuitable_reduced;
    s["p_hat_reduced"] = c.p_hat_reduced;
    s["ci_lo_reduced"] = c.ci_reduced.lo;
    s["ci_hi_reduced"] = c.ci_reduced.hi;
    s["verdict_mismatch"] = c.verdict_mismatch;
    j["scales"].push_back(s);
  }
  return j.dump(2);
}

WegnerTailReport wegner_tail_estimate(const ExperimentConfig& config,
                                      const std::vector<double>& thresholds) {
  check_config(config);
  require(!thresholds.empty(), "wegner: threshold grid must be nonempty");
  for (size_t i = 0; i < thresholds.size(); ++i) {
    require(thresholds[i] > 0.0 && std::isfinite(thresholds[i]),
            "wegner: thresholds must be positive");
    if (i > 0) {
      require(thresholds[i] > thresholds[i - 1], "wegner: thresholds must be strictly increasing");
    }
  }
  long n = config.scales.back();  // the tail experiment runs at the largest scale
  require(2 * n >= kMinSubwindowSpan, "wegner: largest scale too small for subwindows");

  WegnerTailReport report;
  report.scale = n;
  report.samples = config.samples;
  report.thresholds = thresholds;

  // Subwindow geometry is shared across samples; its substream key sits just
  // past the sample indices so it never collides with a sample draw.
  Rng wrng(config.seed,
           {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(config.samples)});
  for (int w = 0; w < kSubwindows; ++w) {
    long k = -n + static_cast<long>(
                      wrng.uniform_index(static_cast<std::uint64_t>(2 * n - kMinSubwindowSpan + 1)));
    long l = k + kMinSubwindowSpan +
             static_cast<long>(wrng.uniform_index(
                 static_cast<std::uint64_t>(n - (k + kMinSubwindowSpan) + 1)));
    report.windows.emplace_back(k, l);
  }

  SamplingFunction f = SamplingFunction::canonical(config.r, cplx(config.lambda, 0.0));
  SkewShiftMap map(config.r, config.omega);
  long m = config.samples;
  const double inf = std::numeric_limits<double>::infinity();

  auto window_norm = [&](const VerblunskyPath& path) {
    FiniteCmv op = assemble_finite_cmv(path, config.beta, config.beta_tilde, /*with_dense=*/false);
    try {
      return inverse_operator_norm(to_system(tridiagonal_a(op, config.z))).norm;
    } catch (const numeric_error&) {
      return inf;  // certificate failure: the norm exceeds every threshold
    }
  };

  std::vector<double> norm_full(static_cast<size_t>(m));
  std::vector<double> norm_sub(static_cast<size_t>(m) * kSubwindows);
  parallel_for(m, config.threads, [&](long j) {
    Rng rng(config.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(j)});
    TorusPoint x = TorusPoint::random(config.r, rng);
    VerblunskyPath path = verblunsky_path(f, map, x, -n, n);
    norm_full[static_cast<size_t>(j)] = window_norm(path);
    for (int w = 0; w < kSubwindows; ++w) {
      const auto& kl = report.windows[static_cast<size_t>(w)];
      norm_sub[static_cast<size_t>(j) * kSubwindows + static_cast<size_t>(w)] =
          window_norm(path.window(kl.first, kl.second));
    }
  });

  for (double b : thresholds) {
    long hits_full = 0;
    long hits_sub = 0;
    for (long j = 0; j < m; ++j) {
      if (norm_full[static_cast<size_t>(j)] > b) ++hits_full;
      for (int w = 0; w < kSubwindows; ++w) {
        if (norm_sub[static_cast<size_t>(j) * kSubwindows + static_cast<size_t>(w)] > b) ++hits_sub;
      }
    }
    report.prob_full.push_back(static_cast<double>(hits_full) / static_cast<double>(m));
    report.prob_sub.push_back(static_cast<double>(hits_sub) /
                              static_cast<double>(m * kSubwindows));
  }

  report.slope_full = tail_slope(thresholds, report.prob_full, 2.0 / static_cast<double>(m));
  report.slope_sub =
      tail_slope(thresholds, report.prob_sub, 2.0 / static_cast<double>(m * kSubwindows));
  return report;
}

std::string wegner_to_json(const WegnerTailReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = "wegner_tail";
  j["N"] = report.scale;
  j["samples"] = report.samples;
  j["subwindows"] = nlohmann::ordered_json::array();
  for (const auto& w : report.windows) {
    j["subwindows"].push_back({w.first, w.second});
  }
  j["thresholds"] = report.thresholds;
  j["prob_full"] = report.prob_full;
  j["prob_sub"] = report.prob_sub;
  j["slope_full"] = report.slope_full;
  j["slope_sub"] = report.slope_sub;
  return j.dump(2);
}

}  // namespace skewspec
