#include "skewspec/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "skewspec/cocycle.hpp"
#include "skewspec/errors.hpp"
#include "skewspec/green.hpp"
#include "skewspec/montecarlo.hpp"
#include "skewspec/report.hpp"

namespace skewspec {

namespace {

namespace fs = std::filesystem;

struct Harness {
  std::vector<CheckResult> results;

  template <typename F>
  void run(const std::string& name, F&& body) {
    CheckResult r;
    r.name = name;
    try {
      body(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("unexpected exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num_ = 0.0, den = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    num_ += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num_ / den;
}

VerblunskyPath canonical_window(double lambda, long a, long b, double x1, double x2) {
  SamplingFunction f = SamplingFunction::canonical(2, cplx(lambda, 0.0));
  SkewShiftMap map(2, kGoldenOmega);
  return verblunsky_path(f, map, TorusPoint({x1, x2}), a, b);
}

TridiagonalSystem cmv_system(const FiniteCmv& op, cplx z) {
  TridiagonalMatrix m = tridiagonal_a(op, z);
  return TridiagonalSystem{m.off, m.diag, m.off};
}

// boundary phase carrying the orbit's real part, so the reduced edge rows
// match the direct potential window
cplx orbit_phase(double lambda, const SkewShiftMap& map, const TorusPoint& x, long m) {
  double c = lambda * std::cos(2.0 * M_PI * map.iterate(x, m).coords[1]);
  return cplx(c, std::sqrt(1.0 - c * c));
}

// fhat(k) = c0 2^{-|k|_inf} on |k|_inf <= deg, r = 2; positive coefficients,
// so the sup of any sub-table is attained at x = 0 and is the coefficient sum
TrigPolynomial geometric_table(double c0, int deg) {
  TrigPolynomial tp(2);
  for (int k1 = -deg; k1 <= deg; ++k1)
    for (int k2 = -deg; k2 <= deg; ++k2) {
      int m = std::max(std::abs(k1), std::abs(k2));
      tp.add({k1, k2}, cplx(c0 * std::pow(2.0, -m), 0.0));
    }
  return tp;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<CheckResult> fast_checks(int threads) {
  Harness h;
  SkewShiftMap map(2, kGoldenOmega);

  h.run("tridiagonal closed form matches the factored product", [&](CheckResult& r) {
    VerblunskyPath path = canonical_window(0.7, -12, 11, 0.37, 0.58);
    FiniteCmv op = assemble_finite_cmv(path, unit_phase(0.21), unit_phase(0.77));
    cplx z = unit_phase(0.13);
    double diff = (tridiagonal_a(op, z).dense() - a_matrix_from_factors(op, z))
                      .cwiseAbs()
                      .maxCoeff();
    r.pass = diff < 1e-13 && op.unitarity_defect < 1e-12;
    r.detail = "entry diff " + num(diff) + ", unitarity defect " + num(op.unitarity_defect);
  });

  h.run("reduction diagonal equals the direct potential window", [&](CheckResult& r) {
    double lambda = 0.5;
    TorusPoint x({0.31, 0.64});
    SamplingFunction f = SamplingFunction::canonical(2, cplx(lambda, 0.0));
    VerblunskyPath p = verblunsky_path(f, map, x, 1, 40);
    FiniteCmv op = assemble_finite_cmv(p, orbit_phase(lambda, map, x, 0),
                                       orbit_phase(lambda, map, x, 40), false);
    SchrodingerReduction red = schrodinger_reduction(op);
    PotentialSpec spec(red.g, map, map.inverse_step(x));
    SchrodingerFiniteOp direct = restrict_schrodinger(spec, 1, 40);
    double worst = 0.0;
    for (long n = 1; n <= 40; ++n)
      worst = std::max(worst,
                       std::fabs(red.diagonal[static_cast<size_t>(n - 1)] - direct.v_at(n)));
    double g_err = std::fabs(red.g - lambda / std::sqrt(1.0 - lambda * lambda));
    r.pass = worst < 1e-12 && g_err < 1e-14;
    r.detail = "entry diff " + num(worst) + ", coupling diff " + num(g_err);
  });

  h.run("restriction identity is exact on the identical partition", [&](CheckResult& r) {
    VerblunskyPath path = canonical_window(0.5, -10, 10, 0.6, 0.15);
    FiniteCmv op = assemble_finite_cmv(path, unit_phase(0.12), unit_phase(0.81), false);
    cplx z = unit_phase(0.44);
    RestrictionCheck same =
        restriction_identity_check(op, -10, 10, z, unit_phase(0.12), unit_phase(0.81));
    RestrictionCheck bent =
        restriction_identity_check(op, -10, 10, z, unit_phase(0.3), unit_phase(0.6));
    r.pass = same.identity_residual == 0.0 && same.cross_block_max == 0.0 &&
             bent.identity_residual < 1e-11;
    r.detail = "identical partition residual " + num(same.identity_residual) +
               ", rephased residual " + num(bent.identity_residual);
  });

  h.run("free chain eigenvalues match the cosine closed form", [&](CheckResult& r) {
    const long n = 32;
    SymTridiag m;
    m.diag.assign(static_cast<size_t>(n), 0.0);
    m.off.assign(static_cast<size_t>(n - 1), 1.0);
    std::vector<double> got = eigs_symmetric_tridiag(m);
    std::vector<double> want;
    for (long k = n; k >= 1; --k)
      want.push_back(2.0 * std::cos(M_PI * static_cast<double>(k) /
                                    static_cast<double>(n + 1)));
    double worst = 0.0;
    for (long i = 0; i < n; ++i)
      worst = std::max(worst, std::fabs(got[static_cast<size_t>(i)] -
                                        want[static_cast<size_t>(i)]));
    r.pass = worst < 1e-10;
    r.detail = "worst eigenvalue error " + num(worst);
  });

  h.run("rigid synthetic spectrum sits on the clock reference", [&](CheckResult& r) {
    const long n = 400;
    const double d = 4.0 / static_cast<double>(n);
    std::vector<double> eigs;
    for (long j = -n / 2; j <= n / 2; ++j) eigs.push_back(d * static_cast<double>(j));
    SpacingStats st = spacing_from_eigenvalues(eigs, n, 0.0, 0.35);
    r.pass = st.ks_clock == 0.0 && std::fabs(st.mean - 1.0) < 1e-6 && st.ks_poisson > 0.3;
    r.detail = "ks_clock " + num(st.ks_clock) + ", mean gap " + num(st.mean) +
               ", ks_poisson " + num(st.ks_poisson);
  });

  h.run("orbit visits a ball at its measure", [&](CheckResult& r) {
    BallRegion region(TorusPoint({0.31, 0.17}), 0.1);
    ReturnTimeStats st = return_time_count(map, TorusPoint({0.9, 0.41}), region, 100000);
    double err = std::fabs(st.frequency - region.measure());
    r.pass = std::fabs(region.measure() - 0.04) < 1e-15 && err < 0.01;
    r.detail = "measure " + num(region.measure()) + ", frequency error " + num(err);
  });

  h.run("golden mean diophantine constant", [&](CheckResult& r) {
    DiophantineReport rep = diophantine_quality(kGoldenOmega, 1000);
    r.pass = std::fabs(rep.kappa_lower - 0.38196601125010515) < 1e-10 && rep.worst_q == 1;
    r.detail = "kappa " + num(rep.kappa_lower) + " at q = " + std::to_string(rep.worst_q);
  });

  h.run("strong-coupling census has no unsuitable windows", [&](CheckResult& r) {
    ExperimentConfig cfg;
    cfg.seed = 515;
    cfg.samples = 30;
    cfg.scales = {12};
    cfg.lambda = 0.99;
    cfg.gamma = 1e-9;
    cfg.tau = 3.0;
    cfg.threads = threads;
    UnsuitableMeasureReport rep = measure_unsuitable(cfg);
    r.pass = rep.scales.size() == 1 && rep.scales[0].unsuitable == 0 &&
             rep.scales[0].p_hat == 0.0;
    r.detail = std::to_string(rep.scales.empty() ? -1 : rep.scales[0].unsuitable) +
               " unsuitable of 30 at N = 12";
  });

  h.run("taylor square root stays inside the closed-form tail", [&](CheckResult& r) {
    bool exact = std::fabs(sqrt_taylor(0.5, 2) - 0.71875) < 1e-15;
    Rng rng(7);
    long violations = 0;
    for (int t = 0; t < 300; ++t) {
      double x = rng.uniform(-0.9, 0.9);
      int n = 1 + static_cast<int>(rng.uniform_index(60));
      double err = std::fabs(sqrt_taylor(x, n) - std::sqrt(1.0 - x));
      if (err > std::pow(0.9, n) / 0.1) ++violations;
    }
    r.pass = exact && violations == 0;
    r.detail = "degree-2 value exact: " + std::string(exact ? "yes" : "no") + ", " +
               std::to_string(violations) + " tail violations of 300";
  });

  h.run("numeric formatting round trips", [&](CheckResult& r) {
    bool ok = fmt_g17(1.0 / 3.0) == "0.33333333333333331" && fmt_g17(0.5) == "0.5";
    for (double v : {M_PI, 1e-17, 6.02214076e23, -0.1, 1.0 / 7.0}) {
      std::string s = fmt_g17(v);
      double back = 0.0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), back);
      ok = ok && res.ec == std::errc() && back == v;
    }
    ok = ok && csv_field("two,three") == "\"two,three\"" && csv_field("plain") == "plain";
    r.pass = ok;
    r.detail = ok ? "17-digit round trip and csv quoting hold"
                  : "round trip or quoting broke";
  });

  return h.results;
}

std::vector<CheckResult> acceptance_checks(int threads, const std::string& scratch_dir) {
  Harness h;
  SkewShiftMap map(2, kGoldenOmega);

  h.run("lyapunov at coupling one half matches the closed form at three angles",
        [&](CheckResult& r) {
          SamplingFunction f = SamplingFunction::canonical(2, cplx(0.5, 0.0));
          const double target = -0.5 * std::log(0.75);
          auto t0 = std::chrono::steady_clock::now();
          std::vector<LyapunovEstimate> est;
          for (double t : {0.0, 0.3, 0.41})
            est.push_back(lyapunov_szego(f, map, unit_phase(t), 100000, 32, 7,
                                         OrbitAverage::sampled, nullptr, threads));
          double secs =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          bool ok = secs < 10.0;
          double worst_rel = 0.0;
          for (const LyapunovEstimate& e : est)
            worst_rel = std::max(worst_rel, std::fabs(e.value - target) / target);
          ok = ok && worst_rel <= 0.02;
          double worst_pair = 0.0;
          for (size_t i = 0; i < est.size(); ++i)
            for (size_t j = i + 1; j < est.size(); ++j) {
              double se = std::sqrt(est[i].std_error * est[i].std_error +
                                    est[j].std_error * est[j].std_error);
              worst_pair =
                  std::max(worst_pair, std::fabs(est[i].value - est[j].value) / se);
            }
          ok = ok && worst_pair <= 3.0;
          r.pass = ok;
          r.detail = "values " + num(est[0].value) + ", " + num(est[1].value) + ", " +
                     num(est[2].value) + " vs " + num(target) + "; worst rel " +
                     num(worst_rel) + "; worst pair z-score " + num(worst_pair) + "; " +
                     num(secs) + " s";
        });

  h.run("schrodinger growth pins at zero energy and the quadratic small-coupling law",
        [&](CheckResult& r) {
          const double t1 = 0.34657359027997264;
          const double t05 = 0.11157177565710488;
          LyapunovEstimate g1 = lyapunov_schrodinger(1.0, map, 0.0, 100000, 32, 21,
                                                     OrbitAverage::sampled, nullptr, threads);
          LyapunovEstimate g05 = lyapunov_schrodinger(0.5, map, 0.0, 100000, 32, 21,
                                                      OrbitAverage::sampled, nullptr, threads);
          bool pin1 = std::fabs(g1.value - t1) <= 0.02 * t1;
          bool pin2 = std::fabs(g05.value - t05) <= 0.03 * t05;
          std::vector<double> lx, ly;
          for (double g : {0.1, 0.2, 0.4}) {
            LyapunovEstimate e = lyapunov_schrodinger(g, map, 0.0, 100000, 32, 33,
                                                      OrbitAverage::sampled, nullptr, threads);
            lx.push_back(std::log(g));
            ly.push_back(std::log(e.value));
          }
          double slope = fit_slope(lx, ly);
          bool quad = slope >= 1.8 && slope <= 2.2;
          r.pass = pin1 && pin2 && quad;
          r.detail = "g=1: " + num(g1.value) + " vs " + num(t1) + " (2%), g=1/2: " +
                     num(g05.value) + " vs " + num(t05) + " (3%), small-g slope " +
                     num(slope) + " in [1.8, 2.2]";
        });

  h.run("window assembly identities across one hundred seeded draws", [&](CheckResult& r) {
    Rng rng(404);
    double worst_factor = 0.0, worst_unit = 0.0, worst_red = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      double lambda = rng.uniform(0.05, 0.9);
      TorusPoint x = TorusPoint::random(2, rng);
      SamplingFunction f = SamplingFunction::canonical(2, cplx(lambda, 0.0));
      VerblunskyPath path = verblunsky_path(f, map, x, 1, 64);
      FiniteCmv op = assemble_finite_cmv(path, orbit_phase(lambda, map, x, 0),
                                         orbit_phase(lambda, map, x, 64));
      cplx z = unit_phase(rng.uniform01());
      worst_factor = std::max(
          worst_factor, (tridiagonal_a(op, z).dense() - a_matrix_from_factors(op, z))
                            .cwiseAbs()
                            .maxCoeff());
      worst_unit = std::max(worst_unit, op.unitarity_defect);
      SchrodingerReduction red = schrodinger_reduction(op);
      PotentialSpec spec(red.g, map, map.inverse_step(x));
      SchrodingerFiniteOp direct = restrict_schrodinger(spec, 1, 64);
      for (long n = 1; n <= 64; ++n)
        worst_red = std::max(
            worst_red,
            std::fabs(red.diagonal[static_cast<size_t>(n - 1)] - direct.v_at(n)));
    }
    r.pass = worst_factor < 1e-13 && worst_unit < 1e-12 && worst_red < 1e-12;
    r.detail = "factored-product diff " + num(worst_factor) + ", unitarity defect " +
               num(worst_unit) + ", reduction diff " + num(worst_red);
  });

  h.run("restriction identity residuals across fifty seeded windows", [&](CheckResult& r) {
    Rng rng(909);
    int done = 0, attempts = 0;
    double worst_res = 0.0, worst_cross = 0.0, worst_geo = 0.0;
    while (done < 50 && attempts < 100) {
      ++attempts;
      VerblunskyPath path =
          canonical_window(0.5, -32, 32, rng.uniform01(), rng.uniform01());
      FiniteCmv op = assemble_finite_cmv(path, unit_phase(rng.uniform01()),
                                         unit_phase(rng.uniform01()), false);
      cplx z = unit_phase(rng.uniform01());
      cplx b1 = unit_phase(rng.uniform01()), b2 = unit_phase(rng.uniform01());
      RestrictionCheck chk;
      try {
        chk = restriction_identity_check(op, -8, 8, z, b1, b2);
      } catch (const numeric_error&) {
        continue;  // z landed on the spectrum of a piece; draw again
      }
      worst_res = std::max(worst_res, chk.identity_residual);
      worst_cross = std::max(worst_cross, chk.cross_block_max);
      worst_geo = std::max(worst_geo, chk.geometric_constant);
      ++done;
    }
    r.pass = done == 50 && worst_res < 1e-9 && worst_cross == 0.0;
    r.detail = std::to_string(done) + "/50 windows, worst residual " + num(worst_res) +
               ", cross block " + num(worst_cross) + ", geometric constant " +
               num(worst_geo);
  });

  h.run("suitability verdicts survive perturbations one level down", [&](CheckResult& r) {
    Rng rng(2024);
    SamplingFunction f = SamplingFunction::canonical(2, cplx(0.9, 0.0));
    int done = 0, attempts = 0, survived = 0;
    while (done < 100 && attempts < 200) {
      ++attempts;
      TorusPoint x = TorusPoint::random(2, rng);
      VerblunskyPath path = verblunsky_path(f, map, x, -16, 16);
      FiniteCmv op = assemble_finite_cmv(path, cplx(1.0, 0.0), cplx(1.0, 0.0));

      // z at the midpoint of the largest eigenvalue gap on the circle
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.op);
      std::vector<double> args;
      for (long i = 0; i < es.eigenvalues().size(); ++i)
        args.push_back(std::arg(es.eigenvalues()[i]));
      std::sort(args.begin(), args.end());
      double best_gap = 0.0, mid = 0.0;
      for (size_t i = 0; i < args.size(); ++i) {
        double lo = args[i];
        double hi = (i + 1 < args.size()) ? args[i + 1] : args[0] + 2.0 * M_PI;
        if (hi - lo > best_gap) {
          best_gap = hi - lo;
          mid = 0.5 * (lo + hi);
        }
      }
      cplx z(std::cos(mid), std::sin(mid));

      double norm = 0.0;
      try {
        norm = inverse_operator_norm(cmv_system(op, z)).norm;
      } catch (const numeric_error&) {
        continue;
      }
      SuitabilityParams prm{0.02, std::log(norm) + 3 * std::log(2.0) + 0.75, 3};
      if (!(prm.Gamma > 0.0)) continue;
      if (!suitability_classify(op, z, prm, threads).suitable()) continue;

      double radius = perturb_suitability_margin(prm, op.b - op.a);
      VerblunskyPath bent = path;
      for (cplx& alpha : bent.alphas)
        alpha += rng.uniform(0.0, radius) * unit_phase(rng.uniform01());
      for (size_t i = 0; i < bent.alphas.size(); ++i)
        bent.rhos[i] = std::sqrt(1.0 - std::norm(bent.alphas[i]));
      cplx z_hat = z * unit_phase(rng.uniform(-radius, radius) / (2.0 * M_PI));
      FiniteCmv bent_op =
          assemble_finite_cmv(bent, cplx(1.0, 0.0), cplx(1.0, 0.0), false);
      SuitabilityParams down{prm.gamma, prm.Gamma, prm.p - 1};
      if (suitability_classify(bent_op, z_hat, down, threads).suitable()) ++survived;
      ++done;
    }
    r.pass = done == 100 && survived == 100;
    r.detail = std::to_string(survived) + "/" + std::to_string(done) +
               " perturbed verdicts held at level p-1 (" + std::to_string(attempts) +
               " draws)";
  });

  h.run("eigenvector amplitudes obey the interior green bound", [&](CheckResult& r) {
    VerblunskyPath path = canonical_window(0.5, 0, 255, 0.23, 0.71);
    FiniteCmv big = assemble_finite_cmv(path, unit_phase(0.05), unit_phase(0.6));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(big.op);
    double worst_ratio = 0.0, worst_res = 0.0;
    for (int k = 0; k < 20; ++k) {
      long idx = 13 * k;  // spread across the circle, 0..247
      cplx z = es.eigenvalues()[idx];
      Eigen::VectorXcd psi = es.eigenvectors().col(idx);
      SolutionBoundReport rep = solution_bound_check(big, z, psi, 26, 229);
      worst_ratio = std::max(worst_ratio, rep.max_ratio);
      worst_res = std::max(worst_res, rep.pair_residual);
    }
    r.pass = worst_ratio <= 1.0 + 1e-6 && worst_res < 1e-10;
    r.detail = "20 eigenpairs at N = 256: worst amplitude ratio " + num(worst_ratio) +
               ", worst pair residual " + num(worst_res);
  });

  h.run("approximation error budgets: taylor tail and truncation slope",
        [&](CheckResult& r) {
          Rng rng(7070);
          long violations = 0;
          for (int t = 0; t < 1000; ++t) {
            double x = rng.uniform(-0.9, 0.9);
            int n = 1 + static_cast<int>(rng.uniform_index(60));
            double err = std::fabs(sqrt_taylor(x, n) - std::sqrt(1.0 - x));
            if (err > std::pow(0.9, n) / 0.1) ++violations;
            double rad = std::fabs(x);
            if (rad >= 0.3 && n <= 20 && err > std::pow(rad, n) / (1.0 - rad))
              ++violations;
          }

          double c0 = 0.005;
          int deg = 14;
          TrigPolynomial table = geometric_table(c0, deg);
          SamplingFunction f = SamplingFunction::trig_poly(table);
          auto closed = [&](int D) {
            double s = 0.0;
            for (int m = D + 1; m <= deg; ++m) s += c0 * 8.0 * m * std::pow(2.0, -m);
            return s;
          };
          std::vector<double> ds, logerr;
          double worst_closed = 0.0;
          for (int D = 2; D <= 12; ++D) {
            TrigPolynomial trunc = trig_truncate(f, D);
            TrigPolynomial residual(2);
            for (const auto& [k, c] : table.coeffs) residual.add(k, c);
            for (const auto& [k, c] : trunc.coeffs) residual.add(k, -c);
            double err = 0.0;
            for (int i = 0; i < 128; ++i)
              for (int j = 0; j < 128; ++j) {
                TorusPoint x({i / 128.0, j / 128.0});
                err = std::max(err, std::abs(residual.eval(x)));
              }
            worst_closed = std::max(worst_closed, std::fabs(err - closed(D)) / closed(D));
            ds.push_back(D);
            logerr.push_back(std::log(err));
          }
          double slope = fit_slope(ds, logerr);
          double target = -std::log(2.0);
          bool slope_ok = std::fabs(slope - target) <= 0.2 * std::fabs(target);
          r.pass = violations == 0 && worst_closed < 1e-10 && slope_ok;
          r.detail = std::to_string(violations) +
                     " taylor violations of 1000; truncation slope " + num(slope) +
                     " vs " + num(target) + ", closed-form rel diff " + num(worst_closed);
        });

  h.run("return-time frequencies converge to the ball measure", [&](CheckResult& r) {
    Rng rng(88);
    BallRegion region(TorusPoint({0.31, 0.17}), 0.1);
    std::vector<double> err4, err5;
    double worst5 = 0.0;
    for (int s = 0; s < 10; ++s) {
      TorusPoint x = TorusPoint::random(2, rng);
      ReturnTimeStats s5 = return_time_count(map, x, region, 100000);
      ReturnTimeStats s4 = return_time_count(map, x, region, 10000);
      err5.push_back(std::fabs(s5.frequency - region.measure()));
      err4.push_back(std::fabs(s4.frequency - region.measure()));
      worst5 = std::max(worst5, err5.back());
    }
    double m4 = median(err4), m5 = median(err5);
    r.pass = worst5 < 0.008 && m4 > m5;
    r.detail = "worst error " + num(worst5) + " at L = 1e5; median error " + num(m4) +
               " (L = 1e4) vs " + num(m5) + " (L = 1e5)";
  });

  h.run("zero energy approaches the spectrum along growing windows", [&](CheckResult& r) {
    PotentialSpec spec(1.0, map, TorusPoint({0.2, 0.7}));
    ZeroSpectrumReport rep = zero_in_spectrum_check(spec, {256, 1024, 4096});
    r.pass = rep.nonincreasing && rep.min_abs_eig.back() < 0.05;
    r.detail = "min |eig| = " + num(rep.min_abs_eig[0]) + ", " +
               num(rep.min_abs_eig[1]) + ", " + num(rep.min_abs_eig[2]) +
               " over N = 256, 1024, 4096";
  });

  h.run("thouless integral agrees with the direct growth rate", [&](CheckResult& r) {
    IDSTable table = ids_estimate(1.0, map, 2048, 16, 513, 44, threads);
    double via_ids = thouless_L(table, 0.0);
    LyapunovEstimate direct = lyapunov_schrodinger(1.0, map, 0.0, 50000, 16, 61,
                                                   OrbitAverage::sampled, nullptr, threads);
    double diff = std::fabs(via_ids - direct.value);
    r.pass = diff < 0.02;
    r.detail = "thouless " + num(via_ids) + " vs transfer " + num(direct.value) +
               ", diff " + num(diff);
  });

  h.run("unsuitable-window census decays and the resolvent tail is linear",
        [&](CheckResult& r) {
          ExperimentConfig census;
          census.seed = 2026;
          census.threads = threads;  // defaults: M = 400 over N = 32, 64, 128
          UnsuitableMeasureReport rep = measure_unsuitable(census);
          bool monotone = rep.nonincreasing;
          double p_last = rep.scales.back().p_hat;
          bool small_ok = p_last <= 0.05;

          ExperimentConfig wcfg;
          wcfg.seed = 2026;
          wcfg.scales = {32, 64};
          wcfg.threads = threads;
          std::vector<double> grid;
          for (double b = 0.4; b <= 1.1e6; b *= 2.0) grid.push_back(b);
          WegnerTailReport tail = wegner_tail_estimate(wcfg, grid);
          bool slope_ok = tail.slope_full >= -1.5 && tail.slope_full <= -0.7;

          r.pass = monotone && small_ok && slope_ok;
          std::string ps;
          for (const ScaleCensus& s : rep.scales)
            ps += (ps.empty() ? "" : ", ") + num(s.p_hat);
          r.detail = "census p_hat = " + ps + " (monotone " +
                     (monotone ? "yes" : "no") + ", final <= 0.05 " +
                     (small_ok ? "yes" : "no") + "); tail slope " +
                     num(tail.slope_full) + " (subwindows " + num(tail.slope_sub) + ")";
        });

  h.run("seeded reruns produce byte-identical artifacts", [&](CheckResult& r) {
    fs::path dir(scratch_dir);
    fs::create_directories(dir);

    auto lyap_artifact = [&](const fs::path& p) {
      SamplingFunction f = SamplingFunction::canonical(2, cplx(0.5, 0.0));
      LyapunovEstimate e = lyapunov_szego(f, map, unit_phase(0.3), 20000, 8, 7,
                                          OrbitAverage::sampled, nullptr, threads);
      std::ofstream out(p, std::ios::binary);
      write_csv(out, {"value", "std_error", "steps", "samples", "renorms", "det_drift"},
                {{fmt_g17(e.value), fmt_g17(e.std_error), std::to_string(e.steps),
                  std::to_string(e.samples), std::to_string(e.renorms),
                  fmt_g17(e.det_drift)}});
    };
    auto ids_artifact = [&](const fs::path& p) {
      IDSTable t = ids_estimate(1.0, map, 256, 8, 65, 5, threads);
      std::vector<std::vector<std::string>> rows;
      for (size_t i = 0; i < t.energies.size(); ++i)
        rows.push_back({fmt_g17(t.energies[i]), fmt_g17(t.k[i])});
      std::ofstream out(p, std::ios::binary);
      write_csv(out, {"energy", "k"}, rows);
    };
    auto census_artifact = [&](const fs::path& p) {
      ExperimentConfig cfg;
      cfg.seed = 99;
      cfg.samples = 24;
      cfg.scales = {16, 24};
      cfg.lambda = 0.6;
      cfg.threads = threads;
      std::ofstream out(p, std::ios::binary);
      out << census_to_json(measure_unsuitable(cfg));
    };
    auto wegner_artifact = [&](const fs::path& p) {
      ExperimentConfig cfg;
      cfg.seed = 31;
      cfg.samples = 100;
      cfg.scales = {64};
      cfg.threads = threads;
      std::vector<double> grid;
      for (double b = 0.4; b <= 1.1e6; b *= 2.0) grid.push_back(b);
      std::ofstream out(p, std::ios::binary);
      out << wegner_to_json(wegner_tail_estimate(cfg, grid));
    };

    int identical = 0;
    const char* names[] = {"lyap.csv", "ids.csv", "census.json", "wegner.json"};
    std::function<void(const fs::path&)> builders[] = {lyap_artifact, ids_artifact,
                                                       census_artifact, wegner_artifact};
    std::string report;
    for (int i = 0; i < 4; ++i) {
      fs::path p1 = dir / (std::string(names[i]) + ".run1");
      fs::path p2 = dir / (std::string(names[i]) + ".run2");
      builders[i](p1);
      builders[i](p2);
      std::string b1 = slurp(p1), b2 = slurp(p2);
      bool same = !b1.empty() && b1 == b2;
      if (same) ++identical;
      report += (report.empty() ? "" : ", ") + std::string(names[i]) +
                (same ? " ok" : " DIFFERS");
    }
    r.pass = identical == 4;
    r.detail = report;
  });

  return h.results;
}

}  // namespace skewspec
