#include "skewspec/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "skewspec/errors.hpp"
#include "skewspec/parallel.hpp"

namespace skewspec {

namespace {

TridiagonalSystem to_system(const TridiagonalMatrix& m) {
  TridiagonalSystem sys;
  sys.diag = m.diag;
  sys.lower = m.off;
  sys.upper = m.off;
  return sys;
}

void check_params(const SuitabilityParams& p) {
  require(p.gamma > 0.0 && std::isfinite(p.gamma), "suitability: gamma must be > 0");
  require(p.Gamma > 0.0 && std::isfinite(p.Gamma), "suitability: Gamma must be > 0");
  require(p.p >= 0, "suitability: p must be >= 0");
}

constexpr double kLog2 = 0.69314718055994530941723212145818;

// Shared worker for both operator kinds: sys is A(z) (resp. H - z) indexed by
// sites lo..hi with lo = -hi.
SuitabilityVerdict classify_sys(const TridiagonalSystem& sys, long lo, long hi,
                                const SuitabilityParams& prm, int threads) {
  check_params(prm);
  require(lo == -hi && hi >= 1, "suitability: window must be symmetric [-N, N] with N >= 1");
  long half = hi;
  long n = 2 * half + 1;

  SuitabilityVerdict v;
  InverseNormResult norm_res = inverse_operator_norm(sys);
  v.inverse_norm = norm_res.norm;
  double slack_norm = (prm.Gamma - prm.p * kLog2) - std::log(norm_res.norm);
  v.norm_ok = slack_norm >= 0.0;

  Eigen::MatrixXcd inv = tridiag_inverse(sys);
  double log_pref = -(prm.p + 1) * kLog2;
  std::vector<double> row_min(static_cast<size_t>(n),
                              std::numeric_limits<double>::infinity());
  std::vector<long> row_arg(static_cast<size_t>(n), 0);
  parallel_for(n, threads, [&](long i) {
    double best = std::numeric_limits<double>::infinity();
    long arg = 0;
    for (long j = 0; j < n; ++j) {
      long dist = std::labs(i - j);
      if (2 * dist < half) continue;
      double mag = std::abs(inv(i, j));
      if (mag == 0.0) continue;  // zero entry satisfies any decay bound
      double slack = (log_pref - prm.gamma * static_cast<double>(dist)) - std::log(mag);
      if (slack < best) {
        best = slack;
        arg = j;
      }
    }
    row_min[static_cast<size_t>(i)] = best;
    row_arg[static_cast<size_t>(i)] = arg;
  });
  double slack_decay = std::numeric_limits<double>::infinity();
  for (long i = 0; i < n; ++i) {
    if (row_min[static_cast<size_t>(i)] < slack_decay) {
      slack_decay = row_min[static_cast<size_t>(i)];
      v.worst_k = lo + i;
      v.worst_l = lo + row_arg[static_cast<size_t>(i)];
    }
  }
  v.decay_ok = slack_decay >= 0.0;
  v.margin = std::min(slack_norm, slack_decay);
  return v;
}

cplx phase_of(cplx w) {
  double m = std::abs(w);
  return m > 1e-12 ? w / m : cplx(1.0, 0.0);
}

}  // namespace

GreenEntry green_entry_cmv(const FiniteCmv& op, cplx z, long k, long l) {
  require(k >= op.a && k <= op.b && l >= op.a && l <= op.b,
          "green_entry_cmv: indices outside the window");
  CertifiedColumn col = certified_inverse_column(to_system(tridiagonal_a(op, z)), l - op.a);
  GreenEntry out;
  out.value = col.values[static_cast<size_t>(k - op.a)];
  out.residual = col.residual;
  out.condition_estimate = col.condition_estimate;
  return out;
}

SuitabilityVerdict suitability_classify(const FiniteCmv& op, cplx z,
                                        const SuitabilityParams& params, int threads) {
  require(std::fabs(std::abs(z) - 1.0) <= 1e-12,
          "suitability_classify: z must lie on the unit circle");
  return classify_sys(to_system(tridiagonal_a(op, z)), op.a, op.b, params, threads);
}

SuitabilityVerdict suitability_classify(const SchrodingerFiniteOp& op, cplx z,
                                        const SuitabilityParams& params, int threads) {
  return classify_sys(op.shifted(z), op.a, op.b, params, threads);
}

std::string verdict_to_json(const SuitabilityVerdict& v, long half_width, cplx z,
                            const SuitabilityParams& params) {
  nlohmann::ordered_json j;
  j["N"] = half_width;
  j["z"] = {z.real(), z.imag()};
  j["gamma"] = params.gamma;
  j["Gamma"] = params.Gamma;
  j["p"] = params.p;
  j["suitable"] = v.suitable();
  j["margin"] = v.margin;
  j["worst_pair"] = {v.worst_k, v.worst_l};
  return j.dump();
}

double perturb_suitability_margin(const SuitabilityParams& params, long interval_len) {
  require(params.gamma >= 0.0 && params.Gamma >= 0.0 && interval_len >= 0,
          "perturb_suitability_margin: negative inputs");
  return std::exp(-(2.0 * params.Gamma + params.gamma * static_cast<double>(interval_len)));
}

RestrictionCheck restriction_identity_check(const FiniteCmv& op, long c, long d, cplx z,
                                            cplx beta_inner, cplx beta_tilde_inner) {
  require(c >= op.a && d <= op.b && c <= d, "restriction_identity_check: [c,d] not inside");
  long a = op.a, b = op.b;
  long n = op.size();

  Eigen::MatrixXcd amat = tridiagonal_a(op, z).dense();

  // B: the inner window with its own boundary phases; interior entries coincide
  // with A because the alpha data and the site parities are shared.
  FiniteCmv inner = assemble_finite_cmv(op.path.window(c, d), beta_inner, beta_tilde_inner,
                                        /*with_dense=*/false);
  Eigen::MatrixXcd bmat = tridiagonal_a(inner, z).dense();

  // Block inverse, one diagonal block at a time; cross entries stay exact zeros.
  Eigen::MatrixXcd blocks_inv = Eigen::MatrixXcd::Zero(n, n);
  auto invert_into = [&](long lo, long hi) {
    long m = hi - lo + 1;
    if (m <= 0) return;
    Eigen::MatrixXcd blk = amat.block(lo - a, lo - a, m, m);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(blk);
    double rcond = lu.rcond();
    if (!(rcond > 1e-15))
      throw numeric_error("restriction_identity_check: singular block", 1.0 / rcond);
    blocks_inv.block(lo - a, lo - a, m, m) = lu.inverse();
  };
  invert_into(a, c - 1);  // A1, left piece: literal restriction of A
  invert_into(d + 1, b);  // A1, right piece
  {
    long m = d - c + 1;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(bmat);
    double rcond = lu.rcond();
    if (!(rcond > 1e-15))
      throw numeric_error("restriction_identity_check: singular inner block", 1.0 / rcond);
    blocks_inv.block(c - a, c - a, m, m) = lu.inverse();
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_a(amat);
  {
    double rcond = lu_a.rcond();
    if (!(rcond > 1e-15))
      throw numeric_error("restriction_identity_check: singular outer matrix", 1.0 / rcond);
  }
  Eigen::MatrixXcd a_inv = lu_a.inverse();

  Eigen::MatrixXcd blocks = Eigen::MatrixXcd::Zero(n, n);
  if (c > a) blocks.block(0, 0, c - a, c - a) = amat.block(0, 0, c - a, c - a);
  if (d < b) blocks.block(d + 1 - a, d + 1 - a, b - d, b - d) =
      amat.block(d + 1 - a, d + 1 - a, b - d, b - d);
  blocks.block(c - a, c - a, d - c + 1, d - c + 1) = bmat;
  Eigen::MatrixXcd gamma = blocks - amat;

  Eigen::MatrixXcd lhs = a_inv - blocks_inv;
  Eigen::MatrixXcd rhs = a_inv * gamma * blocks_inv;
  double a_scale = a_inv.cwiseAbs().maxCoeff();
  double b_scale = blocks_inv.cwiseAbs().maxCoeff();
  RestrictionCheck out;
  out.identity_residual =
      (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, a_scale * b_scale);

  for (long k = c; k <= d; ++k)
    for (long l = a; l <= b; ++l) {
      if (l >= c && l <= d) continue;
      out.cross_block_max = std::max({out.cross_block_max,
                                      std::abs(blocks_inv(k - a, l - a)),
                                      std::abs(blocks_inv(l - a, k - a))});
    }

  // Two-scale bound: for k in [c,d] and l outside, the identity pins G_A(k,l)
  // to cut terms G_B(k, c or d) * G_A(c-1|c|d|d+1, l); record the worst ratio.
  double worst = 0.0;
  for (long k = c; k <= d; ++k)
    for (long l = a; l <= b; ++l) {
      if (l >= c && l <= d) continue;
      double g_here = std::abs(a_inv(k - a, l - a));
      if (g_here == 0.0) continue;
      double sup_b = std::max(std::abs(blocks_inv(k - a, c - a)),
                              std::abs(blocks_inv(k - a, d - a)));
      double sup_a = 0.0;
      for (long m : {c - 1, c, d, d + 1})
        if (m >= a && m <= b) sup_a = std::max(sup_a, std::abs(a_inv(m - a, l - a)));
      double denom = sup_b * sup_a;
      if (denom > 0.0) worst = std::max(worst, g_here / denom);
    }
  out.geometric_constant = worst;
  return out;
}

SolutionBoundReport solution_bound_check(const FiniteCmv& big, cplx z,
                                         const Eigen::VectorXcd& psi, long a, long b) {
  require(big.has_dense, "solution_bound_check: dense operator required");
  require(psi.size() == big.size(), "solution_bound_check: eigenvector size mismatch");
  require(a > big.a && b < big.b && a + 1 < b,
          "solution_bound_check: inner window must leave one site on each side");

  SolutionBoundReport rep;
  rep.worst_site = a + 1;
  double psi_scale = psi.cwiseAbs().maxCoeff();
  if (psi_scale == 0.0) return rep;  // zero solution satisfies the bound as 0 <= 0
  rep.pair_residual = (big.op * psi - z * psi).cwiseAbs().maxCoeff() / psi_scale;
  if (rep.pair_residual > 1e-8)
    throw contract_error("solution_bound_check: (z, psi) is not an eigenpair");

  FiniteCmv win = assemble_finite_cmv(big.path.window(a, b), phase_of(big.path.alpha(a - 1)),
                                      phase_of(big.path.alpha(b)), /*with_dense=*/false);
  Eigen::MatrixXcd ginv = tridiag_inverse(to_system(tridiagonal_a(win, z)));

  long base = big.a;
  auto amp = [&](long m) { return std::abs(psi[m - base]); };
  double sup_lo = std::max(amp(a - 1), amp(a));
  double sup_hi = std::max(amp(b), amp(b + 1));
  for (long site = a + 1; site < b; ++site) {
    double rhs = 2.0 * std::abs(ginv(site - a, 0)) * sup_lo +
                 2.0 * std::abs(ginv(site - a, b - a)) * sup_hi;
    double lhs = amp(site);
    double ratio = lhs / std::max(rhs, 1e-300);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_site = site;
    }
  }
  return rep;
}

PhaseSweepResult best_boundary_phases(const VerblunskyPath& path, cplx z, int grid) {
  require(grid >= 1, "best_boundary_phases: grid must be >= 1");
  require(path.a == -path.b && path.b >= 1,
          "best_boundary_phases: window must be symmetric [-N, N]");
  long half = path.b;
  long n = 2 * half + 1;

  PhaseSweepResult best;
  double best_score = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      cplx beta = unit_phase(static_cast<double>(i) / grid);
      cplx beta_tilde = unit_phase(static_cast<double>(j) / grid);
      FiniteCmv op = assemble_finite_cmv(path, beta, beta_tilde, /*with_dense=*/false);
      TridiagonalSystem sys = to_system(tridiagonal_a(op, z));
      double norm = 0.0, edge = 0.0;
      try {
        norm = inverse_operator_norm(sys).norm;
        Eigen::MatrixXcd inv = tridiag_inverse(sys);
        for (long l = -half; l <= half; ++l) {
          if (2 * std::labs(l) > half) continue;
          edge = std::max({edge, std::abs(inv(l + half, 0)), std::abs(inv(l + half, n - 1))});
        }
      } catch (const numeric_error&) {
        continue;  // this phase pair sits on the spectrum
      }
      double score = norm * edge;
      if (score < best_score) {
        best_score = score;
        best.beta = beta;
        best.beta_tilde = beta_tilde;
        best.inverse_norm = norm;
        best.edge_green_max = edge;
      }
    }
  if (!std::isfinite(best_score))
    throw numeric_error("best_boundary_phases: every phase pair was singular");
  return best;
}

}  // namespace skewspec
