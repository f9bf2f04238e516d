#include "skewspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "skewspec/errors.hpp"
#include "skewspec/parallel.hpp"
#include "skewspec/rng.hpp"

namespace skewspec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct SpanBounds {
  double lo = 0.0, hi = 0.0, scale = 0.0;
};

SpanBounds gershgorin_span(const SymTridiag& m) {
  const long n = m.size();
  SpanBounds s;
  s.lo = std::numeric_limits<double>::infinity();
  s.hi = -s.lo;
  for (long j = 0; j < n; ++j) {
    double r = 0.0;
    if (j > 0) r += std::abs(m.off[static_cast<size_t>(j - 1)]);
    if (j < n - 1) r += std::abs(m.off[static_cast<size_t>(j)]);
    s.lo = std::min(s.lo, m.diag[static_cast<size_t>(j)] - r);
    s.hi = std::max(s.hi, m.diag[static_cast<size_t>(j)] + r);
  }
  s.scale = std::max({std::abs(s.lo), std::abs(s.hi), 1e-30});
  double pad = 1e-8 * s.scale;
  s.lo -= pad;
  s.hi += pad;
  return s;
}

void check_band(const SymTridiag& m, const char* who) {
  require(!m.diag.empty(), std::string(who) + ": empty matrix");
  require(m.off.size() + 1 == m.diag.size(), std::string(who) + ": band sizes disagree");
}

// One inverse-iteration pass with a Rayleigh quotient readout; falls back to
// the bisection value when the shift sits too close to a pivot collapse.
double rayleigh_polish(const SymTridiag& m, double lam, double scale) {
  const long n = m.size();
  if (n == 1) return m.diag[0];
  std::vector<cplx> lower(m.off.begin(), m.off.end());
  std::vector<cplx> upper = lower;
  std::vector<cplx> diag(static_cast<size_t>(n));
  double shift = lam;
  for (int attempt = 0; attempt < 3; ++attempt) {
    for (long j = 0; j < n; ++j)
      diag[static_cast<size_t>(j)] = cplx(m.diag[static_cast<size_t>(j)] - shift, 0.0);
    TridiagFactor fac(lower, diag, upper);
    if (fac.singular()) {
      shift += static_cast<double>(attempt + 1) * 1e-13 * scale;
      continue;
    }
    std::vector<cplx> v(static_cast<size_t>(n));
    for (long j = 0; j < n; ++j)
      v[static_cast<size_t>(j)] = cplx(1.0 + 0.25 * std::cos(1.7 * static_cast<double>(j) + 0.3), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      fac.solve(v);
      double vmax = 0.0;
      for (const cplx& c : v) vmax = std::max(vmax, std::abs(c));
      if (!(vmax > 0.0) || !std::isfinite(vmax)) return lam;
      for (cplx& c : v) c /= vmax;
    }
    double num = 0.0, den = 0.0;
    for (long j = 0; j < n; ++j) {
      double vj = v[static_cast<size_t>(j)].real();
      double av = m.diag[static_cast<size_t>(j)] * vj;
      if (j > 0) av += m.off[static_cast<size_t>(j - 1)] * v[static_cast<size_t>(j - 1)].real();
      if (j < n - 1) av += m.off[static_cast<size_t>(j)] * v[static_cast<size_t>(j + 1)].real();
      num += av * vj;
      den += vj * vj;
    }
    if (den == 0.0) return lam;
    double rho = num / den;
    return std::abs(rho - lam) <= 1e-11 * scale ? rho : lam;
  }
  return lam;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<size_t>(points));
  for (int j = 0; j < points; ++j)
    g[static_cast<size_t>(j)] =
        lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
  return g;
}

// Reference grid for the gap CDFs: midpoints 0.025, 0.075, ..., 4.975. The
// offset keeps s = 1 strictly between grid points, so a rigid spectrum whose
// normalized gaps all equal 1 up to rounding matches the clock step exactly.
std::vector<double> spacing_reference_grid() {
  std::vector<double> g(100);
  for (int j = 0; j < 100; ++j) g[static_cast<size_t>(j)] = 0.025 + 0.05 * j;
  return g;
}

}  // namespace

SymTridiag sym_tridiag(const SchrodingerFiniteOp& op) {
  require(op.size() >= 1, "sym_tridiag: empty window");
  SymTridiag m;
  m.diag = op.v;
  m.off.assign(static_cast<size_t>(op.size() - 1), 1.0);
  return m;
}

long sturm_count(const SymTridiag& m, double x) {
  check_band(m, "sturm_count");
  const long n = m.size();
  long count = 0;
  double d = 1.0;
  for (long j = 0; j < n; ++j) {
    double head = m.diag[static_cast<size_t>(j)] - x;
    if (j > 0) {
      double b = m.off[static_cast<size_t>(j - 1)];
      head -= b * b / d;
    }
    d = head;
    if (d == 0.0) d = -std::numeric_limits<double>::min();
    if (d < 0.0) ++count;
  }
  return count;
}

std::vector<double> eigs_index_range(const SymTridiag& m, long k_lo, long k_hi) {
  check_band(m, "eigs_index_range");
  const long n = m.size();
  require(0 <= k_lo && k_lo <= k_hi && k_hi < n, "eigs_index_range: index window out of range");

  SpanBounds span = gershgorin_span(m);
  const double tol = 1e-13 * span.scale;
  std::vector<double> out(static_cast<size_t>(k_hi - k_lo + 1), 0.0);

  struct Seg {
    double a, b;
    long ca, cb;  // counts at the endpoints; indices [ca, cb) live inside
  };
  std::vector<Seg> stack;
  stack.push_back({span.lo, span.hi, sturm_count(m, span.lo), sturm_count(m, span.hi)});
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    long first = std::max(s.ca, k_lo);
    long last = std::min(s.cb - 1, k_hi);
    if (first > last) continue;
    double mid = 0.5 * (s.a + s.b);
    if (s.b - s.a <= tol || mid <= s.a || mid >= s.b) {
      for (long k = first; k <= last; ++k) out[static_cast<size_t>(k - k_lo)] = mid;
      continue;
    }
    long cm = std::clamp(sturm_count(m, mid), s.ca, s.cb);
    stack.push_back({s.a, mid, s.ca, cm});
    stack.push_back({mid, s.b, cm, s.cb});
  }

  for (double& lam : out) lam = rayleigh_polish(m, lam, span.scale);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> eigs_symmetric_tridiag(const SymTridiag& m) {
  check_band(m, "eigs_symmetric_tridiag");
  require(m.size() <= (1L << 20), "eigs_symmetric_tridiag: size cap 2^20");
  return eigs_index_range(m, 0, m.size() - 1);
}

std::vector<double> eigs_symmetric_tridiag(const SchrodingerFiniteOp& op) {
  return eigs_symmetric_tridiag(sym_tridiag(op));
}

std::vector<cplx> cmv_eigenvalues(const FiniteCmv& op) {
  require(op.size() >= 1 && op.size() <= 512, "cmv_eigenvalues: dense path capped at N = 512");
  require(op.has_dense, "cmv_eigenvalues: window assembled without the dense factors");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.op, false);
  if (es.info() != Eigen::Success)
    throw numeric_error("cmv_eigenvalues: eigensolver did not converge");
  std::vector<cplx> eigs(static_cast<size_t>(op.size()));
  for (long j = 0; j < op.size(); ++j) {
    cplx w = es.eigenvalues()(j);
    if (std::abs(std::abs(w) - 1.0) > 1e-8)
      throw numeric_error("cmv_eigenvalues: eigenvalue modulus drifted off the circle",
                          std::abs(std::abs(w) - 1.0));
    eigs[static_cast<size_t>(j)] = w;
  }
  std::sort(eigs.begin(), eigs.end(), [](const cplx& p, const cplx& q) {
    double ap = std::arg(p), aq = std::arg(q);
    if (ap != aq) return ap < aq;
    return std::abs(p) < std::abs(q);
  });
  return eigs;
}

IDSTable ids_estimate_grid(double g, const SkewShiftMap& map, long n, int samples,
                           const std::vector<double>& energies, std::uint64_t seed,
                           int threads) {
  require(n >= 64, "ids_estimate: window length below 64");
  require(samples >= 8, "ids_estimate: fewer than 8 samples");
  require(energies.size() >= 2, "ids_estimate: energy grid needs at least 2 points");
  require(std::is_sorted(energies.begin(), energies.end()),
          "ids_estimate: energy grid must be sorted");

  const long grid = static_cast<long>(energies.size());
  std::vector<std::vector<double>> per(static_cast<size_t>(samples));
  parallel_for(samples, threads, [&](long i) {
    Rng rng(seed, {static_cast<std::uint64_t>(i)});
    TorusPoint x = TorusPoint::random(map.r, rng);
    PotentialSpec ps(g, map, x);
    SymTridiag m = sym_tridiag(restrict_schrodinger(ps, 1, n));
    std::vector<double>& row = per[static_cast<size_t>(i)];
    row.resize(static_cast<size_t>(grid));
    for (long j = 0; j < grid; ++j)
      row[static_cast<size_t>(j)] =
          static_cast<double>(sturm_count(m, energies[static_cast<size_t>(j)])) /
          static_cast<double>(n);
  });

  IDSTable table;
  table.energies = energies;
  table.k.assign(static_cast<size_t>(grid), 0.0);
  for (int i = 0; i < samples; ++i)
    for (long j = 0; j < grid; ++j)
      table.k[static_cast<size_t>(j)] += per[static_cast<size_t>(i)][static_cast<size_t>(j)];
  for (double& v : table.k) v /= static_cast<double>(samples);
  table.n_used = n;
  table.samples = samples;
  return table;
}

IDSTable ids_estimate(double g, const SkewShiftMap& map, long n, int samples,
                      int grid_points, std::uint64_t seed, int threads) {
  require(grid_points >= 2, "ids_estimate: grid needs at least 2 points");
  double bound = 2.0 + 2.0 * std::abs(g) + 0.1;  // Gershgorin plus slack
  IDSTable table =
      ids_estimate_grid(g, map, n, samples, uniform_grid(-bound, bound, grid_points), seed, threads);
  if (table.k.front() != 0.0 || table.k.back() != 1.0)
    throw numeric_error("ids_estimate: counting function missed the spectrum span");
  return table;
}

double ids_value(const IDSTable& table, double energy) {
  require(table.energies.size() >= 2 && table.energies.size() == table.k.size(),
          "ids_value: malformed table");
  require(energy >= table.energies.front() && energy <= table.energies.back(),
          "ids_value: energy outside the tabulated grid (no extrapolation)");
  auto it = std::upper_bound(table.energies.begin(), table.energies.end(), energy);
  if (it == table.energies.end()) return table.k.back();
  size_t hi = static_cast<size_t>(it - table.energies.begin());
  if (hi == 0) return table.k.front();
  size_t lo = hi - 1;
  double w = table.energies[hi] - table.energies[lo];
  if (w <= 0.0) return table.k[hi];
  double t = (energy - table.energies[lo]) / w;
  return (1.0 - t) * table.k[lo] + t * table.k[hi];
}

ZeroSpectrumReport zero_in_spectrum_check(const PotentialSpec& spec,
                                          const std::vector<long>& sizes) {
  require(!sizes.empty(), "zero_in_spectrum_check: empty size list");
  ZeroSpectrumReport rep;
  rep.sizes = sizes;
  for (long n : sizes) {
    require(n >= 2, "zero_in_spectrum_check: window length below 2");
    SymTridiag m = sym_tridiag(restrict_schrodinger(spec, 1, n));
    long c = sturm_count(m, 0.0);  // eigenvalues <= 0
    double best = std::numeric_limits<double>::infinity();
    if (c >= 1) best = std::min(best, std::abs(eigs_index_range(m, c - 1, c - 1)[0]));
    if (c <= n - 1) best = std::min(best, std::abs(eigs_index_range(m, c, c)[0]));
    rep.min_abs_eig.push_back(best);
  }
  rep.nonincreasing = true;
  for (size_t i = 0; i + 1 < rep.min_abs_eig.size(); ++i)
    if (rep.min_abs_eig[i + 1] > rep.min_abs_eig[i] * (1.0 + 1e-12)) rep.nonincreasing = false;
  return rep;
}

SpacingStats spacing_from_eigenvalues(const std::vector<double>& eigs, long n,
                                      double center, double halfwidth) {
  require(n >= 1, "spacing_stats: matrix size must be positive");
  require(halfwidth > 0.0, "spacing_stats: window halfwidth must be positive");
  require(std::is_sorted(eigs.begin(), eigs.end()), "spacing_stats: eigenvalues must be sorted");

  const double h = 4.0 / static_cast<double>(n);
  const double lo = center - halfwidth, hi = center + halfwidth;
  long first = -1, last = -1;
  for (long i = 0; i < static_cast<long>(eigs.size()); ++i) {
    double e = eigs[static_cast<size_t>(i)];
    if (e < lo || e > hi) continue;
    if (first < 0) first = i;
    last = i;
  }
  require(first >= 0 && last - first + 1 >= 50,
          "spacing_stats: window holds fewer than 50 eigenvalues; widen it");

  auto density = [&](double t) {
    double acc = 0.0;
    for (double e : eigs) {
      double u = (t - e) / h;
      acc += std::exp(-0.5 * u * u);
    }
    return acc / (static_cast<double>(n) * h * std::sqrt(kTwoPi));
  };

  SpacingStats st;
  st.gaps.reserve(static_cast<size_t>(last - first));
  for (long i = first; i < last; ++i) {
    double gap = eigs[static_cast<size_t>(i + 1)] - eigs[static_cast<size_t>(i)];
    double mid = 0.5 * (eigs[static_cast<size_t>(i + 1)] + eigs[static_cast<size_t>(i)]);
    st.gaps.push_back(gap * static_cast<double>(n) * density(mid));
  }

  const double m = static_cast<double>(st.gaps.size());
  for (double s : st.gaps) st.mean += s;
  st.mean /= m;
  for (double s : st.gaps) st.variance += (s - st.mean) * (s - st.mean);
  st.variance /= std::max(1.0, m - 1.0);

  st.cdf_grid = spacing_reference_grid();
  std::vector<double> sorted = st.gaps;
  std::sort(sorted.begin(), sorted.end());
  st.cdf.resize(st.cdf_grid.size());
  for (size_t j = 0; j < st.cdf_grid.size(); ++j) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), st.cdf_grid[j]);
    st.cdf[j] = static_cast<double>(it - sorted.begin()) / m;
    double s = st.cdf_grid[j];
    st.ks_poisson = std::max(st.ks_poisson, std::abs(st.cdf[j] - (1.0 - std::exp(-s))));
    st.ks_clock = std::max(st.ks_clock, std::abs(st.cdf[j] - (s >= 1.0 ? 1.0 : 0.0)));
  }
  return st;
}

SpacingStats spacing_stats(const PotentialSpec& spec, long n, double center,
                           double halfwidth) {
  require(n >= 2, "spacing_stats: window length below 2");
  require(halfwidth > 0.0, "spacing_stats: window halfwidth must be positive");
  SymTridiag m = sym_tridiag(restrict_schrodinger(spec, 1, n));
  double margin = 6.0 * 4.0 / static_cast<double>(n);  // kernel support pad
  long clo = sturm_count(m, center - halfwidth - margin);
  long chi = sturm_count(m, center + halfwidth + margin);
  require(chi - clo >= 50, "spacing_stats: window holds fewer than 50 eigenvalues; widen it");
  std::vector<double> eigs = eigs_index_range(m, clo, chi - 1);
  return spacing_from_eigenvalues(eigs, n, center, halfwidth);
}

}  // namespace skewspec
