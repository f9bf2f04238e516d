#include "skewspec/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "skewspec/errors.hpp"

namespace skewspec {

namespace {

int norm_inf(const std::vector<int>& k) {
  int m = 0;
  for (int v : k) m = std::max(m, std::abs(v));
  return m;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw contract_error("skew_affine_power: integer overflow (n too large)");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    throw contract_error("skew_affine_power: integer overflow (n too large)");
  return out;
}

}  // namespace

int TrigPolynomial::degree() const {
  int d = 0;
  for (const auto& [k, c] : coeffs) d = std::max(d, norm_inf(k));
  return d;
}

void TrigPolynomial::add(const std::vector<int>& k, cplx c) {
  require(static_cast<int>(k.size()) == r, "TrigPolynomial::add: lattice dimension mismatch");
  auto it = coeffs.find(k);
  if (it == coeffs.end()) {
    if (c != cplx(0.0, 0.0)) coeffs.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second == cplx(0.0, 0.0)) coeffs.erase(it);
}

cplx TrigPolynomial::eval(const TorusPoint& x) const {
  require(x.dim() == r, "TrigPolynomial::eval: dimension mismatch");
  cplx s(0.0, 0.0);
  for (const auto& [k, c] : coeffs) {
    double phase = 0.0;
    for (int j = 0; j < r; ++j) phase += static_cast<double>(k[static_cast<size_t>(j)]) * x[j];
    s += c * unit_phase(phase);
  }
  return s;
}

double TrigPolynomial::coeff_abs_sum() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs) s += std::abs(c);
  return s;
}

double TrigPolynomial::lipschitz_bound() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs)
    s += std::abs(c) * 6.283185307179586 * static_cast<double>(norm_inf(k));
  return s;
}

TrigPolynomial TrigPolynomial::truncated(int D) const {
  require(D >= 0, "TrigPolynomial::truncated: degree must be >= 0");
  TrigPolynomial out(r);
  for (const auto& [k, c] : coeffs)
    if (norm_inf(k) <= D) out.coeffs.emplace(k, c);
  return out;
}

TrigPolynomial TrigPolynomial::conjugated() const {
  TrigPolynomial out(r);
  for (const auto& [k, c] : coeffs) {
    std::vector<int> nk(k.size());
    for (size_t i = 0; i < k.size(); ++i) nk[i] = -k[i];
    out.add(nk, std::conj(c));
  }
  return out;
}

TrigPolynomial TrigPolynomial::product(const TrigPolynomial& other) const {
  require(r == other.r, "TrigPolynomial::product: dimension mismatch");
  TrigPolynomial out(r);
  for (const auto& [ka, ca] : coeffs)
    for (const auto& [kb, cb] : other.coeffs) {
      std::vector<int> k(ka.size());
      for (size_t i = 0; i < ka.size(); ++i) k[i] = ka[i] + kb[i];
      out.add(k, ca * cb);
    }
  return out;
}

std::string TrigPolynomial::to_json() const {
  nlohmann::ordered_json j;
  j["r"] = r;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [k, c] : coeffs) {
    nlohmann::ordered_json entry;
    entry["k"] = k;
    entry["c"] = {c.real(), c.imag()};
    arr.push_back(entry);
  }
  j["coeffs"] = arr;
  return j.dump(2);
}

TrigPolynomial TrigPolynomial::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw contract_error(std::string("TrigPolynomial::from_json: ") + e.what());
  }
  require(j.contains("r") && j.contains("coeffs"), "TrigPolynomial::from_json: missing fields");
  TrigPolynomial out(j["r"].get<int>());
  require(out.r >= 1, "TrigPolynomial::from_json: r must be >= 1");
  for (const auto& entry : j["coeffs"]) {
    std::vector<int> k = entry["k"].get<std::vector<int>>();
    require(static_cast<int>(k.size()) == out.r,
            "TrigPolynomial::from_json: lattice dimension mismatch");
    auto c = entry["c"].get<std::vector<double>>();
    require(c.size() == 2, "TrigPolynomial::from_json: coefficient must be [re, im]");
    out.add(k, cplx(c[0], c[1]));
  }
  return out;
}

SamplingFunction SamplingFunction::canonical(int r, cplx lambda) {
  require(r >= 1, "SamplingFunction::canonical: r must be >= 1");
  require(std::abs(lambda) < 1.0, "SamplingFunction::canonical: |lambda| must be < 1");
  require(std::isfinite(lambda.real()) && std::isfinite(lambda.imag()),
          "SamplingFunction::canonical: lambda must be finite");
  SamplingFunction f;
  f.kind_ = Kind::canonical;
  f.r_ = r;
  f.lambda_ = lambda;
  f.table_ = TrigPolynomial(r);
  std::vector<int> k(static_cast<size_t>(r), 0);
  k.back() = 1;
  f.table_.add(k, lambda);
  return f;
}

SamplingFunction SamplingFunction::trig_poly(TrigPolynomial tp) {
  require(tp.r >= 1, "SamplingFunction::trig_poly: r must be >= 1");
  SamplingFunction f;
  f.kind_ = Kind::trig_poly;
  f.r_ = tp.r;
  f.table_ = std::move(tp);
  double bound = f.sup_bound();
  require(bound < 1.0, "SamplingFunction::trig_poly: sup |f| must be < 1 (bound " +
                           std::to_string(bound) + ")");
  return f;
}

cplx SamplingFunction::eval(const TorusPoint& x) const {
  require(x.dim() == r_, "SamplingFunction::eval: dimension mismatch");
  if (kind_ == Kind::canonical) return lambda_ * unit_phase(x[r_ - 1]);
  return table_.eval(x);
}

double SamplingFunction::sup_bound(int grid_per_dim) const {
  if (kind_ == Kind::canonical) return std::abs(lambda_);
  double l1 = table_.coeff_abs_sum();
  if (l1 < 1.0) return l1;
  require(r_ <= 3, "SamplingFunction::sup_bound: grid check supported for r <= 3");
  long total = 1;
  for (int i = 0; i < r_; ++i) total *= grid_per_dim;
  double best = 0.0;
  TorusPoint x;
  x.coords.assign(static_cast<size_t>(r_), 0.0);
  for (long idx = 0; idx < total; ++idx) {
    long t = idx;
    for (int i = 0; i < r_; ++i) {
      x.coords[static_cast<size_t>(i)] =
          static_cast<double>(t % grid_per_dim) / static_cast<double>(grid_per_dim);
      t /= grid_per_dim;
    }
    best = std::max(best, std::abs(table_.eval(x)));
  }
  return best + table_.lipschitz_bound() * 0.5 / static_cast<double>(grid_per_dim);
}

VerblunskyPath VerblunskyPath::window(long a2, long b2) const {
  require(a2 >= a && b2 <= b && a2 <= b2, "VerblunskyPath::window: slice out of range");
  VerblunskyPath out;
  out.a = a2;
  out.b = b2;
  out.alphas.assign(alphas.begin() + (a2 - a), alphas.begin() + (b2 - a + 1));
  out.rhos.assign(rhos.begin() + (a2 - a), rhos.begin() + (b2 - a + 1));
  return out;
}

VerblunskyPath verblunsky_path(const SamplingFunction& f, const SkewShiftMap& map,
                               const TorusPoint& x, long a, long b) {
  require(a <= b, "verblunsky_path: interval must satisfy a <= b");
  require(f.r() == map.r && x.dim() == map.r, "verblunsky_path: dimension mismatch");
  VerblunskyPath path;
  path.a = a;
  path.b = b;
  path.alphas.reserve(static_cast<size_t>(b - a + 1));
  path.rhos.reserve(static_cast<size_t>(b - a + 1));
  TorusPoint y = map.iterate(x, a);
  for (long n = a; n <= b; ++n) {
    cplx alpha = f.eval(y);
    double mod2 = std::norm(alpha);
    if (!(mod2 < 1.0))
      throw contract_error("verblunsky_path: |alpha| >= 1 at n = " + std::to_string(n));
    path.alphas.push_back(alpha);
    path.rhos.push_back(std::sqrt(1.0 - mod2));
    if (n < b) y = map.step(y);
  }
  return path;
}

TrigPolynomial trig_truncate(const SamplingFunction& f, int D) {
  return f.fourier().truncated(D);
}

double sqrt_taylor(double x, int N) {
  require(N >= 0, "sqrt_taylor: N must be >= 0");
  require(std::isfinite(x) && std::fabs(x) < 1.0, "sqrt_taylor: |x| must be < 1");
  double sum = 1.0;
  double c = 1.0;      // c_n
  double power = 1.0;  // x^n
  for (int n = 0; n < N; ++n) {
    c *= static_cast<double>(2 * n - 1) / static_cast<double>(2 * n + 2);
    power *= x;
    sum += c * power;
  }
  return sum;
}

TorusPoint SkewAffine::apply(const TorusPoint& x) const {
  require(x.dim() == r, "SkewAffine::apply: dimension mismatch");
  TorusPoint y;
  y.coords.resize(static_cast<size_t>(r));
  for (int l = 0; l < r; ++l) {
    double acc = c[static_cast<size_t>(l)];
    for (int j = 0; j <= l; ++j)
      acc += static_cast<double>(u[static_cast<size_t>(l)][static_cast<size_t>(j)]) * x[j];
    y.coords[static_cast<size_t>(l)] = frac(acc);
  }
  return y;
}

SkewAffine skew_affine_power(const SkewShiftMap& map, long n) {
  int r = map.r;
  auto identity = [r] {
    std::vector<std::vector<std::int64_t>> m(static_cast<size_t>(r),
                                             std::vector<std::int64_t>(static_cast<size_t>(r), 0));
    for (int i = 0; i < r; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    return m;
  };

  // one forward step: u1 = I + subdiagonal ones, c1 = (omega, 0, ..., 0)
  std::vector<std::vector<std::int64_t>> u1 = identity();
  for (int i = 1; i < r; ++i) u1[static_cast<size_t>(i)][static_cast<size_t>(i - 1)] = 1;
  std::vector<double> c1(static_cast<size_t>(r), 0.0);
  c1[0] = map.omega;

  std::vector<std::vector<std::int64_t>> ub = u1;
  std::vector<double> cb = c1;
  if (n < 0) {
    // inverse step: x = v (y - c1), v_{lj} = (-1)^{l-j} for j <= l
    std::vector<std::vector<std::int64_t>> v = identity();
    for (int l = 0; l < r; ++l)
      for (int j = 0; j < l; ++j)
        v[static_cast<size_t>(l)][static_cast<size_t>(j)] = ((l - j) % 2 == 0) ? 1 : -1;
    std::vector<double> cv(static_cast<size_t>(r), 0.0);
    for (int l = 0; l < r; ++l)
      for (int j = 0; j <= l; ++j)
        cv[static_cast<size_t>(l)] -=
            static_cast<double>(v[static_cast<size_t>(l)][static_cast<size_t>(j)]) *
            c1[static_cast<size_t>(j)];
    ub = v;
    cb = cv;
  }

  SkewAffine out;
  out.r = r;
  out.u = identity();
  out.c.assign(static_cast<size_t>(r), 0.0);
  long steps = n >= 0 ? n : -n;
  for (long s = 0; s < steps; ++s) {
    // (ub, cb) after (out.u, out.c): u <- ub * u, c <- ub * c + cb
    std::vector<std::vector<std::int64_t>> nu(static_cast<size_t>(r),
                                              std::vector<std::int64_t>(static_cast<size_t>(r), 0));
    std::vector<double> nc(static_cast<size_t>(r), 0.0);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        std::int64_t acc = 0;
        for (int k = 0; k < r; ++k)
          acc = checked_add(acc, checked_mul(ub[static_cast<size_t>(i)][static_cast<size_t>(k)],
                                             out.u[static_cast<size_t>(k)][static_cast<size_t>(j)]));
        nu[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
      }
      double acc = cb[static_cast<size_t>(i)];
      for (int k = 0; k < r; ++k)
        acc += static_cast<double>(ub[static_cast<size_t>(i)][static_cast<size_t>(k)]) *
               out.c[static_cast<size_t>(k)];
      nc[static_cast<size_t>(i)] = acc;
    }
    out.u = std::move(nu);
    out.c = std::move(nc);
  }
  return out;
}

TrigPolynomial compose_skew_lift(const TrigPolynomial& g, const SkewShiftMap& map, long n) {
  require(g.r == map.r, "compose_skew_lift: dimension mismatch");
  SkewAffine aff = skew_affine_power(map, n);
  TrigPolynomial out(g.r);
  for (const auto& [k, c] : g.coeffs) {
    std::vector<int> nk(static_cast<size_t>(g.r), 0);
    double phase = 0.0;
    for (int l = 0; l < g.r; ++l) {
      std::int64_t kl = k[static_cast<size_t>(l)];
      phase += static_cast<double>(kl) * aff.c[static_cast<size_t>(l)];
      for (int j = 0; j <= l; ++j) {
        std::int64_t term =
            checked_mul(kl, aff.u[static_cast<size_t>(l)][static_cast<size_t>(j)]);
        std::int64_t combined = checked_add(nk[static_cast<size_t>(j)], term);
        require(std::llabs(combined) < (1ll << 30),
                "compose_skew_lift: lifted lattice degree too large");
        nk[static_cast<size_t>(j)] = static_cast<int>(combined);
      }
    }
    out.add(nk, c * unit_phase(phase));
  }
  return out;
}

namespace {

// Values of g over the dyadic grid (j1/G, ..., jr/G), exploiting that k.x is a
// multiple of 1/G there, so only G distinct phase factors occur.
std::vector<cplx> grid_eval(const TrigPolynomial& g, int G) {
  require(g.r >= 1 && g.r <= 3, "grid evaluation supported for r <= 3");
  std::vector<cplx> roots(static_cast<size_t>(G));
  for (int m = 0; m < G; ++m)
    roots[static_cast<size_t>(m)] = unit_phase(static_cast<double>(m) / static_cast<double>(G));
  long total = 1;
  for (int i = 0; i < g.r; ++i) total *= G;
  std::vector<cplx> values(static_cast<size_t>(total), cplx(0.0, 0.0));
  std::vector<long> idx(static_cast<size_t>(g.r), 0);
  for (const auto& [k, c] : g.coeffs) {
    for (long p = 0; p < total; ++p) {
      long t = p;
      long dot = 0;
      for (int i = 0; i < g.r; ++i) {
        long gi = t % G;
        t /= G;
        dot += static_cast<long>(k[static_cast<size_t>(i)]) * gi;
      }
      long m = dot % G;
      if (m < 0) m += G;
      values[static_cast<size_t>(p)] += c * roots[static_cast<size_t>(m)];
    }
  }
  return values;
}

TorusPoint grid_point(long p, int r, int G) {
  TorusPoint x;
  x.coords.resize(static_cast<size_t>(r));
  for (int i = 0; i < r; ++i) {
    x.coords[static_cast<size_t>(i)] = static_cast<double>(p % G) / static_cast<double>(G);
    p /= G;
  }
  return x;
}

}  // namespace

double grid_sup_error(const TrigPolynomial& g, const SkewShiftMap& map, long n,
                      const SamplingFunction& f, int grid_per_dim, bool compare_rho) {
  require(grid_per_dim >= 2, "grid_sup_error: grid must have >= 2 points per dimension");
  SkewAffine aff = skew_affine_power(map, n);
  std::vector<cplx> approx = grid_eval(g, grid_per_dim);
  long total = static_cast<long>(approx.size());
  double worst = 0.0;
  for (long p = 0; p < total; ++p) {
    TorusPoint x = grid_point(p, map.r, grid_per_dim);
    TorusPoint y = aff.apply(x);
    cplx target = f.eval(y);
    if (compare_rho) target = cplx(std::sqrt(1.0 - std::norm(target)), 0.0);
    worst = std::max(worst, std::abs(approx[static_cast<size_t>(p)] - target));
  }
  return worst;
}

RhoApproxResult rho_poly_approx(const SamplingFunction& f, const SkewShiftMap& map,
                                long n, int D, int grid_per_dim) {
  require(D >= 1, "rho_poly_approx: D must be >= 1");
  require(f.r() == map.r, "rho_poly_approx: dimension mismatch");
  int M = static_cast<int>(std::floor(std::sqrt(static_cast<double>(D))));

  RhoApproxResult res;
  res.taylor_terms = M;
  res.p_alpha = compose_skew_lift(f.fourier().truncated(D), map, n);

  TrigPolynomial q1 = compose_skew_lift(f.fourier().truncated(M), map, n);
  double q1_l1 = q1.coeff_abs_sum();
  require(q1_l1 < 1.0,
          "rho_poly_approx: truncated generator must satisfy sup |f_D| < 1 (bound " +
              std::to_string(q1_l1) + ")");

  TrigPolynomial s = q1.product(q1.conjugated());  // |q1|^2 as a trig polynomial
  TrigPolynomial p2(map.r);
  p2.add(std::vector<int>(static_cast<size_t>(map.r), 0), cplx(1.0, 0.0));
  TrigPolynomial power = s;
  double cm = 1.0;
  for (int m = 1; m <= M; ++m) {
    cm *= static_cast<double>(2 * m - 3) / static_cast<double>(2 * m);
    for (const auto& [k, c] : power.coeffs) p2.add(k, cm * c);
    if (m < M) power = power.product(s);
  }
  res.p_rho = p2;

  res.alpha_sup_error = grid_sup_error(res.p_alpha, map, n, f, grid_per_dim, false);
  res.rho_sup_error = grid_sup_error(res.p_rho, map, n, f, grid_per_dim, true);
  return res;
}

}  // namespace skewspec
