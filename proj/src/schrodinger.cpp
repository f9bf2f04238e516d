#include "skewspec/schrodinger.hpp"

#include <cmath>
#include <limits>

#include "skewspec/errors.hpp"

namespace skewspec {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

PotentialSpec::PotentialSpec(double g_, SkewShiftMap map_, TorusPoint x_)
    : g(g_), map(map_), x(std::move(x_)) {
  require(g >= 0.0 && std::isfinite(g), "PotentialSpec: g must be nonnegative");
  require(map.r >= 2, "PotentialSpec: r must be >= 2");
  require(x.dim() == map.r, "PotentialSpec: dimension mismatch");
}

double skew_sampling_f(const TorusPoint& y) {
  int r = y.dim();
  double last = y[r - 1];
  double prev = y[r - 2];
  return std::cos(kTwoPi * last) - std::cos(kTwoPi * (last + prev));
}

double PotentialSpec::at(long n) const { return g * skew_sampling_f(map.iterate(x, n)); }

TridiagonalSystem SchrodingerFiniteOp::shifted(cplx z) const {
  long n = size();
  TridiagonalSystem sys;
  sys.diag.resize(static_cast<size_t>(n));
  sys.lower.assign(static_cast<size_t>(n > 0 ? n - 1 : 0), cplx(1.0, 0.0));
  sys.upper = sys.lower;
  for (long i = 0; i < n; ++i) sys.diag[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] - z;
  return sys;
}

Eigen::MatrixXd SchrodingerFiniteOp::dense() const {
  long n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    m(i, i) = v[static_cast<size_t>(i)];
    if (i + 1 < n) {
      m(i, i + 1) = 1.0;
      m(i + 1, i) = 1.0;
    }
  }
  return m;
}

SchrodingerFiniteOp restrict_schrodinger(const PotentialSpec& spec, long a, long b) {
  require(a <= b, "restrict_schrodinger: interval must satisfy a <= b");
  SchrodingerFiniteOp op;
  op.a = a;
  op.b = b;
  op.v.resize(static_cast<size_t>(b - a + 1));
  TorusPoint y = spec.map.iterate(spec.x, a);
  for (long n = a; n <= b; ++n) {
    op.v[static_cast<size_t>(n - a)] = spec.g * skew_sampling_f(y);
    if (n < b) y = spec.map.step(y);
  }
  return op;
}

GreenEntry green_entry(const SchrodingerFiniteOp& op, cplx z, long k, long l) {
  require(k >= op.a && k <= op.b && l >= op.a && l <= op.b,
          "green_entry: indices outside the window");
  CertifiedColumn col = certified_inverse_column(op.shifted(z), l - op.a);
  GreenEntry out;
  out.value = col.values[static_cast<size_t>(k - op.a)];
  out.residual = col.residual;
  out.condition_estimate = col.condition_estimate;
  return out;
}

}  // namespace skewspec
