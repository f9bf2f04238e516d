#include "skewspec/torus.hpp"

#include <cmath>
#include <limits>

#include "skewspec/errors.hpp"

namespace skewspec {

TorusPoint::TorusPoint(std::vector<double> c) : coords(std::move(c)) {
  require(!coords.empty(), "TorusPoint: dimension must be >= 1");
  for (double& v : coords) {
    require(std::isfinite(v), "TorusPoint: coordinates must be finite");
    v = frac(v);
  }
}

TorusPoint TorusPoint::random(int r, Rng& rng) {
  std::vector<double> c(static_cast<size_t>(r));
  for (double& v : c) v = rng.uniform01();
  return TorusPoint(std::move(c));
}

SkewShiftMap::SkewShiftMap(int r_, double omega_) : r(r_), omega(omega_) {
  require(r >= 1, "SkewShiftMap: r must be >= 1");
  require(std::isfinite(omega), "SkewShiftMap: omega must be finite");
  omega = frac(omega);
}

TorusPoint SkewShiftMap::step(const TorusPoint& x) const {
  require(x.dim() == r, "SkewShiftMap::step: dimension mismatch");
  TorusPoint y;
  y.coords.resize(static_cast<size_t>(r));
  y.coords[0] = frac(x.coords[0] + omega);
  for (int l = 1; l < r; ++l)
    y.coords[static_cast<size_t>(l)] =
        frac(x.coords[static_cast<size_t>(l)] + x.coords[static_cast<size_t>(l - 1)]);
  return y;
}

TorusPoint SkewShiftMap::inverse_step(const TorusPoint& x) const {
  require(x.dim() == r, "SkewShiftMap::inverse_step: dimension mismatch");
  TorusPoint y;
  y.coords.resize(static_cast<size_t>(r));
  y.coords[0] = frac(x.coords[0] - omega);
  for (int l = 1; l < r; ++l)
    y.coords[static_cast<size_t>(l)] =
        frac(x.coords[static_cast<size_t>(l)] - y.coords[static_cast<size_t>(l - 1)]);
  return y;
}

TorusPoint SkewShiftMap::iterate(const TorusPoint& x, long n) const {
  TorusPoint y = x;
  if (n >= 0) {
    for (long i = 0; i < n; ++i) y = step(y);
  } else {
    for (long i = 0; i > n; --i) y = inverse_step(y);
  }
  return y;
}

double SkewShiftMap::closed_form_last(const TorusPoint& x, long n) const {
  require(r == 2, "closed_form_last: closed form implemented for r = 2");
  require(x.dim() == 2, "closed_form_last: dimension mismatch");
  double dn = static_cast<double>(n);
  return frac(x.coords[1] + dn * x.coords[0] + omega * dn * (dn - 1.0) / 2.0);
}

DiophantineReport diophantine_quality(double omega, long q_max) {
  require(q_max >= 1, "diophantine_quality: q_max must be >= 1");
  require(std::isfinite(omega), "diophantine_quality: omega must be finite");
  DiophantineReport rep;
  rep.q_max = q_max;
  rep.kappa_lower = std::numeric_limits<double>::infinity();
  for (long q = 1; q <= q_max; ++q) {
    double d = std::fabs(std::remainder(static_cast<double>(q) * omega, 1.0));
    double val = static_cast<double>(q) * static_cast<double>(q) * d;
    if (val < rep.kappa_lower) {
      rep.kappa_lower = val;
      rep.worst_q = q;
    }
  }
  return rep;
}

BallRegion::BallRegion(TorusPoint c, double eps) : center(std::move(c)), radius(eps) {
  require(eps > 0.0 && std::isfinite(eps), "BallRegion: radius must be positive");
}

bool BallRegion::contains(const TorusPoint& x) const {
  require(x.dim() == center.dim(), "BallRegion::contains: dimension mismatch");
  for (int i = 0; i < x.dim(); ++i)
    if (circle_dist(x[i], center[i]) > radius) return false;
  return true;
}

double BallRegion::measure() const {
  double m = 1.0;
  for (int i = 0; i < center.dim(); ++i) m *= std::min(1.0, 2.0 * radius);
  return m;
}

ReturnTimeStats return_time_count(const SkewShiftMap& map, const TorusPoint& x,
                                  const BallRegion& region, long L) {
  require(L >= 1, "return_time_count: horizon must be >= 1");
  require(x.dim() == map.r && region.center.dim() == map.r,
          "return_time_count: dimension mismatch");
  ReturnTimeStats st;
  st.horizon = L;
  st.target_measure = region.measure();
  TorusPoint y = x;
  for (long l = 1; l <= L; ++l) {
    y = map.step(y);
    if (region.contains(y)) ++st.hits;
  }
  st.frequency = static_cast<double>(st.hits) / static_cast<double>(L);
  return st;
}

}  // namespace skewspec
