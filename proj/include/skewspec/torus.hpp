#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "skewspec/rng.hpp"

namespace skewspec {

// Fractional part in [0,1). Guards against the x - floor(x) == 1.0 rounding case.
inline double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f -= 1.0;
  return f;
}

// Point on T^r, coordinates kept in [0,1).
struct TorusPoint {
  std::vector<double> coords;

  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> c);
  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[static_cast<size_t>(i)]; }

  static TorusPoint random(int r, Rng& rng);
};

// Distance on the circle, in [0, 1/2].
inline double circle_dist(double a, double b) {
  double d = frac(a - b);
  return d <= 0.5 ? d : 1.0 - d;
}

// x -> (x1 + w, x2 + x1, ..., xr + x_{r-1}) mod 1, all reads from the input point.
struct SkewShiftMap {
  int r = 2;
  double omega = 0.0;

  SkewShiftMap(int r_, double omega_);

  TorusPoint step(const TorusPoint& x) const;
  TorusPoint inverse_step(const TorusPoint& x) const;
  // n may be negative; |n| applications of step or inverse_step.
  TorusPoint iterate(const TorusPoint& x, long n) const;

  // Last-coordinate value of iterate(x, n) for r = 2, via the closed form
  // frac(x2 + n x1 + w n(n-1)/2). Used as the orbit oracle.
  double closed_form_last(const TorusPoint& x, long n) const;
};

// golden mean (sqrt(5)-1)/2
inline constexpr double kGoldenOmega = 0.61803398874989484820458683436564;

struct DiophantineReport {
  double kappa_lower = 0.0;  // min over q <= q_max of q^2 * dist(q*omega, Z)
  long q_max = 0;
  long worst_q = 0;
};

DiophantineReport diophantine_quality(double omega, long q_max);

// Sup-metric ball on the torus; radius >= 1/2 covers everything.
struct BallRegion {
  TorusPoint center;
  double radius = 0.0;

  BallRegion(TorusPoint c, double eps);
  bool contains(const TorusPoint& x) const;
  double measure() const;  // product of min(1, 2*radius)
};

struct ReturnTimeStats {
  long horizon = 0;
  long hits = 0;
  double frequency = 0.0;
  double target_measure = 0.0;
};

// Counts l in [1, L] with T^l x inside the region.
ReturnTimeStats return_time_count(const SkewShiftMap& map, const TorusPoint& x,
                                  const BallRegion& region, long L);

}  // namespace skewspec
