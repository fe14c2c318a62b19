#pragma once

// Internal helpers shared by the maximal/certification translation units.
// Not installed.

#include "ousg/types.hpp"

#include <cmath>
#include <cstdint>

namespace ousg::detail {

/// Stable pair (s, t) with t = tau(s): both directions keep 1 - s and
/// 1 - s^2 accurate, which the naive expressions lose for t >~ 35.
struct STime {
  double t = 0.0;
  double s = 0.0;
  double one_minus_s = 0.0;
  double one_plus_s = 0.0;
  double one_minus_s2 = 0.0;

  static STime from_s(double s) {
    STime v;
    v.s = s;
    v.t = std::log1p(s) - std::log1p(-s);
    v.one_minus_s = 1.0 - s;
    v.one_plus_s = 1.0 + s;
    v.one_minus_s2 = v.one_minus_s * v.one_plus_s;
    return v;
  }

  static STime from_t(double t) {
    STime v;
    v.t = t;
    const double e = std::exp(-t);
    v.s = std::tanh(0.5 * t);
    v.one_minus_s = 2.0 * e / (1.0 + e);
    v.one_plus_s = 2.0 / (1.0 + e);
    v.one_minus_s2 = v.one_minus_s * v.one_plus_s;
    return v;
  }
};

/// Van der Corput radical inverse; bases should be distinct primes.
inline double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  for (std::uint64_t i = index + 1; i > 0; i /= base) {
    f /= base;
    r += f * static_cast<double>(i % base);
  }
  return r;
}

inline constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                       23, 29, 31, 37, 41, 43, 47, 53};

/// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9
/// relative accuracy; ample for quasi-random point placement).
double inv_norm_cdf(double p);

/// Uniform point in the d-ball of the given radius from d+1 Halton axes
/// starting at base index `axis0`.
Vector ball_point(std::uint64_t index, Eigen::Index d, double radius,
                  unsigned axis0);

/// Uniform point on the (d-1)-sphere from d Halton axes.
Vector sphere_point(std::uint64_t index, Eigen::Index d, unsigned axis0);

}  // namespace ousg::detail
