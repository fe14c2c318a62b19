#include "detail.hpp"

namespace ousg::detail {

double inv_norm_cdf(double p) {
  require_domain(p > 0.0 && p < 1.0, "inv_norm_cdf: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

Vector sphere_point(std::uint64_t index, Eigen::Index d, unsigned axis0) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    // Clamp away from {0,1}: radical inverses never hit the endpoints,
    // but guard anyway.
    double u = halton(index, kPrimes[axis0 + static_cast<unsigned>(i)]);
    u = std::min(1.0 - 1e-12, std::max(1e-12, u));
    v(i) = inv_norm_cdf(u);
  }
  const double n = v.norm();
  return n > 0.0 ? Vector(v / n) : Vector(Vector::Unit(d, 0));
}

Vector ball_point(std::uint64_t index, Eigen::Index d, double radius,
                  unsigned axis0) {
  const Vector dir = sphere_point(index, d, axis0);
  const double u = halton(index, kPrimes[axis0 + static_cast<unsigned>(d)]);
  const double r =
      radius * std::pow(std::max(u, 1e-15), 1.0 / static_cast<double>(d));
  return r * dir;
}

}  // namespace ousg::detail
