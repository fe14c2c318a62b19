#include "ousg/kernels.hpp"

#include "ousg/linalg.hpp"

#include <cmath>

namespace ousg {

namespace {

void require_kernel_time(double t) {
  require_domain(t > 0.0 && !std::isinf(t) && !std::isnan(t),
                 "kernel: t must be positive and finite");
  if (t < kKernelTimeFloor)
    throw numeric_error(
        "kernel: t = " + std::to_string(t) +
        " is below the evaluation floor 1e-08; the marginal covariance is "
        "numerically singular there");
}

}  // namespace

BlockSpec make_block_spec(std::vector<double> theta, Eigen::Index dim) {
  require(dim >= 2 * static_cast<Eigen::Index>(theta.size()),
          "BlockSpec: dim must fit " + std::to_string(theta.size()) +
              " rotation planes");
  for (double th : theta)
    require(std::isfinite(th), "BlockSpec: rotation speeds must be finite");
  return BlockSpec{std::move(theta), dim};
}

Matrix rotation_generator(const BlockSpec& spec) {
  return rotation_generator(spec.theta, spec.dim);
}

GeneralKernel::GeneralKernel(const OUParams& p, double t)
    : t_(t),
      e_tb_((require_kernel_time(t), expm(t * p.b))),
      time_t_(covariance_at(p, t)),
      invariant_(covariance_at(p, std::numeric_limits<double>::infinity())),
      half_log_det_ratio_(0.5 * (invariant_.log_det() - time_t_.log_det())) {}

double GeneralKernel::log_at(const Vector& x, const Vector& y) const {
  const Vector u = e_tb_ * x - y;
  return half_log_det_ratio_ -
         0.5 * (time_t_.quadratic_form(u) - invariant_.quadratic_form(y));
}

double GeneralKernel::at(const Vector& x, const Vector& y) const {
  return std::exp(log_at(x, y));
}

double log_kernel_general(const OUParams& p, double t, const Vector& x,
                          const Vector& y) {
  return GeneralKernel(p, t).log_at(x, y);
}

double kernel_general(const OUParams& p, double t, const Vector& x,
                      const Vector& y) {
  return std::exp(log_kernel_general(p, t, x, y));
}

double log_kernel_symmetric(Eigen::Index d, double t, const Vector& x,
                            const Vector& y) {
  require_kernel_time(t);
  require_dim(x, d, "kernel_symmetric.x");
  require_dim(y, d, "kernel_symmetric.y");
  const double em2 = -std::expm1(-2.0 * t);  // 1 - e^{-2t}
  const double ep = std::expm1(t);           // e^t - 1, +inf for huge t is fine
  const double et1 = std::exp(t) + 1.0;
  return -0.5 * static_cast<double>(d) * std::log(em2) +
         0.5 * ((x + y).squaredNorm() / et1 - (x - y).squaredNorm() / ep);
}

double kernel_symmetric(Eigen::Index d, double t, const Vector& x,
                        const Vector& y) {
  return std::exp(log_kernel_symmetric(d, t, x, y));
}

double log_kernel_normal(const Matrix& r, double t, const Vector& x,
                         const Vector& y) {
  require_square(r, "kernel_normal.r");
  require(is_skew_symmetric(r), "kernel_normal.r: must be skew-symmetric");
  require_kernel_time(t);
  const Eigen::Index d = r.rows();
  require_dim(x, d, "kernel_normal.x");
  require_dim(y, d, "kernel_normal.y");
  return log_kernel_symmetric(d, t, expm(t * r) * x, y);
}

double kernel_normal(const Matrix& r, double t, const Vector& x,
                     const Vector& y) {
  return std::exp(log_kernel_normal(r, t, x, y));
}

double log_factor_2d(double theta, double t, const Vector2& xi,
                     const Vector2& eta) {
  require_kernel_time(t);
  // Rotating the first argument of the symmetric kernel changes only the
  // cross terms: <e^{tR} xi, eta> = cos(t theta) <xi,eta> - sin(t theta)
  // (xi ^ eta), and both squared-norm differences collapse to the form
  // below with coefficient 2 e^{-t} / (1 - e^{-2t}).
  const double em2 = -std::expm1(-2.0 * t);
  const double coeff = 2.0 * std::exp(-t) / em2;
  const double ip = xi.dot(eta);
  const double wedge = xi.x() * eta.y() - xi.y() * eta.x();
  const double a = t * theta;
  return -coeff * ((1.0 - std::cos(a)) * ip + std::sin(a) * wedge);
}

double factor_2d(double theta, double t, const Vector2& xi,
                 const Vector2& eta) {
  return std::exp(log_factor_2d(theta, t, xi, eta));
}

double log_kernel_block(const BlockSpec& spec, double t, const Vector& x,
                        const Vector& y) {
  require_kernel_time(t);
  require_dim(x, spec.dim, "kernel_block.x");
  require_dim(y, spec.dim, "kernel_block.y");
  double acc = log_kernel_symmetric(spec.dim, t, x, y);
  for (std::size_t j = 0; j < spec.theta.size(); ++j) {
    if (spec.theta[j] == 0.0) continue;
    const Eigen::Index k = 2 * static_cast<Eigen::Index>(j);
    acc += log_factor_2d(spec.theta[j], t, x.segment<2>(k), y.segment<2>(k));
  }
  return acc;
}

double kernel_block(const BlockSpec& spec, double t, const Vector& x,
                    const Vector& y) {
  return std::exp(log_kernel_block(spec, t, x, y));
}

double log_kernel_scaled(double alpha, const Matrix& r, double t,
                         const Vector& x, const Vector& y) {
  require(alpha > 0.0, "kernel_scaled: alpha must be positive");
  const double c = 2.0 * alpha;
  const double sc = 1.0 / std::sqrt(c);
  return log_kernel_normal(r, t / c, sc * x, sc * y);
}

double kernel_scaled(double alpha, const Matrix& r, double t, const Vector& x,
                     const Vector& y) {
  return std::exp(log_kernel_scaled(alpha, r, t, x, y));
}

double tau(double s) {
  require_domain(s > 0.0 && s < 1.0, "tau: s must lie in (0, 1)");
  return std::log1p(s) - std::log1p(-s);
}

double tau_inv(double t) {
  require_domain(t > 0.0, "tau_inv: t must be positive");
  return std::tanh(0.5 * t);
}

double quadratic_form_qs(double s, const Vector& x, const Vector& y) {
  require(x.size() == y.size(), "quadratic_form_qs: dimension mismatch");
  return ((1.0 + s) * x - (1.0 - s) * y).squaredNorm();
}

double log_kernel_symmetric_reparam(Eigen::Index d, double s, const Vector& x,
                                    const Vector& y) {
  require_domain(s > 0.0 && s < 1.0,
                 "kernel_symmetric_reparam: s must lie in (0, 1)");
  require_dim(x, d, "kernel_symmetric_reparam.x");
  require_dim(y, d, "kernel_symmetric_reparam.y");
  const double log_pref =
      0.5 * static_cast<double>(d) *
      (2.0 * std::log1p(s) - std::log(4.0 * s));
  return log_pref + x.squaredNorm() - quadratic_form_qs(s, x, y) / (4.0 * s);
}

double kernel_symmetric_reparam(Eigen::Index d, double s, const Vector& x,
                                const Vector& y) {
  return std::exp(log_kernel_symmetric_reparam(d, s, x, y));
}

}  // namespace ousg
