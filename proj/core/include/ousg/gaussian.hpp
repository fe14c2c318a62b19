#pragma once

#include "ousg/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace ousg {

/// Drift/diffusion pair of the Ornstein-Uhlenbeck semigroup
///   dX = B X dt + sqrt(Q) dW.
/// Q must be symmetric positive definite and B Hurwitz; construct through
/// make_ou_params so the invariants are checked once.
struct OUParams {
  Matrix q;
  Matrix b;
  Eigen::Index dim() const { return q.rows(); }
};

OUParams make_ou_params(Matrix q, Matrix b);

/// Normalized rotation family: Q = I, B = (r - I) / (2 alpha) for a
/// skew-symmetric r. Its invariant covariance is alpha I.
OUParams ou_params_from_rotation(double alpha, const Matrix& r);

/// Solves b x + x b^T + q = 0 for the stationary covariance. Requires b
/// Hurwitz (checked through the solvability of the Kronecker system and a
/// positive-definiteness check of the result).
Matrix lyapunov_stationary(const Matrix& q, const Matrix& b);

/// Covariance of the time-t marginal started at a point:
///   Q_t = int_0^t e^{sB} Q e^{sB^T} ds,  Q_inf = stationary solution.
/// Accepts t in (0, inf]; +inf returns the stationary covariance.
Matrix covariance_at(const OUParams& p, double t);

/// Centered Gaussian with cached Cholesky factor and log-normalizer.
class GaussianMeasure {
 public:
  explicit GaussianMeasure(Matrix sigma);

  Eigen::Index dim() const { return sigma_.rows(); }
  const Matrix& covariance() const { return sigma_; }
  const Eigen::LLT<Matrix>& llt() const { return llt_; }

  /// log of the density of N(0, sigma) at x.
  double log_density(const Vector& x) const;
  double density(const Vector& x) const;

  /// <sigma^{-1} x, x>.
  double quadratic_form(const Vector& x) const;

  double log_det() const { return log_det_; }

 private:
  Matrix sigma_;
  Eigen::LLT<Matrix> llt_;
  double log_det_ = 0.0;
  double log_norm_ = 0.0;
};

GaussianMeasure measure_at(const OUParams& p, double t);
GaussianMeasure invariant_measure(const OUParams& p);

/// Deterministic, splittable stream of standard normals (64-bit Mersenne
/// twister + Box-Muller). split(k) derives an independent substream from
/// the root seed; the draw sequence of any substream does not depend on
/// how many other substreams exist, which keeps batched sampling
/// reproducible across worker counts.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);

  GaussianStream split(std::uint64_t index) const;

  double next();
  Vector next_vector(Eigen::Index d);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// n independent draws from N(0, sigma), one per row. Rows are produced in
/// fixed batches with per-batch substreams, so the output depends only on
/// (measure, n, seed).
Matrix sample(const GaussianMeasure& m, Eigen::Index n, std::uint64_t seed);

/// Tensor Gauss-Hermite rule adapted to a centered Gaussian measure:
/// integrate(rule, f) approximates int f dN(0, sigma). Nodes are exact for
/// polynomials up to degree 2*order-1 per axis. Dimension is capped (cost
/// is order^dim); above the cap a capability_error is thrown.
struct QuadratureRule {
  std::vector<Vector> nodes;
  std::vector<double> weights;  // positive, sum to 1
  int order = 0;
};

QuadratureRule gauss_quadrature(const GaussianMeasure& m, int order,
                                Eigen::Index max_dim = 3);

double integrate(const QuadratureRule& rule,
                 const std::function<double(const Vector&)>& f);

/// 1D Gauss-Hermite nodes/weights for weight e^{-z^2} (physicists'
/// convention, weights summing to sqrt(pi)); cached per order.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const HermiteRule& gauss_hermite_1d(int order);

}  // namespace ousg
