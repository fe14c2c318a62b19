#include "ousg/gaussian.hpp"

#include "ousg/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>

namespace ousg {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr Eigen::Index kSampleBatch = 4096;

}  // namespace

OUParams make_ou_params(Matrix q, Matrix b) {
  require_square(q, "OUParams.Q");
  require_finite(q, "OUParams.Q");
  require_square(b, "OUParams.B");
  require_finite(b, "OUParams.B");
  require(q.rows() == b.rows(),
          "OUParams: Q is " + std::to_string(q.rows()) + "x" +
              std::to_string(q.cols()) + " but B is " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  require(is_symmetric(q), "OUParams.Q: must be symmetric");
  q = 0.5 * (q + q.transpose());
  Eigen::LLT<Matrix> llt(q);
  require(llt.info() == Eigen::Success,
          "OUParams.Q: must be positive definite");
  const double abscissa = spectral_abscissa(b);
  require(abscissa < 0.0,
          "OUParams.B: must be Hurwitz (spectral abscissa " +
              std::to_string(abscissa) + " >= 0)");
  return OUParams{std::move(q), std::move(b)};
}

OUParams ou_params_from_rotation(double alpha, const Matrix& r) {
  require(alpha > 0.0, "OUParams.alpha: must be positive");
  require_square(r, "OUParams.R");
  require(is_skew_symmetric(r), "OUParams.R: must be skew-symmetric");
  const Eigen::Index d = r.rows();
  return make_ou_params(Matrix::Identity(d, d),
                        (r - Matrix::Identity(d, d)) / (2.0 * alpha));
}

Matrix lyapunov_stationary(const Matrix& q, const Matrix& b) {
  require_square(q, "lyapunov.Q");
  require_square(b, "lyapunov.B");
  require(q.rows() == b.rows(), "lyapunov: Q and B dimensions differ");
  const Eigen::Index d = q.rows();
  if (d > 16)
    throw capability_error(
        "lyapunov_stationary: dimension > 16 exceeds the dense Kronecker "
        "solver in this build");

  // vec(B X + X B^T) = (I (x) B + B (x) I) vec(X), column-major vec.
  const Eigen::Index dd = d * d;
  Matrix k = Matrix::Zero(dd, dd);
  for (Eigen::Index c = 0; c < d; ++c)
    k.block(c * d, c * d, d, d) += b;
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r2 = 0; r2 < d; ++r2)
      for (Eigen::Index i = 0; i < d; ++i)
        k(r2 * d + i, c * d + i) += b(r2, c);

  Vector rhs(dd);
  for (Eigen::Index c = 0; c < d; ++c) rhs.segment(c * d, d) = -q.col(c);
  Eigen::PartialPivLU<Matrix> lu(k);
  Vector v = lu.solve(rhs);
  if (!v.allFinite() || (k * v - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
    throw numeric_error(
        "lyapunov_stationary: Kronecker system is singular; B is likely not "
        "Hurwitz");

  Matrix x(d, d);
  for (Eigen::Index c = 0; c < d; ++c) x.col(c) = v.segment(c * d, d);
  x = 0.5 * (x + x.transpose());
  Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success)
    throw numeric_error(
        "lyapunov_stationary: solution is not positive definite");
  return x;
}

Matrix covariance_at(const OUParams& p, double t) {
  require_domain(t > 0.0, "covariance_at: t must be positive");
  if (std::isinf(t)) return lyapunov_stationary(p.q, p.b);

  const double bnorm = p.b.norm();
  const double t_switch = 0.1 / (1.0 + bnorm);
  if (t <= t_switch) {
    // Short horizon: fixed-step RK4 on dQ/dt = B Q + Q B^T + Q0. No
    // cancellation, and with h ~ 1e-2/(1+|B|) the truncation error is far
    // below roundoff on this interval.
    const int steps =
        std::max(16, static_cast<int>(std::ceil(t * (1.0 + bnorm) / 0.005)));
    const double h = t / steps;
    auto rhs = [&](const Matrix& x) -> Matrix {
      return p.b * x + x * p.b.transpose() + p.q;
    };
    Matrix x = Matrix::Zero(p.dim(), p.dim());
    for (int i = 0; i < steps; ++i) {
      const Matrix k1 = rhs(x);
      const Matrix k2 = rhs(x + 0.5 * h * k1);
      const Matrix k3 = rhs(x + 0.5 * h * k2);
      const Matrix k4 = rhs(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return 0.5 * (x + x.transpose());
  }

  // Longer horizon: Q_t = Q_inf - e^{tB} Q_inf e^{tB^T}. The subtraction
  // is benign here because |e^{tB} Q_inf e^{tB^T}| is no longer close to
  // |Q_inf| once t is past the switch point.
  const Matrix qinf = lyapunov_stationary(p.q, p.b);
  const Matrix e = expm(t * p.b);
  Matrix x = qinf - e * qinf * e.transpose();
  return 0.5 * (x + x.transpose());
}

GaussianMeasure::GaussianMeasure(Matrix sigma) : sigma_(std::move(sigma)) {
  require_square(sigma_, "GaussianMeasure.sigma");
  require_finite(sigma_, "GaussianMeasure.sigma");
  require(is_symmetric(sigma_), "GaussianMeasure.sigma: must be symmetric");
  sigma_ = 0.5 * (sigma_ + sigma_.transpose());
  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success)
    throw numeric_error("GaussianMeasure: covariance not positive definite");
  log_det_ = 0.0;
  for (Eigen::Index i = 0; i < sigma_.rows(); ++i)
    log_det_ += 2.0 * std::log(llt_.matrixL()(i, i));
  log_norm_ = -0.5 * (sigma_.rows() * std::log(2.0 * kPi) + log_det_);
}

double GaussianMeasure::quadratic_form(const Vector& x) const {
  require_dim(x, dim(), "GaussianMeasure.quadratic_form");
  return llt_.matrixL().solve(x).squaredNorm();
}

double GaussianMeasure::log_density(const Vector& x) const {
  return log_norm_ - 0.5 * quadratic_form(x);
}

double GaussianMeasure::density(const Vector& x) const {
  return std::exp(log_density(x));
}

GaussianMeasure measure_at(const OUParams& p, double t) {
  return GaussianMeasure(covariance_at(p, t));
}

GaussianMeasure invariant_measure(const OUParams& p) {
  return GaussianMeasure(lyapunov_stationary(p.q, p.b));
}

GaussianStream::GaussianStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t s = seed;
  std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s),
                    splitmix64(s)};
  engine_.seed(seq);
}

GaussianStream GaussianStream::split(std::uint64_t index) const {
  std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return GaussianStream(splitmix64(s));
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on uniforms in (0,1]; u1 is bounded away from zero so the
  // log stays finite.
  const double u1 =
      (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Vector GaussianStream::next_vector(Eigen::Index d) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = next();
  return v;
}

Matrix sample(const GaussianMeasure& m, Eigen::Index n, std::uint64_t seed) {
  require(n >= 0, "sample: n must be nonnegative");
  const Eigen::Index d = m.dim();
  Matrix out(n, d);
  const Matrix l = m.llt().matrixL();
  GaussianStream root(seed);
  for (Eigen::Index lo = 0; lo < n; lo += kSampleBatch) {
    const Eigen::Index hi = std::min(n, lo + kSampleBatch);
    GaussianStream s = root.split(static_cast<std::uint64_t>(lo / kSampleBatch));
    for (Eigen::Index i = lo; i < hi; ++i)
      out.row(i) = (l * s.next_vector(d)).transpose();
  }
  return out;
}

const HermiteRule& gauss_hermite_1d(int order) {
  require(order >= 1 && order <= 512,
          "gauss_hermite_1d: order must be in [1, 512]");
  static std::map<int, HermiteRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  // Golub-Welsch: eigenvalues of the Jacobi tridiagonal give the nodes,
  // squared first eigenvector components give the weights.
  Matrix j = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(0.5 * k);
    j(k - 1, k) = off;
    j(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(j);
  if (solver.info() != Eigen::Success)
    throw numeric_error("gauss_hermite_1d: Jacobi eigensolver failed");

  HermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double sqrt_pi = std::sqrt(kPi);
  for (int k = 0; k < order; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = sqrt_pi * v0 * v0;
  }
  // Enforce the exact symmetry of the rule; the eigensolver output is
  // symmetric only to roundoff.
  for (int k = 0; k < order / 2; ++k) {
    const int m = order - 1 - k;
    const double node = 0.5 * (rule.nodes[m] - rule.nodes[k]);
    rule.nodes[k] = -node;
    rule.nodes[m] = node;
    const double w = 0.5 * (rule.weights[k] + rule.weights[m]);
    rule.weights[k] = w;
    rule.weights[m] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

  return cache.emplace(order, std::move(rule)).first->second;
}

QuadratureRule gauss_quadrature(const GaussianMeasure& m, int order,
                                Eigen::Index max_dim) {
  const Eigen::Index d = m.dim();
  if (d > max_dim)
    throw capability_error(
        "gauss_quadrature: dimension " + std::to_string(d) +
        " exceeds the tensor-rule cap " + std::to_string(max_dim));
  require(order >= 1, "gauss_quadrature: order must be >= 1");

  const HermiteRule& h1 = gauss_hermite_1d(order);
  const Matrix l = m.llt().matrixL();

  std::size_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) total *= h1.nodes.size();

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.reserve(total);
  rule.weights.reserve(total);

  // Odometer over the tensor grid; x = sqrt(2) L z maps the e^{-z^2}
  // weight to N(0, sigma).
  std::vector<int> idx(d, 0);
  Vector z(d);
  const double sqrt2 = std::sqrt(2.0);
  double weight_sum = 0.0;
  for (std::size_t c = 0; c < total; ++c) {
    double w = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      z(i) = h1.nodes[idx[i]];
      w *= h1.weights[idx[i]];
    }
    rule.nodes.push_back(sqrt2 * (l * z));
    rule.weights.push_back(w);
    weight_sum += w;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (++idx[i] < static_cast<int>(h1.nodes.size())) break;
      idx[i] = 0;
    }
  }
  for (double& w : rule.weights) w /= weight_sum;
  return rule;
}

double integrate(const QuadratureRule& rule,
                 const std::function<double(const Vector&)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(rule.nodes[i]);
  return acc;
}

}  // namespace ousg
