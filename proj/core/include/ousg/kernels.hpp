#pragma once

#include "ousg/gaussian.hpp"
#include "ousg/types.hpp"

#include <vector>

namespace ousg {

/// Kernels are refused below this time; the marginal covariance is too
/// close to singular for a meaningful density ratio.
inline constexpr double kKernelTimeFloor = 1e-8;

/// Rotation-block parameter set: one speed per 2x2 plane, optional zero
/// padding up to dim (dim >= 2 * theta.size()).
struct BlockSpec {
  std::vector<double> theta;
  Eigen::Index dim = 0;
};

BlockSpec make_block_spec(std::vector<double> theta, Eigen::Index dim);
Matrix rotation_generator(const BlockSpec& spec);

/// Density of the time-t transition of the OU semigroup relative to its
/// invariant measure:
///   h_t(x, y) = det(Q_inf Q_t^{-1})^{1/2}
///               exp{-[<Q_t^{-1} u, u> - <Q_inf^{-1} y, y>] / 2},
///   u = e^{tB} x - y.
/// Factorizations are cached per (params, t); reuse one evaluator when
/// scanning many (x, y) pairs at a fixed time.
class GeneralKernel {
 public:
  GeneralKernel(const OUParams& p, double t);

  double log_at(const Vector& x, const Vector& y) const;
  double at(const Vector& x, const Vector& y) const;

  const Matrix& transition_matrix() const { return e_tb_; }
  const GaussianMeasure& marginal() const { return time_t_; }
  const GaussianMeasure& invariant() const { return invariant_; }
  double time() const { return t_; }

 private:
  double t_;
  Matrix e_tb_;
  GaussianMeasure time_t_;
  GaussianMeasure invariant_;
  double half_log_det_ratio_;
};

double log_kernel_general(const OUParams& p, double t, const Vector& x,
                          const Vector& y);
double kernel_general(const OUParams& p, double t, const Vector& x,
                      const Vector& y);

/// Symmetric (zero-rotation) kernel in dimension d, invariant measure
/// N(0, I/2):
///   h0_t(x, y) = (1-e^{-2t})^{-d/2}
///                exp{[|x+y|^2/(e^t+1) - |x-y|^2/(e^t-1)] / 2}.
double log_kernel_symmetric(Eigen::Index d, double t, const Vector& x,
                            const Vector& y);
double kernel_symmetric(Eigen::Index d, double t, const Vector& x,
                        const Vector& y);

/// Normal-drift kernel for skew-symmetric r: h_t(x,y) = h0_t(e^{tr} x, y).
double log_kernel_normal(const Matrix& r, double t, const Vector& x,
                         const Vector& y);
double kernel_normal(const Matrix& r, double t, const Vector& x,
                     const Vector& y);

/// Single rotation plane correction: the ratio of the rotated to the
/// unrotated symmetric kernel in 2D,
///   k_{t,theta}(xi, eta) = exp{-(2 e^{-t}/(1-e^{-2t}))
///       [(1 - cos(t theta)) <xi, eta> + sin(t theta) (xi ^ eta)]},
/// with xi ^ eta = xi_1 eta_2 - xi_2 eta_1.
double log_factor_2d(double theta, double t, const Vector2& xi,
                     const Vector2& eta);
double factor_2d(double theta, double t, const Vector2& xi,
                 const Vector2& eta);

/// Block factorization: symmetric kernel times one plane factor per
/// nonzero rotation speed. Equals kernel_normal(rotation_generator(spec)).
double log_kernel_block(const BlockSpec& spec, double t, const Vector& x,
                        const Vector& y);
double kernel_block(const BlockSpec& spec, double t, const Vector& x,
                    const Vector& y);

/// Kernel of the alpha-scaled rotation family (Q = I, B = (r-I)/(2 alpha))
/// through the normalized kernel: time and space rescale by 2 alpha.
double log_kernel_scaled(double alpha, const Matrix& r, double t,
                         const Vector& x, const Vector& y);
double kernel_scaled(double alpha, const Matrix& r, double t,
                     const Vector& x, const Vector& y);

/// Time reparametrization s = tau^{-1}(t): tau maps (0,1) onto (0,inf),
///   tau(s) = log((1+s)/(1-s)),  tau_inv(t) = tanh(t/2).
double tau(double s);
double tau_inv(double t);

/// Q_s(x, y) = |(1+s) x - (1-s) y|^2.
double quadratic_form_qs(double s, const Vector& x, const Vector& y);

/// Symmetric kernel at t = tau(s) written in the s variable; exact
/// identity
///   h0_{tau(s)}(x, y) = ((1+s)^2/(4s))^{d/2} exp{|x|^2 - Q_s(x,y)/(4s)}.
double log_kernel_symmetric_reparam(Eigen::Index d, double s, const Vector& x,
                                    const Vector& y);
double kernel_symmetric_reparam(Eigen::Index d, double s, const Vector& x,
                                const Vector& y);

}  // namespace ousg
