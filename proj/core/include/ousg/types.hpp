#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ousg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vector2 = Eigen::Vector2d;

/// A computation left its supported numeric range: singular or indefinite
/// covariance, eigensolver failure, evaluation time below the floor.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request exceeds what this build supports, e.g. tensor quadrature
/// above the dimension cap. Distinct from bad input.
class capability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what);
void require_domain(bool cond, const std::string& what);
void require_square(const Matrix& m, const std::string& name);
void require_finite(const Matrix& m, const std::string& name);
void require_finite(const Vector& v, const std::string& name);
void require_dim(const Vector& v, Eigen::Index dim, const std::string& name);

/// Frobenius-relative symmetry check used by every routine that consumes a
/// symmetric or skew-symmetric matrix.
bool is_symmetric(const Matrix& m, double tol = 1e-10);
bool is_skew_symmetric(const Matrix& m, double tol = 1e-10);

}  // namespace ousg
