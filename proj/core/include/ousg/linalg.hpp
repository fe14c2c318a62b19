#pragma once

#include "ousg/types.hpp"

#include <vector>

namespace ousg {

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant. Accurate to machine precision for any finite input.
Matrix expm(const Matrix& a);

/// Largest real part among the eigenvalues of b.
double spectral_abscissa(const Matrix& b);

/// True iff every eigenvalue of b has strictly negative real part.
bool hurwitz_check(const Matrix& b);

/// Block-diagonal skew generator: consecutive 2x2 blocks
/// [[0, theta_j], [-theta_j, 0]], then zero padding up to dim.
/// Requires dim >= 2 * theta.size().
Matrix rotation_generator(const std::vector<double>& theta, Eigen::Index dim);

/// Orthogonal reduction of a skew-symmetric matrix to rotation blocks.
/// Invariants: g has orthonormal columns, theta is nonnegative and sorted
/// in decreasing order, and r == g * rotation_generator(theta, dim) * g^T
/// up to roundoff.
struct CanonicalForm {
  Matrix g;
  std::vector<double> theta;
  Eigen::Index dim = 0;
};

CanonicalForm skew_canonical_form(const Matrix& r);

}  // namespace ousg
