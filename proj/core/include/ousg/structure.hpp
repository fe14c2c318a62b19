#pragma once

#include "ousg/gaussian.hpp"
#include "ousg/types.hpp"

#include <vector>

namespace ousg {

/// Change of variables that normalizes the diffusion: M Q M^T = I and
/// M Q_inf M^T = diag(d_lambda). In these coordinates the drift becomes
/// b_tilde = M B M^{-1} and r = b_tilde + diag(1/(2 d_lambda)) satisfies
/// r D + D r^T = 0 with D = diag(d_lambda) (a consequence of the
/// stationary Lyapunov equation).
struct StandardForm {
  Matrix m;
  Vector d_lambda;
  Matrix b_tilde;
  Matrix r;
};

StandardForm reduce_to_standard(const OUParams& p);

/// Sup over the unit cube of the polynomial obtained by applying the
/// commutator of the rotation part against the symmetric part to each
/// monomial x_j x_k. Zero (to roundoff) iff the two parts commute as
/// operators on quadratics.
double commutator_defect(const Vector& d_lambda, const Matrix& r);

/// Normality test in standard coordinates. The three defects vanish
/// together: r skew-symmetric, r commuting with D, and the generator
/// commutator vanishing on quadratics.
struct NormalityReport {
  StandardForm form;
  double sym_defect = 0.0;      // |r + r^T|_F
  double commute_defect = 0.0;  // |r D - D r|_F
  double generator_defect = 0.0;
  double tolerance = 0.0;
  bool normal = false;
};

NormalityReport is_normal(const OUParams& p);

/// Decomposition of a normal standard form into scaled rotation blocks:
/// the distinct entries alpha_j of d_lambda, the coordinate sets of the
/// eigenspaces, and the restricted generators r_j = 2 alpha_j r|_j. The
/// drift reassembles as b_tilde = sum_j (r_j - id_j) / (2 alpha_j).
struct BuildingBlocks {
  std::vector<double> alpha;
  std::vector<std::vector<Eigen::Index>> coords;
  std::vector<Matrix> r_block;
};

BuildingBlocks building_blocks(const StandardForm& form);

}  // namespace ousg
