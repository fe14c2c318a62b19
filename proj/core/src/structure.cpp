#include "ousg/structure.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ousg {

StandardForm reduce_to_standard(const OUParams& p) {
  const Eigen::Index d = p.dim();

  // M1 = L^{-1} with Q = L L^T whitens the diffusion; M2 then
  // diagonalizes the whitened stationary covariance without disturbing it.
  Eigen::LLT<Matrix> llt(p.q);
  if (llt.info() != Eigen::Success)
    throw numeric_error("reduce_to_standard: Q is not positive definite");
  const Matrix m1 = Matrix(llt.matrixL())
                        .triangularView<Eigen::Lower>()
                        .solve(Matrix::Identity(d, d));

  const Matrix qinf = lyapunov_stationary(p.q, p.b);
  Matrix a = m1 * qinf * m1.transpose();
  a = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw numeric_error("reduce_to_standard: eigensolver did not converge");
  if (solver.eigenvalues().minCoeff() <= 0.0)
    throw numeric_error(
        "reduce_to_standard: stationary covariance lost definiteness");

  StandardForm out;
  out.d_lambda = solver.eigenvalues();
  const Matrix m2 = solver.eigenvectors().transpose();
  out.m = m2 * m1;
  out.b_tilde = out.m * p.b * out.m.partialPivLu().inverse();
  out.r = out.b_tilde +
          0.5 * Matrix(out.d_lambda.cwiseInverse().asDiagonal());

  const double scale = std::max(1.0, out.b_tilde.norm());
  const Matrix dm = out.d_lambda.asDiagonal();
  const double lyap_defect =
      (out.r * dm + dm * out.r.transpose()).norm();
  if ((out.m * p.q * out.m.transpose() - Matrix::Identity(d, d)).norm() >
          1e-9 * d ||
      lyap_defect > 1e-8 * scale * std::max(1.0, out.d_lambda.maxCoeff()))
    throw numeric_error("reduce_to_standard: residual check failed");
  return out;
}

double commutator_defect(const Vector& d_lambda, const Matrix& r) {
  const Eigen::Index d = d_lambda.size();
  require(r.rows() == d && r.cols() == d,
          "commutator_defect: dimension mismatch");
  require(d_lambda.minCoeff() > 0.0,
          "commutator_defect: d_lambda must be positive");

  // Applying [rotation, symmetric] to x_j x_k yields the quadratic
  //   q_{jk}(x) = -(r_{jk} + r_{kj})
  //             + (1/2) sum_a (S_{ja} x_a x_k + S_{ka} x_a x_j),
  // with S = r D^{-1} - D^{-1} r. A quadratic-plus-constant on [-1,1]^d is
  // zero iff it vanishes on the lattice {-1,0,1}^d, and its sup over the
  // cube is attained there, so the lattice max is the exact sup norm.
  const Matrix dinv = d_lambda.cwiseInverse().asDiagonal();
  const Matrix s = r * dinv - dinv * r;

  std::size_t points = 1;
  for (Eigen::Index i = 0; i < d; ++i) points *= 3;

  double defect = 0.0;
  Vector x(d);
  for (std::size_t c = 0; c < points; ++c) {
    std::size_t rem = c;
    for (Eigen::Index i = 0; i < d; ++i) {
      x(i) = static_cast<double>(static_cast<int>(rem % 3) - 1);
      rem /= 3;
    }
    const Vector sx = s * x;
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = j; k < d; ++k) {
        const double q =
            -(r(j, k) + r(k, j)) + 0.5 * (sx(j) * x(k) + sx(k) * x(j));
        defect = std::max(defect, std::abs(q));
      }
  }
  return defect;
}

NormalityReport is_normal(const OUParams& p) {
  NormalityReport rep;
  rep.form = reduce_to_standard(p);
  const Matrix dm = rep.form.d_lambda.asDiagonal();
  rep.sym_defect = (rep.form.r + rep.form.r.transpose()).norm();
  rep.commute_defect = (rep.form.r * dm - dm * rep.form.r).norm();
  rep.generator_defect = commutator_defect(rep.form.d_lambda, rep.form.r);
  rep.tolerance = 1e-8 * std::max(1.0, rep.form.b_tilde.norm());
  rep.normal = rep.sym_defect <= rep.tolerance &&
               rep.commute_defect <=
                   rep.tolerance * std::max(1.0, rep.form.d_lambda.maxCoeff());
  return rep;
}

BuildingBlocks building_blocks(const StandardForm& form) {
  const Eigen::Index d = form.d_lambda.size();
  const double scale = std::max(1.0, form.b_tilde.norm());
  require((form.r + form.r.transpose()).norm() <= 1e-8 * scale,
          "building_blocks: standard form is not normal (r not skew)");

  // Cluster d_lambda; entries are ascending by construction.
  const double cluster_tol = 1e-8 * std::max(1.0, form.d_lambda.maxCoeff());
  BuildingBlocks out;
  Eigen::Index i = 0;
  while (i < d) {
    Eigen::Index j = i;
    while (j + 1 < d &&
           form.d_lambda(j + 1) - form.d_lambda(i) <= cluster_tol)
      ++j;
    std::vector<Eigen::Index> coords;
    double mean = 0.0;
    for (Eigen::Index k = i; k <= j; ++k) {
      coords.push_back(k);
      mean += form.d_lambda(k);
    }
    mean /= static_cast<double>(coords.size());
    out.alpha.push_back(mean);
    out.coords.push_back(std::move(coords));
    i = j + 1;
  }

  // A normal r commutes with D, hence is block diagonal over the
  // eigenspaces; check the off-block mass before restricting.
  for (std::size_t g = 0; g < out.coords.size(); ++g) {
    const auto& cs = out.coords[g];
    const Eigen::Index n = static_cast<Eigen::Index>(cs.size());
    Matrix block(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        block(a, b) = form.r(cs[a], cs[b]);
    double off = 0.0;
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index c = 0; c < d; ++c) {
        bool inside = false;
        for (Eigen::Index b = 0; b < n; ++b) inside |= (cs[b] == c);
        if (!inside) off = std::max(off, std::abs(form.r(cs[a], c)));
      }
    if (off > 1e-8 * scale)
      throw numeric_error(
          "building_blocks: r does not respect the eigenspaces of D");
    out.r_block.push_back(2.0 * out.alpha[g] * block);
  }

  // Reassembly check: sum_j (r_j - id_j)/(2 alpha_j) == b_tilde.
  Matrix recon = Matrix::Zero(d, d);
  for (std::size_t g = 0; g < out.coords.size(); ++g) {
    const auto& cs = out.coords[g];
    const Eigen::Index n = static_cast<Eigen::Index>(cs.size());
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b)
        recon(cs[a], cs[b]) += out.r_block[g](a, b) / (2.0 * out.alpha[g]);
      recon(cs[a], cs[a]) -= 1.0 / (2.0 * out.alpha[g]);
    }
  }
  if ((recon - form.b_tilde).norm() > 1e-7 * scale)
    throw numeric_error("building_blocks: drift reassembly check failed");
  return out;
}

}  // namespace ousg
