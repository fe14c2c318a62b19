#include "ousg/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ousg {

namespace {

double one_norm(const Matrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");

  const Eigen::Index d = a.rows();
  const Matrix id = Matrix::Identity(d, d);

  // Degree-13 Pade with enough squarings to bring the norm under the
  // approximant's accuracy radius.
  constexpr double theta13 = 5.371920351148152;
  static const double b[14] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  const double nrm = one_norm(a);
  int squarings = 0;
  Matrix as = a;
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    as = a * std::ldexp(1.0, -squarings);
  }

  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

double spectral_abscissa(const Matrix& b) {
  require_square(b, "spectral_abscissa");
  require_finite(b, "spectral_abscissa");
  Eigen::EigenSolver<Matrix> solver(b, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw numeric_error("spectral_abscissa: eigensolver did not converge");
  return solver.eigenvalues().real().maxCoeff();
}

bool hurwitz_check(const Matrix& b) { return spectral_abscissa(b) < 0.0; }

Matrix rotation_generator(const std::vector<double>& theta,
                          Eigen::Index dim) {
  require(dim >= 2 * static_cast<Eigen::Index>(theta.size()),
          "rotation_generator: dim must fit " +
              std::to_string(theta.size()) + " rotation planes");
  Matrix r = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const Eigen::Index k = 2 * static_cast<Eigen::Index>(j);
    r(k, k + 1) = theta[j];
    r(k + 1, k) = -theta[j];
  }
  return r;
}

CanonicalForm skew_canonical_form(const Matrix& r) {
  require_square(r, "skew_canonical_form");
  require_finite(r, "skew_canonical_form");
  require(is_skew_symmetric(r),
          "skew_canonical_form: input must be skew-symmetric");

  const Eigen::Index d = r.rows();
  const double scale = std::max(1.0, r.norm());

  // -r^2 is symmetric PSD; its eigenvalues come in pairs theta_j^2 with the
  // rotation plane as eigenspace. Work through eigenvectors in decreasing
  // eigenvalue order and complete each plane with -r v / theta.
  Matrix s = -(r * r);
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success)
    throw numeric_error("skew_canonical_form: eigensolver did not converge");

  std::vector<Vector> columns;
  columns.reserve(d);
  auto deflate = [&columns](Vector v) {
    for (const Vector& c : columns) v -= c.dot(v) * c;
    return v;
  };

  const double zero_tol = 1e-9 * scale;
  std::vector<double> theta;
  std::vector<Vector> kernel;
  for (Eigen::Index k = d - 1; k >= 0; --k) {
    Vector v = deflate(solver.eigenvectors().col(k));
    const double nv = v.norm();
    if (nv < 0.5) continue;  // already captured as a plane partner
    v /= nv;
    Vector w = r * v;
    const double th = w.norm();
    if (th <= zero_tol) {
      kernel.push_back(v);
      continue;
    }
    Vector b2 = deflate(-w / th);
    b2 -= b2.dot(v) * v;
    const double nb = b2.norm();
    if (nb < 0.5)
      throw numeric_error("skew_canonical_form: failed to complete a plane");
    b2 /= nb;
    columns.push_back(v);
    columns.push_back(b2);
    theta.push_back(th);
  }
  for (const Vector& v : kernel) columns.push_back(v);
  // Kernel vectors fill trailing zero planes (theta = 0) plus, when dim is
  // odd, the final unpaired axis.
  for (std::size_t z = theta.size(); 2 * z + 1 < static_cast<std::size_t>(d);
       ++z)
    theta.push_back(0.0);

  CanonicalForm out;
  out.dim = d;
  out.theta = std::move(theta);
  out.g = Matrix(d, d);
  require(columns.size() == static_cast<std::size_t>(d),
          "skew_canonical_form: internal basis is incomplete");
  for (Eigen::Index j = 0; j < d; ++j) out.g.col(j) = columns[j];

  const double ortho = (out.g.transpose() * out.g - Matrix::Identity(d, d)).norm();
  const double recon =
      (out.g * rotation_generator(out.theta, d) * out.g.transpose() - r)
          .norm();
  if (ortho > 1e-10 * d || recon > 1e-10 * scale)
    throw numeric_error(
        "skew_canonical_form: reconstruction check failed (ortho " +
        std::to_string(ortho) + ", recon " + std::to_string(recon) + ")");
  return out;
}

}  // namespace ousg
