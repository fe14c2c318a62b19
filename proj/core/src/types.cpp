#include "ousg/types.hpp"

namespace ousg {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

void require_domain(bool cond, const std::string& what) {
  if (!cond) throw std::domain_error(what);
}

void require_square(const Matrix& m, const std::string& name) {
  require(m.rows() == m.cols() && m.rows() > 0,
          name + ": expected a nonempty square matrix, got " +
              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void require_finite(const Matrix& m, const std::string& name) {
  require(m.allFinite(), name + ": matrix has non-finite entries");
}

void require_finite(const Vector& v, const std::string& name) {
  require(v.allFinite(), name + ": vector has non-finite entries");
}

void require_dim(const Vector& v, Eigen::Index dim, const std::string& name) {
  require(v.size() == dim, name + ": expected dimension " +
                               std::to_string(dim) + ", got " +
                               std::to_string(v.size()));
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.transpose()).norm() <= tol * scale;
}

bool is_skew_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m + m.transpose()).norm() <= tol * scale;
}

}  // namespace ousg
