#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ousg/gaussian.hpp"
#include "ousg/linalg.hpp"
#include "support.hpp"

using namespace ousg;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("parameter validation") {
  const Matrix id = Matrix::Identity(2, 2);

  CHECK_NOTHROW(make_ou_params(id, -id));

  Matrix asym(2, 2);
  asym << 1.0, 0.3, 0.0, 1.0;
  CHECK_THROWS_AS(make_ou_params(asym, -id), std::invalid_argument);

  Matrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(make_ou_params(indefinite, -id), std::invalid_argument);

  CHECK_THROWS_AS(make_ou_params(id, test::rot2(1.0)),
                  std::invalid_argument);  // not Hurwitz
  CHECK_THROWS_AS(make_ou_params(id, Matrix::Identity(3, 3)),
                  std::invalid_argument);  // dimension mismatch

  CHECK_THROWS_AS(ou_params_from_rotation(0.0, test::rot2(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ou_params_from_rotation(1.0, id), std::invalid_argument);
}

TEST_CASE("stationary Lyapunov solution") {
  SUBCASE("symmetric case is I/2") {
    const Matrix id = Matrix::Identity(3, 3);
    CHECK((lyapunov_stationary(id, -id) - 0.5 * id).norm() < 1e-12);
  }

  SUBCASE("rotation family has covariance alpha I") {
    const double alpha = 0.7;
    const Matrix r = rotation_generator({1.0, 2.0}, 4);
    const OUParams p = ou_params_from_rotation(alpha, r);
    CHECK((lyapunov_stationary(p.q, p.b) -
           alpha * Matrix::Identity(4, 4)).norm() < 1e-10);
  }

  SUBCASE("residual vanishes for random parameters") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 10; ++rep) {
      const OUParams p = test::random_params(3, rng);
      const Matrix s = lyapunov_stationary(p.q, p.b);
      CHECK((p.b * s + s * p.b.transpose() + p.q).norm() <
            1e-8 * p.q.norm());
      CHECK(is_symmetric(s));
    }
  }

  SUBCASE("non-Hurwitz drift is rejected") {
    CHECK_THROWS_AS(
        lyapunov_stationary(Matrix::Identity(2, 2), test::rot2(1.0)),
        numeric_error);
  }
}

TEST_CASE("covariance flow") {
  SUBCASE("scalar golden values") {
    const OUParams p =
        make_ou_params(Matrix::Identity(1, 1), -Matrix::Identity(1, 1));
    for (double t : {1e-4, 0.01, 0.5, 3.0}) {
      const double want = 0.5 * (1.0 - std::exp(-2.0 * t));
      CHECK(test::rel_err(covariance_at(p, t)(0, 0), want) < 1e-9);
    }
    CHECK(covariance_at(p, kInf)(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("rotation family is isotropic in time") {
    const double alpha = 0.8;
    const OUParams p = ou_params_from_rotation(alpha, test::rot2(1.3));
    for (double t : {1e-3, 0.2, 1.0, 7.0}) {
      const Matrix qt = covariance_at(p, t);
      const double want = alpha * (1.0 - std::exp(-t / alpha));
      CHECK(test::rel_err(qt(0, 0), want) < 1e-9);
      CHECK(test::rel_err(qt(1, 1), want) < 1e-9);
      CHECK(std::abs(qt(0, 1)) < 1e-12);
    }
  }

  SUBCASE("short-horizon integrator matches the closed form") {
    // Below the integrator switch the closed form
    // Q_t = Q_inf - e^{tB} Q_inf e^{tB^T} is an independent oracle.
    std::mt19937_64 rng(32);
    const OUParams p = test::random_params(3, rng);
    const Matrix qinf = lyapunov_stationary(p.q, p.b);
    const double t_switch = 0.1 / (1.0 + p.b.norm());
    for (double t : {0.9 * t_switch, 0.1 * t_switch, 0.01 * t_switch}) {
      const Matrix etb = expm(t * p.b);
      const Matrix want = qinf - etb * qinf * etb.transpose();
      CHECK((covariance_at(p, t) - want).norm() < 1e-9 * qinf.norm());
    }
  }

  SUBCASE("monotone in the positive-definite order") {
    std::mt19937_64 rng(33);
    const OUParams p = test::random_params(2, rng);
    double prev_t = 0.05;
    Matrix prev = covariance_at(p, prev_t);
    for (double t : {0.1, 0.4, 1.0, 3.0, 12.0}) {
      const Matrix cur = covariance_at(p, t);
      const Vector eig = (cur - prev)
                             .selfadjointView<Eigen::Lower>()
                             .eigenvalues();
      CHECK(eig.minCoeff() > -1e-12);
      prev = cur;
    }
    const Vector gap = (covariance_at(p, kInf) - prev)
                           .selfadjointView<Eigen::Lower>()
                           .eigenvalues();
    CHECK(gap.minCoeff() > -1e-12);
  }

  SUBCASE("rejects nonpositive times") {
    const OUParams p =
        make_ou_params(Matrix::Identity(1, 1), -Matrix::Identity(1, 1));
    CHECK_THROWS_AS(covariance_at(p, 0.0), std::domain_error);
    CHECK_THROWS_AS(covariance_at(p, -1.0), std::domain_error);
  }
}

TEST_CASE("Gaussian measure densities") {
  SUBCASE("scalar golden value: N(0, 1/2) at the origin") {
    GaussianMeasure m{0.5 * Matrix::Identity(1, 1)};
    CHECK(m.density(Vector::Zero(1)) ==
          doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
    Vector x(1);
    x << 0.7;
    CHECK(m.quadratic_form(x) == doctest::Approx(2.0 * 0.49).epsilon(1e-13));
    CHECK(std::exp(m.log_density(x)) ==
          doctest::Approx(m.density(x)).epsilon(1e-13));
  }

  SUBCASE("matches the explicit formula in 2D") {
    std::mt19937_64 rng(41);
    const Matrix sigma = test::random_spd(2, rng);
    GaussianMeasure m{sigma};
    const Vector x = test::random_vector(2, rng);
    const double quad = x.dot(sigma.inverse() * x);
    const double want = std::exp(-0.5 * quad) /
                        (2.0 * std::numbers::pi * std::sqrt(sigma.determinant()));
    CHECK(test::rel_err(m.density(x), want) < 1e-12);
    CHECK(test::rel_err(m.log_det(), std::log(sigma.determinant())) < 1e-12);
  }

  SUBCASE("rejects indefinite covariance") {
    Matrix bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(GaussianMeasure{bad}, numeric_error);
  }

  SUBCASE("measure_at and invariant_measure wire to the flow") {
    std::mt19937_64 rng(42);
    const OUParams p = test::random_params(2, rng);
    CHECK((measure_at(p, 0.7).covariance() - covariance_at(p, 0.7)).norm() <
          1e-14);
    CHECK((invariant_measure(p).covariance() -
           lyapunov_stationary(p.q, p.b)).norm() < 1e-14);
  }
}

TEST_CASE("Gauss-Hermite quadrature") {
  SUBCASE("scalar moments are exact") {
    const double var = 0.7;
    GaussianMeasure m{var * Matrix::Identity(1, 1)};
    const QuadratureRule rule = gauss_quadrature(m, 12);
    double w = 0.0;
    for (double wi : rule.weights) {
      CHECK(wi > 0.0);
      w += wi;
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-13));
    const double m2 = integrate(rule, [](const Vector& x) {
      return x(0) * x(0);
    });
    const double m4 = integrate(rule, [](const Vector& x) {
      return x(0) * x(0) * x(0) * x(0);
    });
    const double m10 = integrate(rule, [](const Vector& x) {
      return std::pow(x(0), 10);
    });
    CHECK(test::rel_err(m2, var) < 1e-12);
    CHECK(test::rel_err(m4, 3.0 * var * var) < 1e-12);
    CHECK(test::rel_err(m10, 945.0 * std::pow(var, 5)) < 1e-11);
  }

  SUBCASE("correlated second moments in 2D") {
    Matrix sigma(2, 2);
    sigma << 1.0, 0.3, 0.3, 0.5;
    const QuadratureRule rule = gauss_quadrature(GaussianMeasure{sigma}, 10);
    const double cross = integrate(rule, [](const Vector& x) {
      return x(0) * x(1);
    });
    CHECK(test::rel_err(cross, 0.3) < 1e-12);
  }

  SUBCASE("Gaussian integrand against the closed form") {
    std::mt19937_64 rng(51);
    const Matrix sigma = test::random_spd(2, rng);
    const Vector c = test::random_vector(2, rng, 0.5);
    const double width2 = 0.6 * 0.6;
    const QuadratureRule rule = gauss_quadrature(GaussianMeasure{sigma}, 48);
    const double got = integrate(rule, [&](const Vector& y) {
      return std::exp(-(y - c).squaredNorm() / (2.0 * width2));
    });
    const Matrix total = sigma + width2 * Matrix::Identity(2, 2);
    const double want =
        width2 / std::sqrt(total.determinant()) *
        std::exp(-0.5 * c.dot(total.inverse() * c));
    CHECK(test::rel_err(got, want) < 1e-10);
  }

  SUBCASE("dimension cap") {
    GaussianMeasure m{Matrix::Identity(4, 4)};
    CHECK_THROWS_AS(gauss_quadrature(m, 8), capability_error);
  }
}

TEST_CASE("sampling") {
  Matrix sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.5;
  GaussianMeasure m{sigma};
  const Eigen::Index n = 100000;

  SUBCASE("first two empirical moments") {
    const Matrix draws = sample(m, n, 7);
    REQUIRE(draws.rows() == n);
    REQUIRE(draws.cols() == 2);
    const Vector mean = draws.colwise().mean();
    CHECK(mean.norm() < 4.0 * std::sqrt(sigma.trace() / n));
    const Matrix centered = draws.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / double(n - 1);
    CHECK((cov - sigma).norm() < 0.05 * sigma.norm());
  }

  SUBCASE("deterministic in the seed") {
    const Matrix a = sample(m, 257, 99);
    const Matrix b = sample(m, 257, 99);
    const Matrix c = sample(m, 257, 100);
    CHECK((a - b).norm() == 0.0);
    CHECK((a - c).norm() > 0.0);
  }

  SUBCASE("worker count does not change the draws") {
    test::ThreadGuard guard;
    set_thread_override(1);
    const Matrix a = sample(m, 9000, 5);
    set_thread_override(3);
    const Matrix b = sample(m, 9000, 5);
    CHECK((a - b).norm() == 0.0);
  }
}

TEST_CASE("Gaussian stream substreams") {
  GaussianStream root(1234);

  SUBCASE("split streams are reproducible and distinct") {
    GaussianStream a = root.split(3);
    GaussianStream b = root.split(3);
    GaussianStream c = root.split(4);
    const double av = a.next();
    CHECK(av == b.next());
    CHECK(av != c.next());
  }

  SUBCASE("vector draws have the right length and sane moments") {
    GaussianStream s(55);
    const int n = 50000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = s.next();
      sum += v;
      sq += v * v;
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(double(n)));
    CHECK(std::abs(sq / n - 1.0) < 0.05);
    CHECK(s.next_vector(3).size() == 3);
  }
}
