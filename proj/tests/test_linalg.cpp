#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ousg/linalg.hpp"
#include "support.hpp"

using namespace ousg;

TEST_CASE("expm reproduces closed-form exponentials") {
  SUBCASE("zero matrix") {
    CHECK((expm(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).norm() ==
          doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("diagonal") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.3;
    a(1, 1) = 0.4;
    const Matrix e = expm(a);
    CHECK(e(0, 0) == doctest::Approx(std::exp(-1.3)).epsilon(1e-14));
    CHECK(e(1, 1) == doctest::Approx(std::exp(0.4)).epsilon(1e-14));
    CHECK(std::abs(e(0, 1)) < 1e-15);
  }

  SUBCASE("quarter turn of a rotation generator") {
    const Matrix r = rotation_generator({1.0}, 2);
    const Matrix e = expm((std::numbers::pi / 2.0) * r);
    Matrix want(2, 2);
    want << 0.0, 1.0, -1.0, 0.0;
    CHECK((e - want).norm() < 1e-13);
  }

  SUBCASE("one-parameter group property") {
    std::mt19937_64 rng(11);
    const Matrix a = test::random_matrix(4, rng);
    CHECK((expm(2.0 * a) - expm(a) * expm(a)).norm() <
          1e-11 * expm(2.0 * a).norm());
  }

  SUBCASE("first order for tiny arguments") {
    std::mt19937_64 rng(12);
    const Matrix a = test::random_matrix(3, rng);
    const Matrix e = expm(1e-8 * a);
    CHECK((e - Matrix::Identity(3, 3) - 1e-8 * a).norm() < 1e-14);
  }

  SUBCASE("rejects non-square input") {
    CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), std::invalid_argument);
  }
}

TEST_CASE("spectral abscissa and the Hurwitz test") {
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix r1 = test::rot2(1.0);

  CHECK(spectral_abscissa(-id) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(spectral_abscissa(r1)) < 1e-12);
  CHECK(spectral_abscissa(-id + r1) == doctest::Approx(-1.0).epsilon(1e-12));

  Matrix jordan(2, 2);
  jordan << -1.0, 1.0, 0.0, -1.0;
  CHECK(spectral_abscissa(jordan) == doctest::Approx(-1.0).epsilon(1e-10));

  CHECK(hurwitz_check(-id));
  CHECK_FALSE(hurwitz_check(r1));
  CHECK(hurwitz_check(-id + r1));

  Matrix semi(2, 2);
  semi << 0.0, 0.0, 0.0, -1.0;
  CHECK_FALSE(hurwitz_check(semi));
}

TEST_CASE("rotation generator layout") {
  const Matrix r = rotation_generator({1.0, 2.0}, 4);
  Matrix want = Matrix::Zero(4, 4);
  want(0, 1) = 1.0;
  want(1, 0) = -1.0;
  want(2, 3) = 2.0;
  want(3, 2) = -2.0;
  CHECK((r - want).norm() == doctest::Approx(0.0));

  const Matrix padded = rotation_generator({1.5}, 3);
  CHECK(padded.rows() == 3);
  CHECK(padded.col(2).norm() == 0.0);
  CHECK(padded.row(2).norm() == 0.0);
  CHECK((padded + padded.transpose()).norm() == 0.0);

  CHECK_THROWS_AS(rotation_generator({1.0, 2.0}, 3), std::invalid_argument);
}

TEST_CASE("skew canonical form") {
  SUBCASE("cross-product matrix has one plane and one zero direction") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = -2.0;
    a(1, 0) = 2.0;
    const CanonicalForm form = skew_canonical_form(a);
    REQUIRE(!form.theta.empty());
    CHECK(form.theta.front() == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t j = 1; j < form.theta.size(); ++j)
      CHECK(std::abs(form.theta[j]) < 1e-12);
    CHECK(form.dim == 3);
    CHECK((form.g.transpose() * form.g - Matrix::Identity(3, 3)).norm() <
          1e-10);
    const Matrix rebuilt =
        form.g * rotation_generator(form.theta, form.dim) * form.g.transpose();
    CHECK((rebuilt - a).norm() < 1e-8);
  }

  SUBCASE("plane case recovers the speed") {
    const CanonicalForm form = skew_canonical_form(test::rot2(1.7));
    REQUIRE(form.theta.size() == 1);
    CHECK(form.theta[0] == doctest::Approx(1.7).epsilon(1e-12));
  }

  SUBCASE("random skew matrices reduce and rebuild") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(rep % 5);
      const Matrix r = test::random_skew(d, rng);
      const CanonicalForm form = skew_canonical_form(r);
      CHECK((form.g.transpose() * form.g - Matrix::Identity(d, d)).norm() <
            1e-10);
      const Matrix rebuilt = form.g * rotation_generator(form.theta, d) *
                             form.g.transpose();
      CHECK((rebuilt - r).norm() < 1e-8 * std::max(1.0, r.norm()));
      for (std::size_t j = 0; j < form.theta.size(); ++j) {
        CHECK(form.theta[j] >= -1e-15);
        if (j > 0) CHECK(form.theta[j] <= form.theta[j - 1] + 1e-12);
      }
    }
  }

  SUBCASE("rejects non-skew input") {
    CHECK_THROWS_AS(skew_canonical_form(Matrix::Identity(2, 2)),
                    std::invalid_argument);
  }
}
