#pragma once

// Shared fixtures for the test suites: deterministic random matrices of the
// shapes the library consumes (SPD, skew, Hurwitz) and small comparison
// helpers. Every generator takes the engine by reference so suites can fix
// seeds per test case.

#include <algorithm>
#include <cmath>
#include <random>

#include "ousg/gaussian.hpp"
#include "ousg/types.hpp"

namespace test {

using ousg::Matrix;
using ousg::Vector;

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

inline Matrix random_matrix(Eigen::Index d, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> n;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = scale * n(rng);
  return a;
}

inline Vector random_vector(Eigen::Index d, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = scale * n(rng);
  return v;
}

/// Well conditioned SPD matrix: A A^T scaled plus a ridge.
inline Matrix random_spd(Eigen::Index d, std::mt19937_64& rng) {
  const Matrix a = random_matrix(d, rng);
  return a * a.transpose() / static_cast<double>(d) +
         0.4 * Matrix::Identity(d, d);
}

inline Matrix random_skew(Eigen::Index d, std::mt19937_64& rng,
                          double scale = 1.0) {
  const Matrix a = random_matrix(d, rng, scale);
  return 0.5 * (a - a.transpose());
}

/// Hurwitz by construction: skew minus an SPD part keeps the numerical
/// abscissa strictly negative.
inline Matrix random_hurwitz(Eigen::Index d, std::mt19937_64& rng) {
  return random_skew(d, rng) - random_spd(d, rng);
}

inline ousg::OUParams random_params(Eigen::Index d, std::mt19937_64& rng) {
  return ousg::make_ou_params(random_spd(d, rng), random_hurwitz(d, rng));
}

/// 2x2 rotation generator [[0, theta], [-theta, 0]].
inline Matrix rot2(double theta) {
  Matrix r(2, 2);
  r << 0.0, theta, -theta, 0.0;
  return r;
}

/// Restores the worker override on scope exit; keeps thread-count tests
/// from leaking into later cases.
struct ThreadGuard {
  ~ThreadGuard();
};

}  // namespace test

#include "ousg/parallel.hpp"

namespace test {
inline ThreadGuard::~ThreadGuard() { ousg::set_thread_override(0); }
}  // namespace test
