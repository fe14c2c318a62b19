#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ousg/gaussian.hpp"

namespace ousg {

/// n independent draws from the time-t transition law started at x, one per
/// row. Exact sampling: e^{tB} x - y with y drawn from the centered Gaussian
/// with covariance Q_t, matching the Mehler integral representation.
/// t = 0 returns n copies of x. Deterministic in (seed, n) and independent
/// of the thread count.
Matrix transition_sample(const OUParams& p, double t, const Vector& x, int n,
                         std::uint64_t seed);

struct EmpiricalResult {
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

/// Monte Carlo estimate of H_t f(x) with a standard-error estimate.
EmpiricalResult empirical_semigroup(const OUParams& p, double t,
                                    const std::function<double(const Vector&)>& f,
                                    const Vector& x, int n,
                                    std::uint64_t seed);

struct PathSample {
  std::vector<double> times;
  Matrix states;  // one row per time
};

/// Markov path sampled exactly at the given times (nonnegative, strictly
/// increasing): each step draws from the transition law over the increment,
/// so the marginals are exact for every step size.
PathSample sample_path(const OUParams& p, const Vector& x0,
                       const std::vector<double>& times, std::uint64_t seed);

struct ErgodicReport {
  double t = 0.0;
  int n = 0;
  double mean_norm = 0.0;      // |empirical mean|
  double mean_envelope = 0.0;  // |e^{tB} x0| + 3 sqrt(tr Q_t / n)
  double cov_defect = 0.0;     // ||empirical cov - Q_inf||_F
  double cov_envelope = 0.0;   // ||Q_t - Q_inf||_F + 3 * sampling term
  bool pass = false;
};

/// Consistency check of the sampler against the semigroup: the time-t
/// sample cloud started at x0 must match the first two moments of the
/// transition law within three standard errors, and for large t the
/// covariance must sit near the invariant one.
ErgodicReport ergodic_check(const OUParams& p, const Vector& x0, double t,
                            int n, std::uint64_t seed);

}  // namespace ousg
