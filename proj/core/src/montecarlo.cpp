#include "ousg/montecarlo.hpp"

#include "ousg/linalg.hpp"

#include <cmath>
#include <map>

namespace ousg {

Matrix transition_sample(const OUParams& p, double t, const Vector& x, int n,
                         std::uint64_t seed) {
  require_dim(x, p.dim(), "transition_sample: x");
  require(n >= 1, "transition_sample: n must be >= 1");
  require_domain(std::isfinite(t) && t >= 0.0,
                 "transition_sample: t must be finite and nonnegative");
  if (t == 0.0) return x.transpose().replicate(n, 1);
  const Vector drift = expm(t * p.b) * x;
  Matrix draws = sample(measure_at(p, t), n, seed);
  draws = drift.transpose().replicate(n, 1) - draws;
  return draws;
}

EmpiricalResult empirical_semigroup(const OUParams& p, double t,
                                    const std::function<double(const Vector&)>& f,
                                    const Vector& x, int n,
                                    std::uint64_t seed) {
  require(static_cast<bool>(f), "empirical_semigroup: f must be callable");
  const Matrix pts = transition_sample(p, t, x, n, seed);
  double mean = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    mean += f(pts.row(i).transpose());
  mean /= n;
  double var = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double dv = f(pts.row(i).transpose()) - mean;
    var += dv * dv;
  }
  var /= std::max(1, n - 1);
  EmpiricalResult out;
  out.mean = mean;
  out.std_error = std::sqrt(var / n);
  out.n = n;
  return out;
}

PathSample sample_path(const OUParams& p, const Vector& x0,
                       const std::vector<double>& times, std::uint64_t seed) {
  require_dim(x0, p.dim(), "sample_path: x0");
  require(!times.empty(), "sample_path: times must be nonempty");
  double prev = 0.0;
  for (double t : times) {
    require_domain(std::isfinite(t) && t >= prev &&
                       (t > prev || t == 0.0),
                   "sample_path: times must be nonnegative and strictly "
                   "increasing");
    prev = t;
  }

  const Eigen::Index d = p.dim();
  GaussianStream stream(seed);
  PathSample out;
  out.times = times;
  out.states.resize(static_cast<Eigen::Index>(times.size()), d);

  // Step data is cached by increment size; uniform grids factor once.
  struct Step {
    Matrix e_tb;
    Matrix chol;
  };
  std::map<double, Step> cache;
  auto step_for = [&](double dt) -> const Step& {
    auto it = cache.find(dt);
    if (it == cache.end()) {
      Step st;
      st.e_tb = expm(dt * p.b);
      st.chol = Matrix(GaussianMeasure(covariance_at(p, dt)).llt().matrixL());
      it = cache.emplace(dt, std::move(st)).first;
    }
    return it->second;
  };

  Vector state = x0;
  double t_prev = 0.0;
  Vector z(d);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dt = times[i] - t_prev;
    if (dt > 0.0) {
      const Step& st = step_for(dt);
      for (Eigen::Index j = 0; j < d; ++j) z(j) = stream.next();
      state = st.e_tb * state - st.chol * z;
    }
    out.states.row(static_cast<Eigen::Index>(i)) = state.transpose();
    t_prev = times[i];
  }
  return out;
}

ErgodicReport ergodic_check(const OUParams& p, const Vector& x0, double t,
                            int n, std::uint64_t seed) {
  require(n >= 2, "ergodic_check: n must be >= 2");
  require_domain(std::isfinite(t) && t > 0.0,
                 "ergodic_check: t must be finite and positive");
  const Eigen::Index d = p.dim();
  const Matrix cloud = transition_sample(p, t, x0, n, seed);

  const Vector mean = cloud.colwise().mean().transpose();
  const Matrix centered = cloud.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / (n - 1.0);

  const Matrix qt = covariance_at(p, t);
  const Matrix qinf = lyapunov_stationary(p.q, p.b);
  const Vector drift = expm(t * p.b) * x0;

  ErgodicReport rep;
  rep.t = t;
  rep.n = n;
  rep.mean_norm = mean.norm();
  rep.mean_envelope = drift.norm() + 3.0 * std::sqrt(qt.trace() / n);

  rep.cov_defect = (cov - qinf).norm();
  // Entrywise sampling fluctuation of a Gaussian covariance estimate:
  // var(cov_jk) = (q_jj q_kk + q_jk^2)/n, summed in Frobenius square.
  double fluct2 = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      fluct2 += (qt(j, j) * qt(k, k) + qt(j, k) * qt(j, k)) / n;
  rep.cov_envelope = (qt - qinf).norm() + 3.0 * std::sqrt(fluct2);

  rep.pass = rep.mean_norm <= rep.mean_envelope &&
             rep.cov_defect <= rep.cov_envelope;
  return rep;
}

}  // namespace ousg
