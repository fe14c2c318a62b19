#include "ousg/maximal.hpp"

#include "ousg/linalg.hpp"
#include "ousg/parallel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ousg {

namespace {

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace

WeakTypeReport weak_type_ratio(const OUParams& p,
                               const std::vector<GaussianBump>& family,
                               const TimeSet& times, int alpha_count,
                               int quad_order) {
  const Eigen::Index d = p.dim();
  if (d > 3)
    throw capability_error(
        "weak_type_ratio: spatial grid supports dimension <= 3");
  require(!family.empty(), "weak_type_ratio: family must be nonempty");
  require(alpha_count >= 2 && quad_order >= 4,
          "weak_type_ratio: alpha_count >= 2 and quad_order >= 4 required");
  for (const GaussianBump& f : family) {
    require_dim(f.center, d, "weak_type_ratio: bump center");
    require(f.sigma > 0.0 && f.amplitude > 0.0,
            "weak_type_ratio: bump sigma and amplitude must be positive");
  }
  const std::vector<double> tvals = times.times();
  require(!tvals.empty(), "weak_type_ratio: time set must be nonempty");

  const GaussianMeasure ginf = invariant_measure(p);

  // Midpoint rule on an axis-aligned box wide enough for the invariant
  // tails and every bump center; node weights carry the invariant density.
  Vector half(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double c = 0.0;
    for (const GaussianBump& f : family)
      c = std::max(c, std::abs(f.center(j)));
    half(j) = 6.0 * std::sqrt(ginf.covariance()(j, j)) + c;
  }
  std::size_t node_count = 1;
  for (Eigen::Index j = 0; j < d; ++j)
    node_count *= static_cast<std::size_t>(quad_order);
  std::vector<Vector> nodes(node_count, Vector(d));
  std::vector<double> weights(node_count);
  double cell = 1.0;
  for (Eigen::Index j = 0; j < d; ++j) cell *= 2.0 * half(j) / quad_order;
  {
    std::vector<int> idx(d, 0);
    for (std::size_t i = 0; i < node_count; ++i) {
      Vector x(d);
      for (Eigen::Index j = 0; j < d; ++j)
        x(j) = -half(j) + (idx[j] + 0.5) * (2.0 * half(j) / quad_order);
      nodes[i] = x;
      weights[i] = ginf.density(x) * cell;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (++idx[j] < quad_order) break;
        idx[j] = 0;
      }
    }
  }
  const double captured = std::accumulate(weights.begin(), weights.end(), 0.0);

  // Per (time, bump) precomputation: the smoothed bump is again Gaussian,
  //   H_t f(x) = amp * exp{-1/2 [log det(I + Q_t/s^2)
  //                             + <(Q_t + s^2 I)^{-1} mu, mu>]},
  // with mu = e^{tB} x - center.
  struct Smoothed {
    Matrix e_tb;
    Eigen::LLT<Matrix> llt;
    double log_pref = 0.0;  // log amp - 1/2 log det(I + Q_t/s^2)
  };
  std::vector<std::vector<Smoothed>> pre(tvals.size());
  for (std::size_t ti = 0; ti < tvals.size(); ++ti) {
    const Matrix e_tb = expm(tvals[ti] * p.b);
    const Matrix qt = covariance_at(p, tvals[ti]);
    pre[ti].resize(family.size());
    for (std::size_t fi = 0; fi < family.size(); ++fi) {
      const double s2 = family[fi].sigma * family[fi].sigma;
      Smoothed sm;
      sm.e_tb = e_tb;
      sm.llt.compute(qt + s2 * Matrix::Identity(d, d));
      if (sm.llt.info() != Eigen::Success)
        throw numeric_error("weak_type_ratio: covariance factorization failed");
      double ldr = 0.0;
      const auto& l = sm.llt.matrixLLT();
      for (Eigen::Index j = 0; j < d; ++j)
        ldr += 2.0 * std::log(l(j, j) / family[fi].sigma);
      sm.log_pref = std::log(family[fi].amplitude) - 0.5 * ldr;
      pre[ti][fi] = std::move(sm);
    }
  }

  // Maximal function over the time set at every node, per family member.
  std::vector<std::vector<double>> maxval(
      family.size(), std::vector<double>(node_count, 0.0));
  parallel_for(node_count, [&](std::size_t i) {
    const Vector& x = nodes[i];
    for (std::size_t ti = 0; ti < tvals.size(); ++ti)
      for (std::size_t fi = 0; fi < family.size(); ++fi) {
        const Smoothed& sm = pre[ti][fi];
        const Vector mu = sm.e_tb * x - family[fi].center;
        const double quad =
            sm.llt.matrixL().solve(mu).squaredNorm();
        const double v = std::exp(sm.log_pref - 0.5 * quad);
        if (v > maxval[fi][i]) maxval[fi][i] = v;
      }
  });

  WeakTypeReport rep;
  rep.truncation = 1.0 - captured;
  for (std::size_t fi = 0; fi < family.size(); ++fi) {
    rep.sigma.push_back(family[fi].sigma);
    const double l1 = family[fi].l1_norm(p);

    // Sorted levels with cumulative weight give the distribution function
    // gamma{H* > alpha} in one pass.
    std::vector<std::size_t> order(node_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return maxval[fi][a] > maxval[fi][b];
    });
    std::vector<double> levels(node_count), cumw(node_count);
    double acc = 0.0;
    for (std::size_t r = 0; r < node_count; ++r) {
      levels[r] = maxval[fi][order[r]];
      acc += weights[order[r]];
      cumw[r] = acc;
    }

    // Cap the level range where the superlevel set still holds several
    // grid cells; a single-cell set is below the grid resolution and its
    // measure estimate would be dominated by node placement.
    const std::size_t k = std::min<std::size_t>(8, node_count - 1);
    const double alpha_hi = std::max(levels[k], 1e-300);
    double best = 0.0, best_alpha = alpha_hi;
    for (double alpha : geometric(alpha_hi * 1e-6, alpha_hi, alpha_count)) {
      // first rank with level <= alpha
      const auto it = std::lower_bound(levels.begin(), levels.end(), alpha,
                                       [](double lv, double a) {
                                         return lv > a;
                                       });
      const std::size_t nabove =
          static_cast<std::size_t>(it - levels.begin());
      const double meas = nabove == 0 ? 0.0 : cumw[nabove - 1];
      const double val = alpha * meas / l1;
      if (val > best) {
        best = val;
        best_alpha = alpha;
      }
    }
    rep.ratio.push_back(best);
    rep.worst_alpha.push_back(best_alpha);
  }
  const auto [mn, mx] = std::minmax_element(rep.ratio.begin(),
                                            rep.ratio.end());
  rep.band = *mn > 0.0 ? *mx / *mn
                       : std::numeric_limits<double>::infinity();
  rep.plateau = true;
  double running = 0.0;
  for (double r : rep.ratio) {
    running = std::max(running, r);
    if (r < running / 1.2) rep.plateau = false;
  }
  return rep;
}

ProbeReport l1_unboundedness_probe(const OUParams& p, double t_max,
                                   const std::vector<double>& radii,
                                   int points_per_decade) {
  require(radii.size() >= 2,
          "l1_unboundedness_probe: need at least two radii for a slope");
  for (double r : radii)
    require_domain(r > 0.0 && r <= 1.0,
                   "l1_unboundedness_probe: radii must lie in (0, 1]");
  require(points_per_decade >= 8,
          "l1_unboundedness_probe: points_per_decade must be >= 8");
  const double r_min = *std::min_element(radii.begin(), radii.end());
  const double t_min = std::min(1e-5, 0.05 * r_min * r_min);
  require_domain(std::isfinite(t_max) && t_max > 10.0 * t_min,
                 "l1_unboundedness_probe: t_max too small for the t grid");

  const Eigen::Index d = p.dim();
  const int n_t = static_cast<int>(std::ceil(
                      points_per_decade * std::log10(t_max / t_min))) +
                  1;
  const std::vector<double> tvals = geometric(t_min, t_max, n_t);

  // Kernel values h_t(r e_1, 0) on the full (t, radius) grid; the kernel
  // object is rebuilt once per time, shared across radii.
  Matrix vals(n_t, static_cast<Eigen::Index>(radii.size()));
  const Vector origin = Vector::Zero(d);
  parallel_for(tvals.size(), [&](std::size_t ti) {
    const GeneralKernel kern(p, tvals[ti]);
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      Vector x = Vector::Zero(d);
      x(0) = radii[ri];
      vals(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(ri)) =
          kern.log_at(x, origin);
    }
  });

  ProbeReport rep;
  rep.expected_slope = -static_cast<double>(d);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    Eigen::Index arg = 0;
    const double log_sup =
        vals.col(static_cast<Eigen::Index>(ri)).maxCoeff(&arg);
    rep.radius.push_back(radii[ri]);
    rep.sup.push_back(std::exp(log_sup));
    rep.argmax_t.push_back(tvals[static_cast<std::size_t>(arg)]);
  }

  // Least squares slope of log sup against log radius.
  const std::size_t n = radii.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(rep.radius[i]);
    ly[i] = std::log(rep.sup[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  require(den > 0.0, "l1_unboundedness_probe: radii must not be all equal");
  rep.slope = num / den;
  return rep;
}

}  // namespace ousg
