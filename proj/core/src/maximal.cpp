#include "ousg/maximal.hpp"

#include "ousg/linalg.hpp"
#include "detail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ousg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Geometric grid of n points on [lo, hi], endpoints included.
std::vector<double> geometric_grid(double lo, double hi, int n) {
  require(lo > 0.0 && hi > lo && n >= 2,
          "geometric_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

void append_translate(std::vector<TimePoint>& out, double offset,
                      const std::vector<double>& in_translate_times) {
  for (double u : in_translate_times)
    out.push_back(TimePoint{tau_inv(u), offset});
}

// Iterates the tensor Gauss-Hermite rule of N(0, sigma) without
// materializing it; fn(point, weight) is called in a fixed order.
void for_each_node(const GaussianMeasure& m, int order,
                   const std::function<void(const Vector&, double)>& fn) {
  const Eigen::Index d = m.dim();
  if (d > 3)
    throw capability_error(
        "apply_semigroup: tensor quadrature capped at dimension 3");
  const HermiteRule& h1 = gauss_hermite_1d(order);
  const Matrix l = m.llt().matrixL();
  const double norm = std::pow(std::sqrt(kPi), static_cast<double>(d));
  const double sqrt2 = std::sqrt(2.0);

  std::size_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) total *= h1.nodes.size();
  std::vector<int> idx(d, 0);
  Vector z(d);
  for (std::size_t c = 0; c < total; ++c) {
    double w = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      z(i) = h1.nodes[idx[i]];
      w *= h1.weights[idx[i]];
    }
    fn(sqrt2 * (l * z), w / norm);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (++idx[i] < static_cast<int>(h1.nodes.size())) break;
      idx[i] = 0;
    }
  }
}

ScanResult scan_impl(const OUParams& p,
                     const std::function<double(const Vector&, const Vector&)>&
                         integrand,  // (arrival z, node y) -> value
                     const Vector& x, const TimeSet& times, int quad_order) {
  require(!times.points.empty(), "maximal_scan: empty time set");
  ScanResult best{-1.0, 0.0};
  for (const TimePoint& tp : times.points) {
    const double t = tp.time();
    const GaussianMeasure m = measure_at(p, t);
    const Matrix e = expm(t * p.b);
    const Vector xf = e * x;
    double acc = 0.0;
    for_each_node(m, quad_order, [&](const Vector& y, double w) {
      acc += w * integrand(xf - y, y);
    });
    const double v = std::abs(acc);
    if (v > best.sup) best = ScanResult{v, t};
  }
  return best;
}

// Best rational approximation p/q to x > 0 by continued fractions.
bool rationalize(double x, long long max_den, double tol, long long& p,
                 long long& q) {
  long long h0 = 1, h1 = static_cast<long long>(std::floor(x));
  long long k0 = 0, k1 = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <=
        tol) {
      p = h1;
      q = k1;
      return true;
    }
    if (frac < 1e-15) break;
    const double inv = 1.0 / frac;
    const long long a = static_cast<long long>(std::floor(inv));
    frac = inv - std::floor(inv);
    const long long h2 = a * h1 + h0;
    const long long k2 = a * k1 + k0;
    if (k2 > max_den || h2 < 0 || k2 < 0) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
  }
  return false;
}

long long gcd_ll(long long a, long long b) {
  while (b) {
    const long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

double TimePoint::time() const { return offset + tau(s); }

std::vector<double> TimeSet::times() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const TimePoint& p : points) out.push_back(p.time());
  return out;
}

TimeSet translate_schedule(TimeSetKind kind, double t0, double t_max,
                           double period, std::pair<double, double> interval,
                           int per_translate, int n_periods) {
  require(per_translate >= 2, "translate_schedule: need >= 2 points");
  TimeSet out;
  out.kind = kind;

  auto add_interval_part = [&] {
    require(t0 > 0.0 && t_max > 0.0,
            "translate_schedule: t0 and t_max must be positive");
    const int translates =
        std::max(1, static_cast<int>(std::ceil(t_max / t0 - 1e-12)));
    const std::vector<double> base =
        geometric_grid(t0 * 1e-3, t0, per_translate);
    for (int m = 0; m < translates; ++m)
      append_translate(out.points, m * t0, base);
  };
  auto add_union_part = [&] {
    require(period > 0.0, "translate_schedule: period must be positive");
    require(interval.first > 0.0 && interval.second > interval.first,
            "translate_schedule: interval must satisfy 0 < lo < hi");
    require(n_periods >= 1, "translate_schedule: n_periods must be >= 1");
    std::vector<double> base(per_translate);
    const double step =
        (interval.second - interval.first) / (per_translate - 1);
    for (int i = 0; i < per_translate; ++i)
      base[i] = interval.first + step * i;
    for (int n = 0; n < n_periods; ++n)
      append_translate(out.points, n * period, base);
  };

  switch (kind) {
    case TimeSetKind::kInterval:
      add_interval_part();
      break;
    case TimeSetKind::kTranslateUnion:
      add_union_part();
      break;
    case TimeSetKind::kFull:
      add_interval_part();
      add_union_part();
      break;
  }

  std::sort(out.points.begin(), out.points.end(),
            [](const TimePoint& a, const TimePoint& b) {
              return a.time() < b.time();
            });
  out.points.erase(
      std::unique(out.points.begin(), out.points.end(),
                  [](const TimePoint& a, const TimePoint& b) {
                    return std::abs(a.time() - b.time()) <=
                           1e-12 * (1.0 + a.time());
                  }),
      out.points.end());
  return out;
}

double apply_semigroup(const OUParams& p, double t,
                       const std::function<double(const Vector&)>& f,
                       const Vector& x, int quad_order) {
  require_domain(t >= 0.0, "apply_semigroup: t must be nonnegative");
  require_dim(x, p.dim(), "apply_semigroup.x");
  if (t == 0.0) return f(x);
  const GaussianMeasure m = measure_at(p, t);
  const Matrix e = expm(t * p.b);
  const Vector xf = e * x;
  double acc = 0.0;
  for_each_node(m, quad_order,
                [&](const Vector& y, double w) { acc += w * f(xf - y); });
  return acc;
}

ScanResult maximal_scan(const OUParams& p,
                        const std::function<double(const Vector&)>& f,
                        const Vector& x, const TimeSet& times,
                        int quad_order) {
  require_dim(x, p.dim(), "maximal_scan.x");
  return scan_impl(
      p, [&](const Vector& z, const Vector&) { return f(z); }, x, times,
      quad_order);
}

bool local_region(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), "local_region: dimension mismatch");
  const double sum = (x + y).norm();
  const double cap = sum > 1.0 ? 1.0 / sum : 1.0;
  return (x - y).norm() <= cap;
}

SplitScan split_maximal(const OUParams& p,
                        const std::function<double(const Vector&)>& f,
                        const Vector& x, const TimeSet& times,
                        int quad_order) {
  require_dim(x, p.dim(), "split_maximal.x");
  SplitScan out;
  out.local = scan_impl(
      p,
      [&](const Vector& z, const Vector&) {
        return local_region(x, z) ? f(z) : 0.0;
      },
      x, times, quad_order);
  out.global = scan_impl(
      p,
      [&](const Vector& z, const Vector&) {
        return local_region(x, z) ? 0.0 : f(z);
      },
      x, times, quad_order);
  return out;
}

RegionFive classify_region_five(const Vector2& xi, const Vector2& eta,
                                double beta, double delta) {
  require_domain(beta > 0.0 && beta < 1.0 && delta > 0.0 && delta < 1.0,
                 "classify_region_five: beta, delta must lie in (0,1)");
  const double dot = xi.dot(eta);
  if (dot < 0.0) return RegionFive::kR1;
  const double wedge = xi.x() * eta.y() - xi.y() * eta.x();
  if (wedge >= 0.0) return RegionFive::kR2;
  if ((xi - eta).norm() >= beta * eta.norm()) return RegionFive::kR3;
  const double nx = xi.norm(), ny = eta.norm();
  // wedge != 0 here, so both norms are positive.
  const double abs_sin = std::abs(wedge) / (nx * ny);
  return abs_sin >= delta ? RegionFive::kR4 : RegionFive::kR5;
}

RegionThree classify_region_three(const Vector2& xi, const Vector2& eta) {
  const double dot = xi.dot(eta);
  if (dot < 0.0) return RegionThree::kR3;
  const double wedge = xi.x() * eta.y() - xi.y() * eta.x();
  return wedge >= 0.0 ? RegionThree::kR1 : RegionThree::kR2;
}

PeriodResult period_of(const BlockSpec& spec) {
  std::vector<double> thetas;
  for (double th : spec.theta)
    if (th != 0.0) thetas.push_back(std::abs(th));
  if (thetas.empty()) return PeriodResult{true, 0.0};

  const double ref = thetas.front();
  long long lcm = 1;
  std::vector<long long> nums;
  nums.reserve(thetas.size());
  std::vector<long long> dens;
  for (double th : thetas) {
    long long p = 0, q = 0;
    const double ratio = th / ref;
    if (!rationalize(ratio, 1000000, 1e-9 * std::max(1.0, ratio), p, q) ||
        p <= 0)
      return PeriodResult{false, 0.0};
    nums.push_back(p);
    dens.push_back(q);
    const long long g = gcd_ll(lcm, q);
    lcm = lcm / g * q;
    if (lcm > 1000000000LL) return PeriodResult{false, 0.0};
  }
  // Smallest T with theta_j T = 2 pi n_j: T = 2 pi L / (ref g) where
  // n_j = p_j L / q_j and g = gcd(n_j).
  long long g = 0;
  for (std::size_t j = 0; j < nums.size(); ++j)
    g = gcd_ll(g, nums[j] * (lcm / dens[j]));
  const double period = 2.0 * kPi * static_cast<double>(lcm) /
                        (ref * static_cast<double>(g));

  const Matrix r = rotation_generator(spec.theta, spec.dim);
  const Matrix e = expm(period * r);
  if ((e - Matrix::Identity(spec.dim, spec.dim)).norm() >= 1e-8)
    return PeriodResult{false, 0.0};
  return PeriodResult{true, period};
}

double comparison_bound_T(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), "comparison_bound_T: dimension mismatch");
  const double d = static_cast<double>(x.size());
  const double nx = x.norm(), ny = y.norm();
  double log_min = d * std::log1p(nx);
  if (nx > 0.0 && ny > 0.0) {
    const double c = std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
    const double sin_angle = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (nx * sin_angle > 0.0)
      log_min = std::min(log_min, -d * std::log(nx * sin_angle));
  }
  return std::exp(x.squaredNorm() + log_min);
}

double GaussianBump::operator()(const Vector& y) const {
  require_dim(y, center.size(), "GaussianBump");
  return amplitude *
         std::exp(-(y - center).squaredNorm() / (2.0 * sigma * sigma));
}

double GaussianBump::semigroup_at(const OUParams& p, double t,
                                  const Vector& x) const {
  require_domain(t >= 0.0, "GaussianBump.semigroup_at: t must be >= 0");
  require_dim(x, p.dim(), "GaussianBump.semigroup_at.x");
  if (t == 0.0) return (*this)(x);
  // E[f(mu - Y)], Y ~ N(0, Q_t), for a Gaussian f: another Gaussian in mu
  // with covariance Q_t + sigma^2 I.
  const Eigen::Index d = p.dim();
  const Matrix qt = covariance_at(p, t);
  const Vector mu = expm(t * p.b) * x - center;
  Eigen::LLT<Matrix> llt(qt + sigma * sigma * Matrix::Identity(d, d));
  if (llt.info() != Eigen::Success)
    throw numeric_error("GaussianBump.semigroup_at: covariance failure");
  double log_det_ratio = 0.0;  // log det(I + Q_t / sigma^2)
  for (Eigen::Index i = 0; i < d; ++i)
    log_det_ratio += 2.0 * std::log(llt.matrixL()(i, i) / sigma);
  const double quad = llt.matrixL().solve(mu).squaredNorm();
  return amplitude * std::exp(-0.5 * (log_det_ratio + quad));
}

double GaussianBump::l1_norm(const OUParams& p) const {
  const Eigen::Index d = p.dim();
  const Matrix qinf = lyapunov_stationary(p.q, p.b);
  Eigen::LLT<Matrix> llt(qinf + sigma * sigma * Matrix::Identity(d, d));
  if (llt.info() != Eigen::Success)
    throw numeric_error("GaussianBump.l1_norm: covariance failure");
  double log_det_ratio = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    log_det_ratio += 2.0 * std::log(llt.matrixL()(i, i) / sigma);
  const double quad = llt.matrixL().solve(center).squaredNorm();
  return amplitude * std::exp(-0.5 * (log_det_ratio + quad));
}

}  // namespace ousg
