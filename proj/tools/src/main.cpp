// Command line front end for the OU semigroup kernel library.
//
// Exit codes: 0 success (diagnostics included), 1 a certification or
// numerical check failed, 2 usage or input errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ousg/kernels.hpp"
#include "ousg/linalg.hpp"
#include "ousg/maximal.hpp"
#include "ousg/montecarlo.hpp"
#include "ousg/parallel.hpp"
#include "ousg/report_io.hpp"
#include "ousg/structure.hpp"

namespace {

using nlohmann::json;

// --config accepts a path or inline JSON.
std::string load_config(const std::string& cfg) {
  std::error_code ec;
  if (!cfg.empty() && cfg.front() != '{' && cfg.front() != '[' &&
      std::filesystem::exists(cfg, ec)) {
    std::ifstream in(cfg);
    if (!in) throw std::invalid_argument("cannot open config file " + cfg);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return cfg;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size())
      throw std::invalid_argument("bad number in list: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

ousg::Vector parse_vector(const std::string& text) {
  const std::vector<double> vals = parse_list(text);
  ousg::Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

ousg::Vector vector_or_zero(const std::string& text, Eigen::Index d) {
  if (text.empty()) return ousg::Vector::Zero(d);
  const ousg::Vector v = parse_vector(text);
  ousg::require_dim(v, d, "vector option");
  return v;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write output file " + path);
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
}

void emit_csv(const std::vector<ousg::GridRow>& rows,
              const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write csv file " + path);
  out << ousg::to_csv(rows);
}

struct Options {
  std::string config;
  std::string out;
  std::string csv;
  int threads = 0;

  std::string t_list = "1";
  std::string x_text;
  std::string y_text;
  double t = 1.0;

  // bump
  std::string center_text;
  double sigma = 1.0;
  double amplitude = 1.0;

  // schedules
  std::string schedule = "interval";
  double t0 = 0.01;
  double t_max = 5.0;
  double period = 0.0;
  double window_lo = 0.1;
  double window_hi = 0.2;
  int per_translate = 48;
  int n_periods = 8;
  int quad = 64;

  // grids
  ousg::GridSpec grid;
  double s_max = 0.05;
  double eps = 0.05;
  std::string region = "all";
  double s0 = 0.05;
  double beta = 0.05;
  double delta = 0.05;

  // probes / simulation
  std::string sigmas = "1,0.5,0.25,0.125,0.0625,0.03125,0.015625";
  int alpha_count = 64;
  std::string radii = "1,0.5,0.25,0.125,0.0625,0.03125";
  int ppd = 200;
  int n = 100000;
  std::uint64_t seed = 1;
  std::string times_text;
  double dim = 2;
};

ousg::TimeSet make_schedule(const Options& o) {
  ousg::TimeSetKind kind;
  if (o.schedule == "interval")
    kind = ousg::TimeSetKind::kInterval;
  else if (o.schedule == "translates")
    kind = ousg::TimeSetKind::kTranslateUnion;
  else if (o.schedule == "full")
    kind = ousg::TimeSetKind::kFull;
  else
    throw std::invalid_argument(
        "--schedule must be interval, translates or full");
  return ousg::translate_schedule(kind, o.t0, o.t_max, o.period,
                                  {o.window_lo, o.window_hi},
                                  o.per_translate, o.n_periods);
}

ousg::GaussianBump make_bump(const Options& o, Eigen::Index d) {
  ousg::GaussianBump f;
  f.center = vector_or_zero(o.center_text, d);
  f.sigma = o.sigma;
  f.amplitude = o.amplitude;
  return f;
}

int run_kernel(const Options& o) {
  const std::string cfg = load_config(o.config);
  const std::vector<double> ts = parse_list(o.t_list);
  const ousg::Vector x = parse_vector(o.x_text);
  const ousg::Vector y = parse_vector(o.y_text);
  json out = json::array();
  if (ousg::json_is_block_spec(cfg)) {
    const ousg::BlockSpec spec = ousg::block_spec_from_json(cfg);
    ousg::require_dim(x, spec.dim, "--x");
    ousg::require_dim(y, spec.dim, "--y");
    for (double t : ts) {
      json entry{{"t", t},
                 {"value", ousg::kernel_block(spec, t, x, y)},
                 {"log_value", ousg::log_kernel_block(spec, t, x, y)},
                 {"symmetric", ousg::kernel_symmetric(spec.dim, t, x, y)}};
      json factors = json::array();
      for (std::size_t j = 0; j < spec.theta.size(); ++j) {
        if (spec.theta[j] == 0.0) continue;
        const Eigen::Index k = 2 * static_cast<Eigen::Index>(j);
        factors.push_back(
            json{{"theta", spec.theta[j]},
                 {"value", ousg::factor_2d(spec.theta[j], t,
                                           x.segment<2>(k),
                                           y.segment<2>(k))}});
      }
      entry["factors"] = std::move(factors);
      out.push_back(std::move(entry));
    }
  } else {
    const ousg::OUParams p = ousg::params_from_json(cfg);
    ousg::require_dim(x, p.dim(), "--x");
    ousg::require_dim(y, p.dim(), "--y");
    for (double t : ts)
      out.push_back(json{{"t", t},
                         {"value", ousg::kernel_general(p, t, x, y)},
                         {"log_value",
                          ousg::log_kernel_general(p, t, x, y)}});
  }
  emit(out.dump(2), o.out);
  return 0;
}

int run_canonical(const Options& o) {
  const ousg::Matrix r = ousg::matrix_from_json(load_config(o.config));
  emit(ousg::to_json(ousg::skew_canonical_form(r)), o.out);
  return 0;
}

int run_normality(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  emit(ousg::to_json(ousg::is_normal(p)), o.out);
  return 0;
}

int run_blocks(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  const ousg::StandardForm form = ousg::reduce_to_standard(p);
  json out = json::parse(ousg::to_json(form));
  out.update(json::parse(ousg::to_json(ousg::building_blocks(form))));
  emit(out.dump(2), o.out);
  return 0;
}

int run_apply(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  const ousg::Vector x = parse_vector(o.x_text);
  ousg::require_dim(x, p.dim(), "--x");
  const ousg::GaussianBump f = make_bump(o, p.dim());
  const double v = ousg::apply_semigroup(
      p, o.t, [&](const ousg::Vector& z) { return f(z); }, x, o.quad);
  emit(json{{"t", o.t}, {"value", v}, {"closed_form", f.semigroup_at(p, o.t, x)}}
           .dump(2),
       o.out);
  return 0;
}

int run_maximal(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  const ousg::Vector x = parse_vector(o.x_text);
  ousg::require_dim(x, p.dim(), "--x");
  const ousg::GaussianBump f = make_bump(o, p.dim());
  const ousg::TimeSet times = make_schedule(o);
  const auto fn = [&](const ousg::Vector& z) { return f(z); };
  const ousg::ScanResult scan = ousg::maximal_scan(p, fn, x, times, o.quad);
  const ousg::SplitScan split = ousg::split_maximal(p, fn, x, times, o.quad);
  json out{{"times", times.times().size()},
           {"scan", json::parse(ousg::to_json(scan))},
           {"split", json::parse(ousg::to_json(split))}};
  emit(out.dump(2), o.out);
  return 0;
}

int run_certify_local(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  const ousg::CertificationReport rep = ousg::certify_local_bound(p, o.grid);
  emit(ousg::to_json(rep), o.out);
  emit_csv(rep.rows, o.csv);
  return rep.pass ? 0 : 1;
}

int run_certify_global(const Options& o) {
  const ousg::BlockSpec spec = ousg::block_spec_from_json(load_config(o.config));
  const ousg::CertificationReport rep =
      ousg::certify_global_small_time(spec, o.s_max, o.grid);
  emit(ousg::to_json(rep), o.out);
  emit_csv(rep.rows, o.csv);
  return rep.pass ? 0 : 1;
}

int run_certify_periodic(const Options& o) {
  const ousg::BlockSpec spec = ousg::block_spec_from_json(load_config(o.config));
  const ousg::CertificationReport rep =
      ousg::certify_global_periodic(spec, o.grid, o.n_periods, o.eps);
  emit(ousg::to_json(rep), o.out);
  emit_csv(rep.rows, o.csv);
  return rep.pass ? 0 : 1;
}

int run_certify_regions(const Options& o) {
  const ousg::BlockSpec spec = ousg::block_spec_from_json(load_config(o.config));
  std::vector<ousg::CertifiedRegion> regions;
  if (o.region == "r5" || o.region == "all")
    regions.push_back(ousg::CertifiedRegion::kSmallTimeR5);
  if (o.region == "r2" || o.region == "all")
    regions.push_back(ousg::CertifiedRegion::kPeriodicR2);
  if (o.region == "r3" || o.region == "all")
    regions.push_back(ousg::CertifiedRegion::kPeriodicR3);
  if (regions.empty())
    throw std::invalid_argument("--region must be r5, r2, r3 or all");
  json out = json::array();
  bool all_pass = true;
  for (ousg::CertifiedRegion r : regions) {
    const ousg::CertificationReport rep = ousg::polynomial_certificates(
        spec, r, o.s0, o.beta, o.delta, o.grid);
    all_pass = all_pass && rep.pass;
    out.push_back(json::parse(ousg::to_json(rep)));
  }
  emit(out.dump(2), o.out);
  return all_pass ? 0 : 1;
}

int run_weak_type(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  std::vector<ousg::GaussianBump> family;
  for (double s : parse_list(o.sigmas)) {
    ousg::GaussianBump f = make_bump(o, p.dim());
    f.sigma = s;
    family.push_back(std::move(f));
  }
  const ousg::TimeSet times = make_schedule(o);
  emit(ousg::to_json(
           ousg::weak_type_ratio(p, family, times, o.alpha_count, o.quad)),
       o.out);
  return 0;
}

int run_l1_probe(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  emit(ousg::to_json(ousg::l1_unboundedness_probe(p, o.t_max,
                                                  parse_list(o.radii),
                                                  o.ppd)),
       o.out);
  return 0;
}

int run_simulate(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  const ousg::Vector x = vector_or_zero(o.x_text, p.dim());
  if (!o.times_text.empty()) {
    const ousg::PathSample path =
        ousg::sample_path(p, x, parse_list(o.times_text), o.seed);
    emit(ousg::to_json(path), o.out);
    return 0;
  }
  const ousg::GaussianBump f = make_bump(o, p.dim());
  const ousg::EmpiricalResult emp = ousg::empirical_semigroup(
      p, o.t, [&](const ousg::Vector& z) { return f(z); }, x, o.n, o.seed);
  const double quad = ousg::apply_semigroup(
      p, o.t, [&](const ousg::Vector& z) { return f(z); }, x, o.quad);
  const double z_score =
      emp.std_error > 0.0 ? (emp.mean - quad) / emp.std_error : 0.0;
  json out = json::parse(ousg::to_json(emp));
  out["quadrature"] = quad;
  out["z"] = z_score;
  emit(out.dump(2), o.out);
  return 0;
}

int run_ergodic(const Options& o) {
  const ousg::OUParams p = ousg::params_from_json(load_config(o.config));
  const ousg::Vector x0 = vector_or_zero(o.x_text, p.dim());
  const ousg::ErgodicReport rep =
      ousg::ergodic_check(p, x0, o.t, o.n, o.seed);
  emit(ousg::to_json(rep), o.out);
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{
      "Ornstein-Uhlenbeck semigroup kernels: evaluation, canonical "
      "reduction, maximal-operator scans and certified bounds"};
  app.require_subcommand(1);
  app.add_option("--threads", o.threads, "worker thread override");

  auto add_common = [&](CLI::App* c, bool with_csv = false) {
    c->add_option("--config", o.config,
                  "parameter JSON (inline or a file path)")
        ->required();
    c->add_option("--out", o.out, "write JSON output to this file");
    if (with_csv)
      c->add_option("--csv", o.csv, "write the evaluated grid as CSV");
  };
  auto add_grid = [&](CLI::App* c) {
    c->add_option("--s-count", o.grid.s_count, "time-grid points");
    c->add_option("--pairs", o.grid.pair_count, "sampled (x,y) pairs");
    c->add_option("--radius", o.grid.radius, "norm cap for sampled points");
  };
  auto add_bump = [&](CLI::App* c) {
    c->add_option("--center", o.center_text, "bump center (comma list)");
    c->add_option("--sigma", o.sigma, "bump width");
    c->add_option("--amp", o.amplitude, "bump amplitude");
  };
  auto add_schedule = [&](CLI::App* c) {
    c->add_option("--schedule", o.schedule, "interval|translates|full");
    c->add_option("--t0", o.t0, "interval window size");
    c->add_option("--tmax", o.t_max, "largest time");
    c->add_option("--period", o.period, "translate period");
    c->add_option("--window-lo", o.window_lo, "translate window start");
    c->add_option("--window-hi", o.window_hi, "translate window end");
    c->add_option("--per-translate", o.per_translate, "points per window");
    c->add_option("--n-periods", o.n_periods, "number of translates");
  };

  CLI::App* kernel = app.add_subcommand(
      "kernel", "evaluate a transition kernel (block specs also print the "
                "factorization)");
  add_common(kernel);
  kernel->add_option("--t", o.t_list, "times, comma separated")->required();
  kernel->add_option("--x", o.x_text, "first point")->required();
  kernel->add_option("--y", o.y_text, "second point")->required();

  CLI::App* canonical = app.add_subcommand(
      "canonical", "orthogonal rotation-block form of a skew matrix");
  add_common(canonical);

  CLI::App* normality =
      app.add_subcommand("normality", "standard-form normality report");
  add_common(normality);

  CLI::App* blocks = app.add_subcommand(
      "blocks", "scaled rotation building blocks of a normal drift");
  add_common(blocks);

  CLI::App* apply =
      app.add_subcommand("apply", "apply the semigroup to a Gaussian bump");
  add_common(apply);
  apply->add_option("--t", o.t, "time")->required();
  apply->add_option("--x", o.x_text, "evaluation point")->required();
  apply->add_option("--quad", o.quad, "quadrature order per axis");
  add_bump(apply);

  CLI::App* maximal = app.add_subcommand(
      "maximal", "scan |H_t f(x)| over a time schedule, with local/global "
                 "split");
  add_common(maximal);
  maximal->add_option("--x", o.x_text, "evaluation point")->required();
  maximal->add_option("--quad", o.quad, "quadrature order per axis");
  add_bump(maximal);
  add_schedule(maximal);

  CLI::App* cl = app.add_subcommand(
      "certify-local", "certify the local Gaussian upper bound");
  add_common(cl, true);
  add_grid(cl);

  CLI::App* cg = app.add_subcommand(
      "certify-global", "certify the small-time global bound");
  add_common(cg, true);
  add_grid(cg);
  cg->add_option("--s-max", o.s_max, "certify for s <= s_max");

  CLI::App* cp = app.add_subcommand(
      "certify-periodic", "certify the bound on the periodic schedule");
  add_common(cp, true);
  add_grid(cp);
  cp->add_option("--n-periods", o.n_periods, "periods covered");
  cp->add_option("--eps", o.eps, "window stretch");

  CLI::App* cr = app.add_subcommand(
      "certify-regions", "polynomial certificates on the region partition");
  add_common(cr);
  add_grid(cr);
  cr->add_option("--region", o.region, "r5|r2|r3|all");
  cr->add_option("--s0", o.s0, "small-time horizon");
  cr->add_option("--beta", o.beta, "R3/R4 split radius");
  cr->add_option("--delta", o.delta, "R4/R5 split angle");

  CLI::App* wt = app.add_subcommand(
      "weak-type", "weak (1,1) ratio across a family of bump widths");
  add_common(wt);
  wt->add_option("--sigmas", o.sigmas, "bump widths, comma separated");
  wt->add_option("--alphas", o.alpha_count, "level-grid size");
  wt->add_option("--quad", o.quad, "spatial grid points per axis");
  wt->add_option("--center", o.center_text, "bump center");
  wt->add_option("--amp", o.amplitude, "bump amplitude");
  add_schedule(wt);

  CLI::App* l1 = app.add_subcommand(
      "l1-probe", "growth of sup_t h_t(x,0) along a shrinking ray");
  add_common(l1);
  l1->add_option("--tmax", o.t_max, "largest time scanned");
  l1->add_option("--radii", o.radii, "radii in (0,1], comma separated");
  l1->add_option("--ppd", o.ppd, "t-grid points per decade");

  CLI::App* sim = app.add_subcommand(
      "simulate", "Monte Carlo transition sampling vs quadrature (or a "
                  "path with --times)");
  add_common(sim);
  sim->add_option("--t", o.t, "time");
  sim->add_option("--x", o.x_text, "start point (default 0)");
  sim->add_option("--n", o.n, "sample count");
  sim->add_option("--seed", o.seed, "RNG seed");
  sim->add_option("--times", o.times_text, "path times, comma separated");
  sim->add_option("--quad", o.quad, "quadrature order per axis");
  add_bump(sim);

  CLI::App* erg = app.add_subcommand(
      "ergodic", "sampler vs semigroup moment check at time t");
  add_common(erg);
  erg->add_option("--t", o.t, "time");
  erg->add_option("--n", o.n, "sample count");
  erg->add_option("--x", o.x_text, "start point (default 0)");
  erg->add_option("--seed", o.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (o.threads > 0) ousg::set_thread_override(o.threads);
    if (app.got_subcommand(kernel)) return run_kernel(o);
    if (app.got_subcommand(canonical)) return run_canonical(o);
    if (app.got_subcommand(normality)) return run_normality(o);
    if (app.got_subcommand(blocks)) return run_blocks(o);
    if (app.got_subcommand(apply)) return run_apply(o);
    if (app.got_subcommand(maximal)) return run_maximal(o);
    if (app.got_subcommand(cl)) return run_certify_local(o);
    if (app.got_subcommand(cg)) return run_certify_global(o);
    if (app.got_subcommand(cp)) return run_certify_periodic(o);
    if (app.got_subcommand(cr)) return run_certify_regions(o);
    if (app.got_subcommand(wt)) return run_weak_type(o);
    if (app.got_subcommand(l1)) return run_l1_probe(o);
    if (app.got_subcommand(sim)) return run_simulate(o);
    if (app.got_subcommand(erg)) return run_ergodic(o);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const ousg::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const ousg::capability_error& e) {
    std::cerr << "not supported: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "out of domain: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
