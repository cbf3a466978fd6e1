#include "pplab/commands.hpp"

#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "pplab/analysis.hpp"
#include "pplab/envelope.hpp"
#include "pplab/errors.hpp"
#include "pplab/evolution.hpp"
#include "pplab/field_io.hpp"
#include "pplab/json_format.hpp"
#include "pplab/kernel.hpp"
#include "pplab/operators.hpp"
#include "pplab/special.hpp"

namespace pplab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string out_dir(const RunConfig& cfg, const CliOptions& o) { return o.out_dir ? *o.out_dir : cfg.out_dir; }

std::uint64_t seed_of(const RunConfig& cfg, const CliOptions& o) { return o.seed ? *o.seed : cfg.seed; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::string short_number(double v) { return format_double(v, 12); }

// Sum of random Gaussian bumps with centers in the inner half of the box.
Field random_bumps(const GridDomain& d, std::mt19937_64& rng, int count, double amp_max) {
  std::uniform_real_distribution<double> centre(-0.25 * d.L, 0.25 * d.L);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  std::uniform_real_distribution<double> amp(0.1, amp_max);
  Field f = Field::zeros(d);
  for (int b = 0; b < count; ++b) {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int k = 0; k < d.n; ++k) c[k] = centre(rng);
    const double s = width(rng), a = amp(rng);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto x = d.point(i);
      double q = 0.0;
      for (int k = 0; k < d.n; ++k) q += (x[k] - c[k]) * (x[k] - c[k]);
      f.values[static_cast<Eigen::Index>(i)] += a * std::exp(-q / (s * s));
    }
  }
  return f;
}

json check(const std::string& name, bool pass, json detail = json::object()) {
  detail["name"] = name;
  detail["pass"] = pass;
  return detail;
}

double radial_mass(int n, double R) {
  const BesselKernel B(n);
  auto f = [&](double r) { return r <= 0.0 ? (n == 1 ? B(0.0) : 0.0) : B(r) * std::pow(r, n - 1); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inner = GK::integrate(f, 0.0, 1.0, 12, 1e-13);
  const double outer = GK::integrate(f, 1.0, R, 12, 1e-13);
  return sphere_area(n) * (inner + outer);
}

void suite_kernel(json& checks, std::uint64_t seed) {
  for (int n = 1; n <= 3; ++n) {
    const double m = radial_mass(n, 40.0);
    checks.push_back(check("normalization_n" + std::to_string(n), std::abs(m - 1.0) < 1e-6, {{"integral", m}}));
  }
  {
    const BesselKernel B(1);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double r = 0.01 + 0.3 * k;
      worst = std::max(worst, std::abs(B(r) - 0.5 * std::exp(-r)) / (0.5 * std::exp(-r)));
    }
    checks.push_back(check("closed_form_1d", worst < 1e-10, {{"max_rel_error", worst}}));
  }
  for (int n = 1; n <= 3; ++n) {
    const BesselKernel B(n);
    double c1 = INFINITY, c2 = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const double r = 1e-3 * std::pow(3e4, k / 1999.0);
      const BoundPair b = B.bounds(r);
      c1 = std::min(c1, B(r) / b.lower);
      c2 = std::max(c2, B(r) / b.upper);
    }
    const bool ok = c1 > 0.0 && std::isfinite(c2) && c2 / c1 < 100.0;
    checks.push_back(check("sandwich_n" + std::to_string(n), ok, {{"C1", c1}, {"C2", c2}, {"spread", c2 / c1}}));
  }
  for (int n = 1; n <= 3; ++n) {
    const BesselKernel B(n);
    const double h = 1e-4, r = 2.0;
    const double fd = std::abs(B(r + h) - B(r - h)) / (2.0 * h);
    const double err = std::abs(B.gradient_magnitude(r) - fd);
    checks.push_back(check("gradient_fd_n" + std::to_string(n), err < 1e-6, {{"abs_error", err}}));
  }
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xs(0.0, 10.0), al(0.0, 1.0), ks(1.0, 6.0);
    long bad = 0;
    for (int s = 0; s < 10000; ++s) {
      const double x = xs(rng), y = xs(rng), a = al(rng), k = ks(rng);
      const double l1 = std::pow(x + y, a), r1 = std::pow(x, a) + std::pow(y, a);
      const double l2 = std::pow(x + y, k), r2 = std::pow(2.0, k) * (std::pow(x, k) + std::pow(y, k));
      if (l1 > r1 * (1.0 + 1e-12) || l2 > r2 * (1.0 + 1e-12)) ++bad;
    }
    checks.push_back(check("elementary_inequalities", bad == 0, {{"samples", 10000}, {"violations", bad}}));
  }
}

double envelope_check(double sigma, std::uint64_t seed) {
  const GridDomain d(1, 20.0, 256);
  PotentialSpec p;
  p.sigma = sigma;
  p.lambda = TimeFactor::constant(1.0);
  const EpsSequence es = make_eps_sequence(sigma, 0.5, 16);
  const EnvelopeParams env = make_envelope(p, es, 1e-4, d, seed);
  std::mt19937_64 rng(seed + 11);
  const Field f = random_bumps(d, rng, 3, 1.0);
  double worst = 0.0;  // max of lhs / rhs
  for (int N = 1; N <= 4; ++N) {
    const Eigen::ArrayXd lhs = iterate_BV(f, p, 0.0, N).values.abs();
    const Eigen::ArrayXd rhs = iterated_envelope(f, env, es, N).values;
    const double floor = 1e-12 * lhs.maxCoeff();
    for (Eigen::Index i = 0; i < lhs.size(); ++i) worst = std::max(worst, (lhs[i] - floor) / rhs[i]);
  }
  return worst;
}

void suite_operators(json& checks, std::uint64_t seed) {
  {
    const GridDomain d(1, 20.0, 512);
    Field f = Field::zeros(d);
    for (std::size_t i = 0; i < d.size(); ++i) f.values[static_cast<Eigen::Index>(i)] = std::exp(-std::pow(d.coord(int(i)), 2));
    const double diff = (apply_B_spectral(f).values - apply_B_quadrature(f).values).abs().maxCoeff();
    checks.push_back(check("backend_equivalence_1d", diff < 1e-5, {{"max_diff", diff}}));
  }
  {
    const GridDomain d(2, 5.0, 64);
    Field f = Field::zeros(d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double r = d.radius(i);
      f.values[static_cast<Eigen::Index>(i)] = std::exp(-r * r);
    }
    const double diff = (apply_B_spectral(f).values - apply_B_quadrature(f).values).abs().maxCoeff();
    checks.push_back(check("backend_equivalence_2d", diff < 1e-5, {{"max_diff", diff}}));
  }
  {
    const LemmaEx1Report rep = verify_lemma_ex1(100000, 2, seed);
    checks.push_back(check("lemma_ex1", rep.pass(), {{"samples", rep.samples}, {"violations", rep.violations}}));
  }
  for (double sigma : {0.0, 0.3, 0.7}) {
    const double worst = envelope_check(sigma, seed);
    checks.push_back(check("iterated_envelope_sigma_" + short_number(sigma), worst <= 1.0, {{"max_ratio", worst}}));
  }
  {
    const EpsSequence es = make_eps_sequence(0.5, 0.5, 10000);
    const bool ok = std::abs(es.theta0 - 0.132666) < 1e-5 && es.rho_star >= es.rho_star_bound && es.rho_star_bound >= 0.5;
    checks.push_back(check("eps_sequence", ok,
                           {{"theta0", es.theta0}, {"rho_star", es.rho_star}, {"rho_star_bound", es.rho_star_bound}}));
  }
  for (double sigma : {0.0, 0.7}) {
    const GridDomain d(1, 10.0, 256);
    PotentialSpec p;
    p.sigma = sigma;
    p.lambda = TimeFactor::constant(1.0);
    const double t = sigma == 0.0 ? 1.0 : 2.0;
    const GronwallReport g = gronwall_decay_check(Field::constant(d, 1.0), p, t, 60);
    checks.push_back(check("gronwall_sigma_" + short_number(sigma), g.pass && g.eventually_decreasing,
                           {{"first_below", g.first_below}}));
  }
}

void suite_comparison(json& checks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sig(0.0, 0.9), lam(0.0, 1.0);
  const GridDomain d(1, 16.0, 256);
  int passed = 0;
  double worst = -INFINITY;
  json cases = json::array();
  for (int k = 0; k < 20; ++k) {
    PotentialSpec p;
    p.sigma = sig(rng);
    const bool time_dependent = k % 2 == 1;
    p.lambda = time_dependent ? TimeFactor::exp_decay(lam(rng)) : TimeFactor::constant(lam(rng));
    const Field u0 = random_bumps(d, rng, 2, 1.0);
    Field v0 = u0;
    v0.values += random_bumps(d, rng, 1, 0.5).values;
    SeriesParams sp;
    sp.time_grid = {0.25, 0.5, 1.0};
    const EvolutionResult u = time_dependent ? solve_picard(u0, p, sp) : solve_autonomous(u0, p, sp);
    const EvolutionResult v = time_dependent ? solve_picard(v0, p, sp) : solve_autonomous(v0, p, sp);
    const ComparisonReport rep = check_comparison(u, v);
    worst = std::max(worst, rep.max_violation);
    if (rep.pass) ++passed;
    cases.push_back({{"sigma", p.sigma}, {"time_dependent", time_dependent}, {"max_violation", rep.max_violation}});
  }
  checks.push_back(check("comparison_random_instances", passed == 20,
                         {{"passed", passed}, {"total", 20}, {"max_violation", worst}, {"cases", cases}}));
}

void suite_lower_bound(json& checks, std::uint64_t) {
  const GridDomain d(1, 20.0, 512);
  for (double sigma : {0.3, 0.5, 0.7}) {
    PotentialSpec p;
    p.sigma = sigma;
    p.lambda = TimeFactor::constant(1.0);
    InitialSpec i;
    SeriesParams sp;
    sp.time_grid = {1.0};
    const EvolutionResult r = solve_autonomous(sample_initial(i, d), p, sp);
    const LowerBoundReport rep = verify_lower_bound(r, p, i, 0.2, 1.0);
    checks.push_back(check("lower_bound_sigma_" + short_number(sigma),
                           rep.pass && r.status == SolveStatus::converged, to_json(rep)));
  }
  {
    Field u0 = Field::zeros(d);
    for (std::size_t k = 0; k < d.size(); ++k) u0.values[static_cast<Eigen::Index>(k)] = std::exp(-std::pow(d.coord(int(k)), 2));
    SeriesParams sp;
    sp.time_grid = {0.5};
    const EvolutionResult r = solve_autonomous(u0, PotentialSpec{}, sp);
    const DecayFloorReport rep = verify_decay_floor(r, 0.5, 1.5);
    checks.push_back(check("decay_floor_gaussian", rep.pass, to_json(rep)));
  }
}

}  // namespace

int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::GlobalExists: return exit_code::ok;
    case Verdict::NoGlobalSolution: return exit_code::no_global;
    case Verdict::InstantaneousBlowup: return exit_code::instantaneous;
    case Verdict::CompleteBlowupAnyPotential: return exit_code::complete;
    case Verdict::Undetermined: return exit_code::undetermined;
  }
  return exit_code::undetermined;
}

int cmd_solve(const RunConfig& cfg, const CliOptions& o, std::ostream& out) {
  const Field u0 = sample_initial(cfg.initial, cfg.grid);
  SeriesParams sp = cfg.series;
  sp.force_unsafe = o.force_unsafe;

  std::string method = cfg.method;
  if (method == "auto") {
    if (cfg.convection && !cfg.convection->vanishes())
      method = "convection";
    else
      method = cfg.potential.time_independent() ? "autonomous" : "picard";
  }
  EvolutionResult r;
  if (method == "autonomous")
    r = solve_autonomous(u0, cfg.potential, sp);
  else if (method == "picard")
    r = solve_picard(u0, cfg.potential, sp);
  else
    r = solve_convection(u0, cfg.potential, cfg.convection.value_or(ConvectionSpec{TimeFactor::constant(0.0)}), sp);

  const fs::path dir = out_dir(cfg, o);
  fs::create_directories(dir);
  json m = manifest(r);
  json files = json::array();
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "snapshot_%03zu", i);
    json entry{{"t", r.snapshots[i].t}};
    for (const std::string& f : cfg.formats) {
      if (f == "csv") {
        write_field_csv((dir / (std::string(stem) + ".csv")).string(), r.snapshots[i]);
        entry["csv"] = std::string(stem) + ".csv";
      } else {
        write_field_binary((dir / (std::string(stem) + ".bin")).string(), r.snapshots[i]);
        entry["binary"] = std::string(stem) + ".bin";
      }
    }
    files.push_back(entry);
  }
  m["snapshots"] = files;
  m["seed"] = seed_of(cfg, o);
  write_text(dir / "manifest.json", dump_json(m) + "\n");

  double worst = 0.0;
  for (double v : r.residuals) worst = std::max(worst, v);
  out << "status " << to_string(r.status) << " method " << to_string(r.method) << " iterations " << r.iterations
      << " max_residual " << format_double(worst) << "\n";
  switch (r.status) {
    case SolveStatus::converged: return exit_code::ok;
    case SolveStatus::truncated: return exit_code::truncated;
    case SolveStatus::diverged: return exit_code::diverged;
  }
  return exit_code::diverged;
}

int cmd_classify(const RunConfig& cfg, const CliOptions& o, std::ostream& out) {
  const Classification c = classify(cfg.potential, cfg.initial, cfg.horizon);
  json j = to_json(c);
  if (c.verdict == Verdict::InstantaneousBlowup)
    j["note"] = "numerically consistent with instantaneous blow-up";
  out << to_string(c.verdict) << "\n" << dump_json(j) << "\n";
  if (o.out_dir) {
    fs::create_directories(*o.out_dir);
    write_text(fs::path(*o.out_dir) / "classification.json", dump_json(j) + "\n");
  }
  return verdict_exit_code(c.verdict);
}

int cmd_scan(const RunConfig& cfg, const CliOptions& o, std::ostream& out) {
  if (!cfg.scan) throw precondition_error("scan: the config has no 'scan' section");
  const ScanSpec& s = *cfg.scan;
  if (s.cells() > scan_cell_budget) return exit_code::budget;

  const std::size_t cells = s.cells();
  std::vector<std::string> rows(cells);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k = next++; k < cells; k = next++) {
      try {
        const double sigma = s.sigma[k / s.Lambda0.size()];
        const double lam = s.Lambda0[k % s.Lambda0.size()];
        PotentialSpec p;
        p.sigma = sigma;
        p.lambda = TimeFactor{s.family, lam, s.nu};
        p.R0 = s.R0;
        p.mode = s.mode;
        const Classification c = classify(p, cfg.initial, cfg.horizon);
        rows[k] = short_number(sigma) + "," + short_number(lam) + "," + short_number(cfg.initial.alpha) + "," +
                  short_number(cfg.initial.delta) + "," + to_string(c.verdict);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(std::max<std::size_t>(cells, 1))));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::string csv = "sigma,Lambda0,alpha,delta,verdict\n";
  for (const auto& r : rows) csv += r + "\n";
  out << csv;
  if (o.out_dir) {
    fs::create_directories(*o.out_dir);
    write_text(fs::path(*o.out_dir) / "scan.csv", csv);
  }
  return exit_code::ok;
}

bool known_suite(const std::string& suite) {
  return suite == "kernel" || suite == "operators" || suite == "comparison" || suite == "lower-bound" ||
         suite == "all";
}

json run_verify_suite(const std::string& suite, std::uint64_t seed) {
  if (!known_suite(suite)) throw precondition_error("unknown verify suite '" + suite + "'");
  json checks = json::array();
  if (suite == "kernel" || suite == "all") suite_kernel(checks, seed);
  if (suite == "operators" || suite == "all") suite_operators(checks, seed);
  if (suite == "comparison" || suite == "all") suite_comparison(checks, seed);
  if (suite == "lower-bound" || suite == "all") suite_lower_bound(checks, seed);
  bool pass = true;
  for (const auto& c : checks) pass = pass && c.at("pass").get<bool>();
  return {{"suite", suite}, {"seed", seed}, {"checks", checks}, {"pass", pass}};
}

int cmd_verify(const std::string& suite, const CliOptions& o, std::ostream& out) {
  if (!known_suite(suite)) return exit_code::usage;
  const json report = run_verify_suite(suite, o.seed.value_or(0));
  out << dump_json(report) << "\n";
  if (o.out_dir) {
    fs::create_directories(*o.out_dir);
    write_text(fs::path(*o.out_dir) / ("verify_" + suite + ".json"), dump_json(report) + "\n");
  }
  return report.at("pass").get<bool>() ? exit_code::ok : exit_code::check_failed;
}

int cmd_kernel_table(int n, double r_min, double r_max, int count, const CliOptions& o, std::ostream& out) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || count < 1) throw domain_error("kernel-table: need 0 < rmin <= rmax and count >= 1");
  const BesselKernel B(n);
  std::string csv = "r,B,gradB,lower,upper\n";
  for (int k = 0; k < count; ++k) {
    const double r = count == 1 ? r_min : r_min * std::pow(r_max / r_min, double(k) / (count - 1));
    const BoundPair b = B.bounds(r);
    csv += format_double(r, 12) + "," + format_double(B(r), 12) + "," + format_double(B.gradient_magnitude(r), 12) +
           "," + format_double(b.lower, 12) + "," + format_double(b.upper, 12) + "\n";
  }
  out << csv;
  if (o.out_dir) {
    fs::create_directories(*o.out_dir);
    write_text(fs::path(*o.out_dir) / "kernel_table.csv", csv);
  }
  return exit_code::ok;
}

}  // namespace pplab
