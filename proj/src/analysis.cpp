#include "pplab/analysis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>

#include "pplab/errors.hpp"
#include "pplab/kernel.hpp"
#include "pplab/operators.hpp"
#include "pplab/special.hpp"

namespace pplab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
double gk(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-11);
}

// Integral over [a, b] split at the given interior breakpoints.
template <typename F>
double gk_split(F&& f, double a, double b, std::vector<double> cuts) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i - 1]), hi = std::min(b, cuts[i]);
    if (hi > lo) sum += gk(f, lo, hi);
  }
  return sum;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw resolution_error("least_squares: abscissae do not vary");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

// Grid points with |x| in [L/4, L/2] and the number of distinct radii among them.
std::vector<std::size_t> annulus(const GridDomain& d, int& shells) {
  std::vector<std::size_t> idx;
  std::vector<double> radii;
  const double lo = 0.25 * d.L, hi = 0.5 * d.L;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = d.radius(i);
    if (r >= lo && r <= hi) {
      idx.push_back(i);
      radii.push_back(r);
    }
  }
  std::sort(radii.begin(), radii.end());
  shells = 0;
  double last = -1.0;
  for (double r : radii)
    if (r - last > 1e-9 * std::max(1.0, r)) {
      ++shells;
      last = r;
    }
  return idx;
}

const Field* snapshot_at(const EvolutionResult& r, double t) {
  for (const Field& f : r.snapshots)
    if (std::abs(f.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return &f;
  return nullptr;
}

double lower_constant(int n) {
  // Sampled inf of B / (lower_shape e^{-r}) on a log-spaced radius grid.
  const BesselKernel B(n);
  double best = kInf;
  const int m = 2000;
  for (int k = 0; k < m; ++k) {
    const double r = 1e-3 * std::pow(3e4, double(k) / (m - 1));
    best = std::min(best, B(r) / B.bounds(r).lower);
  }
  return best;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::GlobalExists: return "GlobalExists";
    case Verdict::NoGlobalSolution: return "NoGlobalSolution";
    case Verdict::InstantaneousBlowup: return "InstantaneousBlowup";
    case Verdict::CompleteBlowupAnyPotential: return "CompleteBlowupAnyPotential";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "?";
}

double c_T(const PotentialSpec& p, double T) {
  const double norm = p.lambda.sup_abs(T);
  if (p.R0 == 0.0 || norm == 0.0) return 1.0;
  return std::min(1.0, std::pow(p.R0, -p.sigma) / norm);
}

double sup_c_lambda_star(const PotentialSpec& p, double horizon) {
  if (!(horizon > 0.0)) throw domain_error("sup_c_lambda_star: horizon must be positive");
  const double top = std::min(horizon, 100.0);
  const int m = 400;
  double best = -kInf;
  for (int k = 0; k < m; ++k) {
    const double tau = top <= 1e-3 ? top : 1e-3 * std::pow(top / 1e-3, double(k) / (m - 1));
    best = std::max(best, c_T(p, tau) * p.lambda.integral(tau));
  }
  if (std::isfinite(horizon)) return std::max(best, c_T(p, horizon) * p.lambda.integral(horizon));
  const double lim = p.lambda.integral_limit();
  if (std::isinf(lim)) return lim > 0 ? kInf : best;
  // Only exp_decay saturates; its sup norm over (0, inf) is |c|.
  const double norm = std::abs(p.lambda.c);
  const double c_inf = (p.R0 == 0.0 || norm == 0.0) ? 1.0 : std::min(1.0, std::pow(p.R0, -p.sigma) / norm);
  return std::max(best, c_inf * lim);
}

double nonexistence_threshold(const InitialSpec& i) {
  if (i.alpha < 1.0) return 1.0;
  if (i.alpha == 1.0) return 1.0 + std::max(-i.delta, 0.0);
  // Faster-than-exponential decay is first lifted to an e^{-(1+)|x|} tail.
  return i.delta < 0.0 ? 2.0 : 1.0;
}

Classification classify(const PotentialSpec& p, const InitialSpec& i, double horizon) {
  p.validate();
  i.validate();
  if (!(horizon > 0.0)) throw precondition_error("classify: horizon must be positive");
  Classification c;
  auto& cert = c.certificate;
  cert["sigma"] = p.sigma;
  cert["alpha"] = i.alpha;
  cert["delta"] = i.delta;
  const bool H1 = p.lower_hypothesis();
  const bool H2 = p.upper_hypothesis();
  const bool rapid = (i.alpha > 1.0 && i.delta > 0.0) || (i.alpha == 1.0 && i.delta >= 1.0);

  if (rapid && H1) {
    c.verdict = Verdict::CompleteBlowupAnyPotential;
    c.citation = "rapidly growing data: every nonnegative solution blows up completely";
    cert["rapid_growth"] = true;
    return c;
  }
  if (p.sigma > 1.0 && H1 && p.lambda.c > 0.0) {
    c.verdict = Verdict::InstantaneousBlowup;
    c.citation = "superlinear potential growth: no nontrivial positive solution on any time interval";
    cert["lambda_c"] = p.lambda.c;
    cert["beta"] = default_beta(p);
    return c;
  }
  if (p.sigma == 1.0 && H1 && p.lambda.c > 0.0) {
    const double sup = sup_c_lambda_star(p, horizon);
    const double thr = nonexistence_threshold(i);
    cert["sup_c_lambda_star"] = sup;
    cert["threshold"] = thr;
    if (sup > thr) {
      c.verdict = Verdict::NoGlobalSolution;
      c.citation = "linear potential growth: sup c_tau Lambda_*(tau) exceeds the datum threshold";
      return c;
    }
  }
  if (p.sigma < 1.0 && H2) {
    const bool member = initial_in_weighted_space(i);
    cert["initial_in_weighted_space"] = member;
    if (member) {
      c.verdict = Verdict::GlobalExists;
      c.citation = "sublinear potential growth: unique global solution in the weighted class";
      return c;
    }
  }
  c.verdict = Verdict::Undetermined;
  return c;
}

BlowupIndicator blowup_indicator(const InitialSpec& i, double beta, double sigma, const std::vector<double>& x_probe,
                                 const std::vector<double>& L_sweep) {
  const int n = static_cast<int>(x_probe.size());
  if (n < 1 || n > 3) throw domain_error("blowup_indicator: probe must have 1 to 3 coordinates");
  if (!(beta >= 0.0)) throw domain_error("blowup_indicator: beta must be nonnegative");
  if (!(sigma >= 0.0)) throw domain_error("blowup_indicator: sigma must be nonnegative");
  for (std::size_t k = 0; k < L_sweep.size(); ++k)
    if (!(L_sweep[k] > 0.0) || (k > 0 && L_sweep[k] <= L_sweep[k - 1]))
      throw domain_error("blowup_indicator: radii must be positive and increasing");

  const BesselKernel B(n);
  double rho = 0.0;
  for (double v : x_probe) rho += v * v;
  rho = std::sqrt(rho);

  // Mass between radii a and b.
  auto shell = [&](double a, double b) -> double {
    if (n == 1) {
      const double x = x_probe[0];
      auto f = [&](double y) { return B.lower_shape(std::abs(y)) * std::exp(beta * std::pow(std::abs(x - y), sigma) - std::abs(y)); };
      return gk_split(f, a, b, {1.0, x}) + gk_split(f, -b, -a, {-1.0, x});
    }
    auto angular = [&](double r) {
      auto g = [&](double th) {
        const double d2 = std::max(0.0, r * r + rho * rho - 2.0 * r * rho * std::cos(th));
        const double e = std::exp(beta * std::pow(d2, 0.5 * sigma));
        return n == 2 ? 2.0 * e : 2.0 * kPi * e * std::sin(th);
      };
      return gk(g, 0.0, kPi);
    };
    auto f = [&](double r) {
      if (r <= 0.0) return 0.0;
      return std::pow(r, n - 1) * B.lower_shape(r) * std::exp(-r) * angular(r);
    };
    return gk_split(f, a, b, {1.0, rho});
  };

  BlowupIndicator out;
  out.datum_positive = i.C0 > 0.0;
  out.radii = L_sweep;
  double prev_L = 0.0, total = 0.0;
  for (double L : L_sweep) {
    const double inc = shell(prev_L, L);
    total += inc;
    out.increments.push_back(inc);
    out.partials.push_back(total);
    prev_L = L;
  }
  const std::size_t m = out.increments.size();
  if (m >= 3) {
    const double a = out.increments[m - 3], b = out.increments[m - 2], c = out.increments[m - 1];
    const bool overflow = !std::isfinite(c) || !std::isfinite(b);
    out.divergent = overflow || (b > 1.1 * a && c > 1.1 * b);
  }
  if (m >= 1 && std::isfinite(total)) out.convergent = out.increments.back() < 1e-8 * total;
  return out;
}

double default_beta(const PotentialSpec& p, double eps, double tau0) {
  return 0.5 * (1.0 - eps) * c_T(p, tau0) * p.lambda.integral(tau0);
}

LowerBoundReport verify_lower_bound(const EvolutionResult& r, const PotentialSpec& p, const InitialSpec& i,
                                    double eps, double tau0) {
  if (!(eps > 0.0 && eps < 1.0)) throw domain_error("verify_lower_bound: eps must lie in (0, 1)");
  if (!(p.sigma > 0.0)) throw domain_error("verify_lower_bound: sigma must be positive for a slope fit");
  const GridDomain& d = r.domain;
  int shells = 0;
  const std::vector<std::size_t> idx = annulus(d, shells);
  if (shells < 8) throw resolution_error("verify_lower_bound: annulus holds fewer than 8 grid shells");
  const double ap = std::max(i.alpha, 0.0);

  LowerBoundReport rep;
  for (const Field& s : r.snapshots) {
    if (s.t < tau0) continue;
    const Field mu = to_mu(s);
    SlopeFit fit;
    fit.t = s.t;
    fit.shells = shells;
    fit.floor = (1.0 - eps) * c_T(p, s.t) * p.lambda.integral(s.t);
    std::vector<double> xs, ys;
    bool positive = s.finite();
    for (std::size_t k : idx) {
      const double v = mu.values[static_cast<Eigen::Index>(k)];
      if (!(v > 0.0)) {
        positive = false;
        break;
      }
      const double rr = d.radius(k);
      xs.push_back(std::pow(rr, p.sigma));
      ys.push_back(std::log(v) - i.delta * std::pow(rr, ap));
    }
    if (positive) {
      const LineFit lf = least_squares(xs, ys);
      fit.slope = lf.slope;
      fit.intercept = lf.intercept;
      fit.pass = fit.slope >= fit.floor - 0.05 * fit.floor - 1e-9;
    } else {
      fit.slope = std::numeric_limits<double>::quiet_NaN();
    }
    rep.fits.push_back(fit);
  }
  rep.pass = !rep.fits.empty() &&
             std::all_of(rep.fits.begin(), rep.fits.end(), [](const SlopeFit& f) { return f.pass; });
  return rep;
}

DecayFloorReport verify_decay_floor(const EvolutionResult& r, double tau0, double delta) {
  const Field* s = snapshot_at(r, tau0);
  if (s == nullptr) throw precondition_error("verify_decay_floor: no snapshot at tau0");
  DecayFloorReport rep;
  const Field u = to_u(*s);
  if (u.values.abs().maxCoeff() == 0.0) {
    rep.trivial = true;
    rep.note = "trivial solution";
    return rep;
  }
  int shells = 0;
  const std::vector<std::size_t> idx = annulus(r.domain, shells);
  if (shells < 8) throw resolution_error("verify_decay_floor: annulus holds fewer than 8 grid shells");
  std::vector<double> xs, ys;
  for (std::size_t k : idx) {
    const double v = u.values[static_cast<Eigen::Index>(k)];
    if (!(v > 0.0)) {
      rep.note = "nonpositive values on the annulus";
      return rep;
    }
    xs.push_back(r.domain.radius(k));
    ys.push_back(std::log(v));
  }
  const LineFit lf = least_squares(xs, ys);
  rep.rate = lf.slope;
  rep.offset = lf.intercept;
  rep.pass = rep.rate >= -delta;
  return rep;
}

BoundCertificate certify_lemma_non1(const GridDomain& grid, double delta, double alpha, double gamma,
                                    const std::vector<double>& d_candidates) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw domain_error("certify_lemma_non1: alpha must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma < 1.0)) throw domain_error("certify_lemma_non1: gamma must lie in (0, 1)");
  BoundCertificate c;
  c.lemma = Lemma::Non1;
  c.n = grid.n;
  c.delta = delta;
  c.alpha = alpha;
  c.gamma = gamma;
  std::vector<double> ds = d_candidates;
  std::sort(ds.begin(), ds.end());
  c.min_ratio = -kInf;
  for (double dp : ds) {
    Field F = Field::zeros(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.radius(i);
      F.values[static_cast<Eigen::Index>(i)] = std::pow(r, dp) * std::exp(delta * std::pow(r, alpha));
    }
    const Field BF = apply_B_quadrature(F);
    double worst = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid.interior(i)) {
        const Eigen::Index k = static_cast<Eigen::Index>(i);
        worst = std::min(worst, BF.values[k] / F.values[k]);
      }
    c.candidate_ratios.push_back(worst);
    c.min_ratio = std::max(c.min_ratio, worst);
    if (worst >= gamma) {
      c.found = true;
      c.d0 = dp;
      c.min_ratio = worst;
      break;
    }
  }
  return c;
}

BoundCertificate certify_lemma_blower_exp(const GridDomain& grid, double d_pow, double delta, double alpha, double R) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw domain_error("certify_lemma_blower_exp: alpha must lie in [0, 1]");
  if (alpha == 1.0 && delta >= 1.0) throw domain_error("certify_lemma_blower_exp: alpha = 1 needs delta < 1");
  if (!(d_pow >= 0.0) || !(R > 0.0)) throw domain_error("certify_lemma_blower_exp: need d >= 0 and R > 0");
  const int n = grid.n;
  const BesselKernel B(n);
  BoundCertificate c;
  c.lemma = Lemma::BlowerExp;
  c.n = n;
  c.delta = delta;
  c.alpha = alpha;
  c.R = R;
  c.d_pow = d_pow;

  // A larger cut radius only shrinks the left side, so R may be raised to 1.
  const double Re = std::max(R, 1.0);
  const double ad = std::abs(delta);
  auto radial = [&](double r) {
    if (r <= 0.0) return 0.0;
    return B.lower_shape(r) * std::exp(-(r + ad * std::pow(r, alpha))) * std::pow(r, n - 1);
  };
  c.eta1 = sphere_area(n) * gk_split(radial, 4.0 * Re, 4.0 * Re + 80.0, {});
  c.eta2 = sphere_area(n) * gk_split(radial, 0.0, Re, {std::min(1.0, Re)});
  c.lower_constant = lower_constant(n);
  c.eta0 = c.lower_constant * std::min(c.eta1, c.eta2);

  Field F = Field::zeros(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.radius(i);
    if (r >= R) F.values[static_cast<Eigen::Index>(i)] = std::pow(r, d_pow) * std::exp(delta * std::pow(r, alpha));
  }
  const Field BF = apply_B_quadrature(F);
  double worst = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.interior(i)) {
      const double r = grid.radius(i);
      const double rhs = c.eta0 * std::pow(2.0, -d_pow) * std::pow(r, d_pow) * std::exp(delta * std::pow(r, alpha));
      worst = std::min(worst, BF.values[static_cast<Eigen::Index>(i)] / rhs);
    }
  c.min_ratio = worst;
  c.found = worst >= 1.0;
  return c;
}

ComparisonReport check_comparison(const EvolutionResult& u_run, const EvolutionResult& v_run) {
  if (!(u_run.domain == v_run.domain)) throw precondition_error("check_comparison: runs live on different grids");
  ComparisonReport rep;
  rep.max_violation = -kInf;
  for (const Field& u : u_run.snapshots) {
    const Field* v = snapshot_at(v_run, u.t);
    if (v == nullptr) continue;
    ++rep.shared_times;
    const Eigen::ArrayXd diff = to_u(u).values - to_u(*v).values;
    Eigen::Index k = 0;
    const double worst = diff.maxCoeff(&k);
    if (!(worst <= rep.max_violation)) {
      rep.max_violation = worst;
      rep.at_time = u.t;
      rep.at_index = static_cast<std::size_t>(k);
    }
  }
  if (rep.shared_times == 0) throw precondition_error("check_comparison: no shared snapshot times");
  rep.pass = rep.max_violation <= 1e-7;
  return rep;
}

GronwallReport gronwall_decay_check(const Field& w0, const PotentialSpec& p, double t, int N_max) {
  if (!(t >= 0.0)) throw domain_error("gronwall_decay_check: t must be nonnegative");
  if (N_max < 1) throw domain_error("gronwall_decay_check: N_max must be positive");
  if (p.sigma >= 1.0) throw unsupported_regime_error("gronwall_decay_check: requires sigma < 1");
  const GridDomain& d = w0.domain;
  PotentialSpec bar;
  bar.sigma = p.sigma;
  bar.lambda = TimeFactor::constant(p.lambda.sup_abs(t));
  const Eigen::ArrayXd V = bar.V_values(d, 0.0);

  GronwallReport rep;
  Eigen::ArrayXd q = w0.values;
  rep.s.push_back(q.abs().maxCoeff());
  for (int k = 1; k <= N_max; ++k) {
    q = (t / k) * B_spectral_values(d, V * q);
    rep.s.push_back(q.abs().maxCoeff());
  }
  for (std::size_t k = 0; k < rep.s.size(); ++k)
    if (rep.s[k] < 1e-10) {
      rep.first_below = static_cast<int>(k);
      break;
    }
  const auto peak = std::max_element(rep.s.begin(), rep.s.end());
  rep.eventually_decreasing = true;
  for (auto it = peak; it + 1 != rep.s.end(); ++it)
    if (!(*(it + 1) < *it) && !(*it == 0.0 && *(it + 1) == 0.0)) rep.eventually_decreasing = false;
  rep.pass = rep.first_below >= 0;
  return rep;
}

nlohmann::json to_json(const Classification& c) {
  return {{"verdict", to_string(c.verdict)}, {"citation", c.citation}, {"certificate", c.certificate}};
}

nlohmann::json to_json(const BlowupIndicator& b) {
  return {{"radii", b.radii},           {"partials", b.partials},     {"increments", b.increments},
          {"divergent", b.divergent},   {"convergent", b.convergent}, {"datum_positive", b.datum_positive}};
}

nlohmann::json to_json(const LowerBoundReport& r) {
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"t", f.t}, {"slope", f.slope}, {"intercept", f.intercept}, {"floor", f.floor},
                    {"shells", f.shells}, {"pass", f.pass}});
  return {{"fits", fits}, {"pass", r.pass}};
}

nlohmann::json to_json(const DecayFloorReport& r) {
  return {{"rate", r.rate}, {"offset", r.offset}, {"trivial", r.trivial}, {"pass", r.pass}, {"note", r.note}};
}

nlohmann::json to_json(const BoundCertificate& c) {
  nlohmann::json j{{"lemma", c.lemma == Lemma::Non1 ? "Non1" : "BlowerExp"},
                   {"n", c.n},
                   {"delta", c.delta},
                   {"alpha", c.alpha},
                   {"found", c.found},
                   {"min_ratio", c.min_ratio}};
  if (c.lemma == Lemma::Non1) {
    j["gamma"] = c.gamma;
    j["d0"] = c.found ? nlohmann::json(c.d0) : nlohmann::json("not-found");
    j["candidate_ratios"] = c.candidate_ratios;
  } else {
    j["R"] = c.R;
    j["d"] = c.d_pow;
    j["eta0"] = c.eta0;
    j["eta1"] = c.eta1;
    j["eta2"] = c.eta2;
    j["lower_constant"] = c.lower_constant;
  }
  return j;
}

nlohmann::json to_json(const ComparisonReport& r) {
  return {{"pass", r.pass},
          {"max_violation", r.max_violation},
          {"at_time", r.at_time},
          {"at_index", r.at_index},
          {"shared_times", r.shared_times}};
}

nlohmann::json to_json(const GronwallReport& r) {
  return {{"s", r.s}, {"first_below", r.first_below}, {"eventually_decreasing", r.eventually_decreasing},
          {"pass", r.pass}};
}

}  // namespace pplab
