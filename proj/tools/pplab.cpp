#include <CLI11.hpp>
#include <iostream>

#include "pplab/commands.hpp"
#include "pplab/errors.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  int jobs = 1;
  std::int64_t seed = -1;
  bool force_unsafe = false;

  pplab::CliOptions options() const {
    pplab::CliOptions o;
    if (!out.empty()) o.out_dir = out;
    o.jobs = jobs;
    if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
    o.force_unsafe = force_unsafe;
    return o;
  }
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "JSON run configuration");
  if (needs_config) opt->required();
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "seed for randomized checks")->check(CLI::NonNegativeNumber);
  sub->add_flag("--force-unsafe", c.force_unsafe, "skip regime and membership preconditions");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudoparabolic solver and verification lab"};
  app.require_subcommand(1);

  Common common;
  auto* solve = app.add_subcommand("solve", "run the series or Picard solver");
  add_common(solve, common, true);
  auto* classify = app.add_subcommand("classify", "classify an instance");
  add_common(classify, common, true);
  auto* scan = app.add_subcommand("scan", "classify a (sigma, Lambda0) grid");
  add_common(scan, common, true);
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, common, false);
  std::string suite = "all";
  verify->add_option("suite", suite, "kernel | operators | comparison | lower-bound | all");
  auto* table = app.add_subcommand("kernel-table", "dump kernel values and bounds as CSV");
  add_common(table, common, false);
  int n = 1, count = 100;
  double r_min = 1e-3, r_max = 30.0;
  table->add_option("--n", n, "dimension")->check(CLI::Range(1, 3));
  table->add_option("--rmin", r_min, "smallest radius");
  table->add_option("--rmax", r_max, "largest radius");
  table->add_option("--count", count, "number of log-spaced radii");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pplab::exit_code::usage;
  }

  const pplab::CliOptions opts = common.options();
  try {
    if (*verify) {
      if (!pplab::known_suite(suite)) {
        std::cerr << "unknown suite '" << suite << "'\n";
        return pplab::exit_code::usage;
      }
      return pplab::cmd_verify(suite, opts, std::cout);
    }
    if (*table) return pplab::cmd_kernel_table(n, r_min, r_max, count, opts, std::cout);

    const pplab::RunConfig cfg = pplab::load_config(common.config);
    if (*solve) return pplab::cmd_solve(cfg, opts, std::cout);
    if (*classify) return pplab::cmd_classify(cfg, opts, std::cout);
    if (*scan) {
      const int code = pplab::cmd_scan(cfg, opts, std::cout);
      if (code == pplab::exit_code::budget) std::cerr << "scan exceeds the cell budget\n";
      return code;
    }
  } catch (const pplab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pplab::exit_code::usage;
  } catch (const pplab::unsupported_regime_error& e) {
    std::cerr << "unsupported regime: " << e.what() << "\n";
    return pplab::exit_code::usage;
  } catch (const pplab::precondition_error& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return pplab::exit_code::usage;
  } catch (const pplab::domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return pplab::exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return pplab::exit_code::usage;
}
