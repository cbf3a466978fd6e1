#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>

#include "pplab/analysis.hpp"
#include "pplab/config.hpp"

namespace pplab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int truncated = 2;
inline constexpr int diverged = 3;
inline constexpr int check_failed = 1;
inline constexpr int no_global = 10;
inline constexpr int instantaneous = 11;
inline constexpr int complete = 12;
inline constexpr int undetermined = 20;
inline constexpr int usage = 64;
inline constexpr int budget = 65;
}  // namespace exit_code

struct CliOptions {
  std::optional<std::string> out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool force_unsafe = false;
};

inline constexpr std::size_t scan_cell_budget = 10000;

int verdict_exit_code(Verdict v);

// Library errors propagate; the CLI front end maps them to exit codes.
int cmd_solve(const RunConfig& cfg, const CliOptions& o, std::ostream& out);
int cmd_classify(const RunConfig& cfg, const CliOptions& o, std::ostream& out);
int cmd_scan(const RunConfig& cfg, const CliOptions& o, std::ostream& out);
int cmd_verify(const std::string& suite, const CliOptions& o, std::ostream& out);
int cmd_kernel_table(int n, double r_min, double r_max, int count, const CliOptions& o, std::ostream& out);

bool known_suite(const std::string& suite);
// {"suite", "seed", "checks": [{"name", "pass", ...}], "pass"}
nlohmann::json run_verify_suite(const std::string& suite, std::uint64_t seed);

}  // namespace pplab
