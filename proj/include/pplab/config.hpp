#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pplab/evolution.hpp"
#include "pplab/grid.hpp"
#include "pplab/potential.hpp"

namespace pplab {

struct ScanSpec {
  std::vector<double> sigma;
  std::vector<double> Lambda0;
  TimeFactor::Kind family = TimeFactor::Kind::constant;
  double nu = 0.0;
  double R0 = 0.0;
  PotentialMode mode = PotentialMode::exact_power;
  std::size_t cells() const { return sigma.size() * Lambda0.size(); }
};

struct RunConfig {
  GridDomain grid{1, 20.0, 256};
  PotentialSpec potential;
  std::optional<ConvectionSpec> convection;
  InitialSpec initial;
  SeriesParams series;
  std::string method = "auto";  // auto | autonomous | picard | convection
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv"};
  std::uint64_t seed = 0;
  double horizon = std::numeric_limits<double>::infinity();
  std::optional<ScanSpec> scan;
};

// Schema-checked parse; unknown keys and type mismatches raise config_error carrying the line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace pplab
