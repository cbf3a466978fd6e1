#pragma once

#include <stdexcept>
#include <string>

namespace pplab {

// Argument outside the mathematical domain of a function (r <= 0, rho <= 0, ...).
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct unsupported_order_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct precondition_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Raised for sigma >= 1 where the exponential-series construction is not available.
struct unsupported_regime_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct envelope_divergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct resolution_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// O(M^{2n}) backends refuse large grids unless forced.
struct cost_guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
  config_error(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace pplab
