#pragma once

#include <stdexcept>
#include <string>

namespace portlab {

// malformed external input (CSV rows, JSON payloads)
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a value violates a documented invariant (non-simplex weights, high < low, ...)
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// graph / shape / wiring problems detected at construction or binding time
struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// non-convergence, NaN losses, degenerate numerics
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// index or time outside the addressable range
struct range_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad or inconsistent configuration
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// filesystem and network failures
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// transient transport failure; callers may retry
struct network_error : io_error {
  using io_error::io_error;
};

}  // namespace portlab
