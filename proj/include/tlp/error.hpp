#pragma once

#include <stdexcept>

namespace tlp {

// Bad inputs detected before any work starts.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed text input; message carries the line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundsError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// A metric whose defining formula has a zero denominator (or a single-class
// input). Raised instead of returning a sentinel value.
struct UndefinedMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver left its convergence region (Katz series, gradient descent).
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedHorizonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tlp
