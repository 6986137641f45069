#pragma once

#include <stdexcept>
#include <string>

namespace aoilq {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix shapes are incompatible with the requested operation.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// An input contains NaN or infinity.
struct NonFinite : Error {
  using Error::Error;
};

/// The game Riccati equation has no stabilizing positive-semidefinite
/// solution (ill-posed game).
struct NoStabilizingSolution : Error {
  using Error::Error;
};

struct NonPositiveStep : Error {
  using Error::Error;
};

/// Age-cost table growth hit the hard memory cap.
struct CapacityExceeded : Error {
  using Error::Error;
};

/// The threshold equation has no solution below the table capacity.
struct TableExhausted : Error {
  using Error::Error;
};

/// Value-iteration state truncation is too small: the greedy policy never
/// senses below the cap.
struct TruncationTooSmall : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

/// Multiplier bracket collapsed onto a single threshold with neither rate
/// matching the budget.
struct DegenerateBracket : Error {
  using Error::Error;
};

/// Simulated state exceeded the divergence guard.
struct Diverged : Error {
  using Error::Error;
};

/// Policy and simulation were built for different sensing grids.
struct ConfigMismatch : Error {
  using Error::Error;
};

/// Configuration file is malformed or violates a model invariant.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace aoilq
