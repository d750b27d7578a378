#pragma once

#include <stdexcept>
#include <string>

namespace lagsym {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector/matrix size does not match the declared dimension.
struct DimensionError : Error {
  using Error::Error;
};

/// A point failed a domain predicate, or a map was evaluated outside its domain.
struct DomainError : Error {
  using Error::Error;
};

/// Rank of a differential dropped below the requested tolerance.
struct CriticalPointError : Error {
  using Error::Error;
};

/// A finite-difference stencil straddles the seam of a piecewise map.
struct SeamError : Error {
  using Error::Error;
};

/// An iterative solver (Newton, Gauss-Newton, continuation) did not converge.
struct ConvergenceError : Error {
  using Error::Error;
};

/// Mismatched group element kind, unknown model or suite name, bad config.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace lagsym
