#pragma once

#include <stdexcept>
#include <string>

namespace consensus {

/// Degenerate input the geometry kernel cannot resolve (e.g. a facet that
/// does not span its hyperplane).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A message payload that does not match the receiving algorithm.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An agent left its safe interval; raised by the matrix reconstruction.
class SafenessViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No convergence theorem matches the requested scenario.
class UnsupportedScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monte Carlo acceptance rate too low for a meaningful estimate.
class OracleUnreliable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace consensus
