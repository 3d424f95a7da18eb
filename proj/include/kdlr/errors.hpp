#pragma once

#include <stdexcept>
#include <string>

namespace kdlr {

/// Invalid configuration: bad grid bounds, malformed config files, incompatible inputs.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Runtime numerical failure: singular local systems, Krylov non-convergence,
/// field values escaping the tabulated range.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace kdlr
