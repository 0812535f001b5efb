#pragma once

#include <stdexcept>
#include <string>

namespace jcr {

// Co-located nodes, empty null spaces from collapsed geometry, and similar.
struct DegenerateGeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A requested constraint set cannot be satisfied (e.g. more orthogonal
// waveforms than snapshots, or a nulling constraint with no null space).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gaussian randomization found no feasible rank-1 candidate.
struct ExtractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training loss became NaN/inf.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace jcr
