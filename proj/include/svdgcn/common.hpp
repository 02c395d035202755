#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace svdgcn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Malformed input data (bad edge-list line, inconsistent CSV row, ...).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Missing or unreadable/unwritable file or directory.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad probability, epochs = 0, spectral argument
/// outside the modulation domain after exponent resolution, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape mismatch between operands.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical routine failed (SVD non-convergence, power-iteration stall).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation called on an operator-bank or model variant that does not
/// support it (e.g. reconstruction on a Chebyshev bank).
struct VariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace svdgcn
