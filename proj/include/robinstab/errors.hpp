#pragma once

#include <stdexcept>
#include <string>

namespace robinstab {

/// No sign change over [lo, hi] handed to a bracketed root solve.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mesh generation could not reach the requested element quality.
struct MeshQualityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Eigen-iteration did not converge within its budget.
struct SolverError : std::runtime_error {
    double best_residual;
    SolverError(const std::string& msg, double res)
        : std::runtime_error(msg), best_residual(res) {}
};

/// Eigenvalue cluster boundaries could not be decided at the gap threshold.
struct ClusterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed domain/mesh file.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace robinstab
