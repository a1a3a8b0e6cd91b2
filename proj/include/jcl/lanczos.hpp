#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "jcl/sparse.hpp"

namespace jcl {

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual(last_residual) {}
    double last_residual;
};

struct LanczosOptions {
    int krylov_dim = 80;   // vectors per cycle before an explicit restart
    int max_cycles = 60;
    /// Converged when ‖Hx − θx‖ <= rel_tol · ‖H‖_∞.
    double rel_tol = 1e-12;
    /// Residual accepted as a fallback when rel_tol cannot be reached.
    double accept_tol = 1e-9;
};

struct LanczosResult {
    double value = 0.0;
    Eigen::VectorXcd vector;
    double residual = 0.0;           // explicit ‖Hx − θx‖
    std::vector<double> ritz_values;  // of the last cycle, ascending
    int matvecs = 0;
};

/// Lowest eigenpair of a Hermitian operator by restarted Lanczos with full
/// reorthogonalization. Throws ConvergenceError carrying the last residual.
LanczosResult lanczos_ground_state(const SparseOperator& h, const Eigen::VectorXcd& start,
                                   const LanczosOptions& opt = {});

inline constexpr std::uint64_t kDefaultStartSeed = 0x9e3779b97f4a7c15ULL;

/// Unit vector with equal magnitudes and fixed pseudo-random phases.
Eigen::VectorXcd deterministic_start_vector(std::size_t dim, std::uint64_t seed = kDefaultStartSeed);

}  // namespace jcl
