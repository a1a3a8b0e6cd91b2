#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "jcl/lanczos.hpp"
#include "jcl/lattice.hpp"

namespace jcl {

enum class EigenSolverKind { automatic, dense, lanczos };

struct GroundStateOptions {
    EigenSolverKind solver = EigenSolverKind::automatic;
    /// automatic uses dense diagonalization up to this sector dimension.
    std::size_t dense_limit = 512;
    LanczosOptions lanczos{};
    /// Ground state flagged near-degenerate when E_1 − E_0 < this · g.
    double degeneracy_tol = 1e-8;
    /// Seed of the iterative solver's start vector.
    std::uint64_t seed = kDefaultStartSeed;
};

/// Lowest-energy state inside one excitation-number sector.
struct SectorGroundState {
    LatticeParams params;
    int n_total = 0;
    std::shared_ptr<const SectorBasis> basis;
    double energy = 0.0;
    Eigen::VectorXcd amplitudes;  // over *basis, unit norm
    double residual = 0.0;        // ‖Hv − Ev‖
    double h_norm = 0.0;          // ‖H‖_∞ of the sector block
    double gap = 0.0;             // E_1 − E_0 (Ritz estimate for Lanczos); +inf for dim 1
    bool near_degenerate = false;
    EigenSolverKind solver_used = EigenSolverKind::dense;
};

/// Works with n_max = n_total whatever lp.n_max says (exact for the sector).
/// Throws std::invalid_argument for an empty sector, ConvergenceError when
/// the iterative solver fails.
SectorGroundState sector_ground_state(const LatticeParams& lp, int n_total, const GroundStateOptions& opt = {});

/// ⟨N_j⟩ and ⟨N_j²⟩ − ⟨N_j⟩² in the state (site is 0-based).
double excitation_mean(const SectorGroundState& gs, int site);
double excitation_variance(const SectorGroundState& gs, int site);

/// 0-based index of the central site ⌈M/2⌉ (1-based).
int central_site(int sites);

/// Weight of the state outside the span of products ⊗_j |n_j,−⟩.
double species_leakage(const SectorGroundState& gs);

}  // namespace jcl
