#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jcl/hilbert.hpp"
#include "jcl/polariton.hpp"

namespace jcl {

/// Uniform open chain of Jaynes-Cummings sites.
struct LatticeParams {
    int sites = 2;
    Coupling coupling = Coupling::qubit_qubit;
    double J = 0.0;
    JCParams jc{};
    int n_max = 2;

    ChainGeometry geometry() const { return {sites, n_max}; }
    /// Throws std::invalid_argument unless sites >= 1, J >= 0, n_max >= 1, g > 0.
    void validate() const;
};

/// ω_q σ⁺σ⁻ + ω_c a†a + g(a†σ⁻ + aσ⁺) on SiteBasis(n_max).
SparseOperator site_hamiltonian(const JCParams& p, int n_max);

/// Σ_j H_JC,j.
OperatorSum onsite_terms(const LatticeParams& lp);
/// J Σ_{j<M−1} (σ⁺_j σ⁻_{j+1} + h.c.) for QQ, J Σ (a†_j a_{j+1} + h.c.) for CC.
OperatorSum hopping_terms(const LatticeParams& lp);
OperatorSum lattice_terms(const LatticeParams& lp);

/// Full-space chain Hamiltonian.
SparseOperator lattice_hamiltonian(const LatticeParams& lp);
/// Chain Hamiltonian restricted to `basis`.
SparseOperator lattice_hamiltonian(const LatticeParams& lp, const ProductBasis& basis);

/// N_j = a†_j a_j + σ⁺_j σ⁻_j. Throws std::invalid_argument for a bad site.
SparseOperator excitation_operator(const LatticeParams& lp, int site);
SparseOperator excitation_operator(const LatticeParams& lp, int site, const ProductBasis& basis);
/// Σ_j N_j.
SparseOperator total_excitation_operator(const LatticeParams& lp);
SparseOperator total_excitation_operator(const LatticeParams& lp, const ProductBasis& basis);

/// Same as embed(op, site, lp.geometry()).
SparseOperator embed(const SparseOperator& op, int site, const LatticeParams& lp);

/// Numerically diagonalized single-site polariton.
struct SitePolariton {
    int n = 0;
    Species species = Species::minus;
    double energy = 0.0;
    Eigen::VectorXcd vector;  // on SiteBasis(n_max)
};

/// Diagonalizes H_JC numerically inside each excitation block n = 0..n_max
/// (the truncated |n_max,↑⟩ state is left out). Phases are fixed so that the
/// |n,↓⟩ component of |n,−⟩ and the |n−1,↑⟩ component of |n,+⟩ are real and
/// nonnegative. Ordered by n, then species (−, +); n = 0 has only one entry.
std::vector<SitePolariton> site_polaritons(const JCParams& p, int n_max);

/// Closed-form |n,α⟩ on SiteBasis(n_max), built from the mixing angle.
Eigen::VectorXcd polariton_state(int n, Species s, const JCParams& p, int n_max);

/// ⊗_j |n_j, α_j⟩ restricted to `basis` (components outside are dropped).
Eigen::VectorXcd polariton_product(const std::vector<int>& n, const std::vector<Species>& species,
                                   const JCParams& p, const ProductBasis& basis);

}  // namespace jcl
