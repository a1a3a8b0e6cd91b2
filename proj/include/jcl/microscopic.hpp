#pragma once

// Exact model of N two-level spins coupled (inhomogeneously) to one qubit,
//   H = ω_q σ⁺σ⁻ + ω_c Σ_k τ⁺_k τ⁻_k + Σ_k (g_k τ⁺_k σ⁻ + h.c.),
// used as ground truth for the collective bosonic mode a† = g⁻¹ Σ_k g_k τ⁺_k.
//
// State indexing: bit k (k < N) is spin k, bit N is the qubit; set = up.
// Ensemble-only vectors use the low N bits (dimension 2^N).

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "jcl/sparse.hpp"

namespace jcl {

class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

struct SpinEnsembleParams {
    double omega_q = 0.0;
    double omega_c = 0.0;
    std::vector<double> couplings;

    /// Total qubit count N+1 allowed for exact treatment.
    static constexpr int kMaxQubits = 16;

    int spins() const { return int(couplings.size()); }
    /// √(Σ_k |g_k|²), the collective coupling.
    double g_collective() const;
    /// Root mean square of the g_k.
    double g_bar() const;
    /// Throws std::invalid_argument for an empty or all-zero coupling list.
    void validate() const;

    static SpinEnsembleParams uniform(int n, double g_each, double omega_q = 0.0, double omega_c = 0.0);
};

/// Throws CapacityError when N+1 > kMaxQubits. All-zero couplings are allowed.
SparseOperator spin_ensemble_hamiltonian(const SpinEnsembleParams& p);

/// Collective raising operator a† on the ensemble space (2^N).
Eigen::VectorXcd apply_collective_raise(const SpinEnsembleParams& p, const Eigen::VectorXcd& psi);
/// Collective lowering operator a on the ensemble space.
Eigen::VectorXcd apply_collective_lower(const SpinEnsembleParams& p, const Eigen::VectorXcd& psi);

struct DickeState {
    Eigen::VectorXcd vector;  // ensemble space, unit norm
    /// ‖(a†)ⁿ|0⟩/√n!‖ before renormalization; 1 for uniform couplings at n ≤ 1,
    /// below 1 once the low-polarization approximation is strained.
    double prenorm = 1.0;
};

/// (a†)ⁿ|0⟩/√n!, renormalized. Throws std::invalid_argument unless 0 <= n <= N.
DickeState dicke_state(int n, const SpinEnsembleParams& p);

/// ⟨ψ|[a, a†]|ψ⟩ − 1 for a unit-norm ensemble state. Lies in [−2, 0].
double commutator_defect(const Eigen::VectorXcd& psi, const SpinEnsembleParams& p);

/// ‖(Σ_k τ⁺_k τ⁻_k − n)ψ‖ for an ensemble state.
double number_defect(const Eigen::VectorXcd& psi, int n);

struct ReductionReport {
    std::vector<double> times;
    std::vector<double> errors;  // trace distance at each time
    double max_error = 0.0;
    double dicke_prenorm = 1.0;  // of the initial Dicke state
};

/// Starts from |↑⟩ ⊗ |D_{n_total−1}⟩ and propagates (i) exactly under the spin
/// Hamiltonian and (ii) under the JC model with g = g_collective. The JC state
/// is mapped back through |n,↓⟩ → |↓⟩|D_n⟩, |n−1,↑⟩ → |↑⟩|D_{n−1}⟩, and the
/// error is the pure-state trace distance √(1 − |⟨ψ_exact|ψ_JC⟩|²), so weight
/// leaking into dark modes counts in full.
ReductionReport reduction_error(const SpinEnsembleParams& p, int n_total, double t_final, int samples);

}  // namespace jcl
