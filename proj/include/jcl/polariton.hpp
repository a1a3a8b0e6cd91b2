#pragma once

// Closed-form single-site Jaynes-Cummings analytics: polariton energies and
// mixing angles, σ⁺ / a† expansions in the polariton basis, the two-polariton
// repulsion, effective inter-site couplings and RWA phase frequencies.
//
// Polariton states, θ_n the mixing angle:
//   |n,−⟩ = cos θ_n |n,↓⟩ − sin θ_n |n−1,↑⟩
//   |n,+⟩ = sin θ_n |n,↓⟩ + cos θ_n |n−1,↑⟩
// with θ_0 := 0 so that |0,−⟩ ≡ |0,↓⟩ and every |0,+⟩ coefficient vanishes.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcl {

/// Single-site parameters (ħ = 1). Detuning is always derived.
struct JCParams {
    double omega_q = 0.0;
    double omega_c = 0.0;
    double g = 1.0;

    double detuning() const { return omega_q - omega_c; }
    /// Throws std::invalid_argument unless g > 0.
    void validate() const;

    static JCParams from_detuning(double detuning, double g = 1.0, double omega_c = 0.0) {
        return {omega_c + detuning, omega_c, g};
    }
};

enum class Species { minus = 0, plus = 1 };
inline constexpr std::array<Species, 2> kSpecies{Species::minus, Species::plus};

enum class Coupling { qubit_qubit, cavity_cavity };

std::string to_string(Coupling c);
/// Accepts "qq"/"cc" (case-insensitive). Throws std::invalid_argument.
Coupling parse_coupling(const std::string& s);

/// Indexed [α][β], α the species of |n,α⟩ and β the species of |n+1,β⟩.
using CoeffMatrix = std::array<std::array<double, 2>, 2>;

inline double at(const CoeffMatrix& m, Species alpha, Species beta) {
    return m[std::size_t(alpha)][std::size_t(beta)];
}

/// E_{n,±} = nω_c + Δ/2 ± √(n g² + Δ²/4); E_0 = 0 for either species.
double polariton_energy(int n, Species s, const JCParams& p);

/// θ_n = ½ atan2(g√n, Δ/2): 0 → π/4 as Δ goes +∞ → 0, (π/4, π/2) for Δ < 0.
double mixing_angle(int n, const JCParams& p);

/// s_{nαβ} = ⟨n+1,β|σ⁺|n,α⟩.
CoeffMatrix hop_coeffs_qubit(int n, const JCParams& p);

/// t_{nαβ} = ⟨n+1,β|a†|n,α⟩.
CoeffMatrix hop_coeffs_cavity(int n, const JCParams& p);

/// δ = E_{2,−} − 2E_{1,−}.
double effective_repulsion(const JCParams& p);

/// |J s_{0−−} s_{1−−}| for QQ chains, J t_{0−−} t_{1−−} for CC chains.
double effective_coupling(double J, const JCParams& p, Coupling kind);

class NoCrossingError : public std::runtime_error {
public:
    NoCrossingError(double lo, double hi, double f_lo, double f_hi);
    double lo, hi;      // search interval (units of g)
    double f_lo, f_hi;  // δ − J_eff at the endpoints
};

/// Smallest Δ ≥ 0 where δ(Δ) = J_eff(Δ), by bisection on [0, 10³ g] to a
/// relative tolerance of 1e-10. Returns 0 when J_eff already exceeds δ at
/// resonance. `p.omega_q` is ignored (Δ is the free variable).
/// Throws NoCrossingError if δ − J_eff stays positive up to the upper end,
/// std::invalid_argument for J <= 0.
double crossing_detuning(double J, const JCParams& p, Coupling kind, double delta_max_in_g = 1e3);

/// Interaction-picture frequency (E_{n+1,β} − E_{n,α}) − (E_{n′+1,β′} − E_{n′,α′})
/// of the hopping term |n+1,β⟩⟨n,α| ⊗ |n′,α′⟩⟨n′+1,β′|.
double rwa_phase_frequency(int n, int n_prime, Species alpha, Species alpha_prime, Species beta,
                           Species beta_prime, const JCParams& p);

struct PolaritonTable {
    JCParams params;
    double J = 0.0;
    std::vector<double> theta;    // n = 0..n_max
    std::vector<double> e_minus;  // E_{n,−}
    std::vector<double> e_plus;   // E_{n,+}
    std::vector<CoeffMatrix> s;   // n = 0..n_max
    std::vector<CoeffMatrix> t;
    double delta_rep = 0.0;
    double j_eff_qq = 0.0;
    double j_eff_cc = 0.0;
};

PolaritonTable make_polariton_table(const JCParams& p, int n_max, double J);

}  // namespace jcl
