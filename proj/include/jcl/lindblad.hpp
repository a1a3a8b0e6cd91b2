#pragma once

// Zero-temperature Lindblad dynamics of the chain,
//   ρ̇ = −i[H, ρ] + Σ_j (γ_c L[a_j] + γ_q L[σ⁻_j]) ρ,
//   L[O]ρ = OρO† − ½{O†O, ρ}.

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "jcl/lattice.hpp"

namespace jcl {

struct DissipationRates {
    double gamma_q = 0.0;
    double gamma_c = 0.0;
    void validate() const;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(Eigen::MatrixXcd m);
    static DensityMatrix pure(const Eigen::VectorXcd& psi);

    std::size_t dim() const { return std::size_t(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    cplx trace() const { return m_.trace(); }
    double trace_deviation() const { return std::abs(m_.trace() - 1.0); }
    double hermiticity_defect() const;
    double min_eigenvalue() const;
    double purity() const;
    /// tr(Aρ) for a sparse A on the same basis.
    cplx expectation(const SparseOperator& a) const;

private:
    Eigen::MatrixXcd m_;
};

struct JumpOperator {
    SparseOperator op;
    double rate = 0.0;
};

enum class KernelPolicy { automatic, serial, parallel };

/// Precomputed generator: K = H − (i/2) Σ γ O†O, then
///   ρ̇ = −i(Kρ − (Kρ)†) + Σ γ O ρ O†,
/// valid for Hermitian ρ. One sparse-dense product for the coherent and
/// anticommutator parts, two per jump for the recycling terms.
class LindbladGenerator {
public:
    LindbladGenerator(const SparseOperator& h, std::vector<JumpOperator> jumps,
                      KernelPolicy policy = KernelPolicy::automatic);

    std::size_t dim() const { return k_.dim(); }
    /// out = L(ρ). Throws std::invalid_argument on a dimension mismatch.
    void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;

private:
    void spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) const;

    SparseOperator k_;
    std::vector<JumpOperator> jumps_;
    KernelPolicy policy_;
    mutable Eigen::MatrixXcd z_, y_, yt_, w_;
};

/// Generator applied once to a Hermitian ρ.
Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const SparseOperator& h, std::span<const JumpOperator> jumps,
                              KernelPolicy policy = KernelPolicy::automatic);

enum class SubspaceMode {
    reachable,  // states with at most one excitation per site in total (Σ N_j <= M)
    full,       // the whole truncated space
};

/// Chain, jump operators and the basis they are represented on.
struct OpenSystem {
    LatticeParams params;
    DissipationRates rates;
    ProductBasis basis;
    SparseOperator hamiltonian;
    std::vector<JumpOperator> jumps;
};

/// Decay never adds excitations, so starting from one excitation per site the
/// dynamics stays inside Σ N_j <= M; `reachable` exploits that (and n_max = M
/// then loses nothing). `full` keeps every state of lp.geometry().
OpenSystem make_open_system(const LatticeParams& lp, const DissipationRates& rates,
                            SubspaceMode mode = SubspaceMode::reachable);

/// ⊗_j |1,−⟩_j on the system basis (or the full space of lp).
DensityMatrix initial_polariton_product(const LatticeParams& lp);
DensityMatrix initial_polariton_product(const LatticeParams& lp, const ProductBasis& basis);

/// Tr(Π₂ ρ), Π₂ = |2,↓⟩⟨2,↓| + |1,↑⟩⟨1,↑| at `site`. Throws std::invalid_argument
/// for n_max < 2 or a bad site.
double p2_expectation(const DensityMatrix& rho, const ProductBasis& basis, int site);
double p2_expectation(const DensityMatrix& rho, const LatticeParams& lp, int site);

class StiffnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationQualityError : public std::runtime_error {
public:
    IntegrationQualityError(const std::string& what, double min_eigenvalue)
        : std::runtime_error(what), min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

struct EvolveOptions {
    /// Per-step local error bound relative to max|ρ_ij|. Purity drift of the
    /// closed system grows linearly with rtol: about 1e-7 over T = 50/g at
    /// 1e-8, about 1e-9 at 1e-10.
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 1e-3;
    /// Smallest admissible step, relative to max(1, t).
    double min_step = 1e-13;
    long max_steps = 200'000'000;
    /// Abort when the smallest eigenvalue of ρ drops below −positivity_limit.
    double positivity_limit = 1e-5;
    bool compute_min_eigenvalue = true;
    KernelPolicy policy = KernelPolicy::automatic;
};

struct DynamicsTrace {
    int sites = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> p2_per_site;  // [sample][site]
    std::vector<double> p2_mean;
    std::vector<double> n_total;
    std::vector<double> trace_dev;
    std::vector<double> hermiticity_defect;
    std::vector<double> min_eigenvalue;
    std::vector<double> purity;
    std::vector<double> energy;
    long steps = 0;
    long rejected = 0;
};

/// Dormand–Prince 5(4) integration from t = 0 to t_final, recording
/// `samples` equally spaced points including both ends. Throws
/// std::invalid_argument, StiffnessError or IntegrationQualityError.
DynamicsTrace evolve(const DensityMatrix& rho0, const OpenSystem& sys, double t_final, int samples,
                     const EvolveOptions& opt = {});

/// Minimum number of samples in [0, T] required by averaged_p2.
inline constexpr int kMinAveragingSamples = 200;

/// (1/T) ∫₀ᵀ P₂(t) dt of the site-averaged P₂ by the trapezoidal rule.
/// Throws std::invalid_argument when T exceeds the trace or fewer than
/// kMinAveragingSamples samples fall in [0, T].
double averaged_p2(const DynamicsTrace& trace, double T);

/// Trapezoidal average of arbitrary samples over [times.front(), T].
double trapezoid_average(std::span<const double> times, std::span<const double> values, double T);

}  // namespace jcl
