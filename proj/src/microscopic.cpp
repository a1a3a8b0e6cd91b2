#include "jcl/microscopic.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

namespace jcl {

double SpinEnsembleParams::g_collective() const {
    double s = 0.0;
    for (double g : couplings) s += g * g;
    return std::sqrt(s);
}

double SpinEnsembleParams::g_bar() const { return g_collective() / std::sqrt(double(spins())); }

void SpinEnsembleParams::validate() const {
    if (couplings.empty()) throw std::invalid_argument("spin ensemble needs at least one spin");
    if (!(g_collective() > 0.0)) throw std::invalid_argument("spin ensemble needs a nonzero coupling");
}

SpinEnsembleParams SpinEnsembleParams::uniform(int n, double g_each, double omega_q, double omega_c) {
    return {omega_q, omega_c, std::vector<double>(std::size_t(std::max(n, 0)), g_each)};
}

namespace {

void check_capacity(const SpinEnsembleParams& p) {
    if (p.spins() + 1 > SpinEnsembleParams::kMaxQubits)
        throw CapacityError("spin ensemble of " + std::to_string(p.spins()) + " spins exceeds the " +
                            std::to_string(SpinEnsembleParams::kMaxQubits) + "-qubit exact limit");
}

std::size_t ensemble_dim(const SpinEnsembleParams& p) { return std::size_t(1) << p.spins(); }

}  // namespace

SparseOperator spin_ensemble_hamiltonian(const SpinEnsembleParams& p) {
    // Vanishing couplings are allowed here (free Hamiltonian), unlike for the collective mode.
    if (p.couplings.empty()) throw std::invalid_argument("spin ensemble needs at least one spin");
    check_capacity(p);
    const int n = p.spins();
    const std::size_t qubit_bit = std::size_t(1) << n;
    const std::size_t dim = qubit_bit << 1;
    std::vector<Entry> e;
    for (std::size_t s = 0; s < dim; ++s) {
        const bool qubit_up = (s & qubit_bit) != 0;
        const int spins_up = std::popcount(s & (qubit_bit - 1));
        const double diag = (qubit_up ? p.omega_q : 0.0) + p.omega_c * spins_up;
        e.push_back({s, s, diag});
        if (!qubit_up) continue;
        // g_k τ⁺_k σ⁻ takes |↑; k down⟩ to |↓; k up⟩, plus the conjugate.
        for (int k = 0; k < n; ++k) {
            const std::size_t bit = std::size_t(1) << k;
            if (s & bit) continue;
            const std::size_t t = (s & ~qubit_bit) | bit;
            const double g = p.couplings[std::size_t(k)];
            if (g == 0.0) continue;
            e.push_back({t, s, g});
            e.push_back({s, t, g});
        }
    }
    return SparseOperator(dim, std::move(e), true);
}

Eigen::VectorXcd apply_collective_raise(const SpinEnsembleParams& p, const Eigen::VectorXcd& psi) {
    const auto dim = ensemble_dim(p);
    if (std::size_t(psi.size()) != dim) throw std::invalid_argument("collective raise: dimension mismatch");
    const double inv = 1.0 / p.g_collective();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    for (std::size_t s = 0; s < dim; ++s) {
        if (psi(Eigen::Index(s)) == cplx{}) continue;
        for (int k = 0; k < p.spins(); ++k) {
            const std::size_t bit = std::size_t(1) << k;
            if (!(s & bit)) out(Eigen::Index(s | bit)) += inv * p.couplings[std::size_t(k)] * psi(Eigen::Index(s));
        }
    }
    return out;
}

Eigen::VectorXcd apply_collective_lower(const SpinEnsembleParams& p, const Eigen::VectorXcd& psi) {
    const auto dim = ensemble_dim(p);
    if (std::size_t(psi.size()) != dim) throw std::invalid_argument("collective lower: dimension mismatch");
    const double inv = 1.0 / p.g_collective();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    for (std::size_t s = 0; s < dim; ++s) {
        if (psi(Eigen::Index(s)) == cplx{}) continue;
        for (int k = 0; k < p.spins(); ++k) {
            const std::size_t bit = std::size_t(1) << k;
            if (s & bit) out(Eigen::Index(s & ~bit)) += inv * p.couplings[std::size_t(k)] * psi(Eigen::Index(s));
        }
    }
    return out;
}

DickeState dicke_state(int n, const SpinEnsembleParams& p) {
    p.validate();
    check_capacity(p);
    if (n < 0 || n > p.spins())
        throw std::invalid_argument("dicke_state: n = " + std::to_string(n) + " outside [0, " +
                                    std::to_string(p.spins()) + "]");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(ensemble_dim(p)));
    v(0) = 1.0;
    for (int k = 1; k <= n; ++k) v = apply_collective_raise(p, v) / std::sqrt(double(k));
    const double norm = v.norm();
    if (norm == 0.0) throw std::invalid_argument("dicke_state: collective state vanishes for these couplings");
    return {v / norm, norm};
}

double commutator_defect(const Eigen::VectorXcd& psi, const SpinEnsembleParams& p) {
    p.validate();
    const double up = apply_collective_raise(p, psi).squaredNorm();
    const double down = apply_collective_lower(p, psi).squaredNorm();
    return up - down - 1.0;
}

double number_defect(const Eigen::VectorXcd& psi, int n) {
    Eigen::VectorXcd r(psi.size());
    for (Eigen::Index s = 0; s < psi.size(); ++s) r(s) = (double(std::popcount(std::uint64_t(s))) - n) * psi(s);
    return r.norm();
}

ReductionReport reduction_error(const SpinEnsembleParams& p, int n_total, double t_final, int samples) {
    p.validate();
    check_capacity(p);
    if (n_total < 1 || n_total > p.spins())
        throw std::invalid_argument("reduction_error: n_total must lie in [1, N]");
    if (!(t_final > 0.0)) throw std::invalid_argument("reduction_error: t_final must be > 0");
    if (samples < 2) throw std::invalid_argument("reduction_error: need at least two samples");

    const int n = p.spins();
    const std::size_t qubit_bit = std::size_t(1) << n;

    // Exact propagation inside the n_total-excitation sector of the spin model.
    std::vector<std::size_t> sector;
    for (std::size_t s = 0; s < (qubit_bit << 1); ++s)
        if (std::popcount(s) == n_total) sector.push_back(s);
    const auto h_full = spin_ensemble_hamiltonian(p);
    const auto ds = Eigen::Index(sector.size());
    Eigen::MatrixXcd h(ds, ds);
    for (Eigen::Index i = 0; i < ds; ++i)
        for (Eigen::Index j = 0; j < ds; ++j) h(i, j) = h_full.element(sector[std::size_t(i)], sector[std::size_t(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);

    // Dicke-tower images of the two JC basis states |n,↓⟩ and |n−1,↑⟩.
    const auto upper = dicke_state(n_total - 1, p);
    Eigen::VectorXcd with_qubit_up = Eigen::VectorXcd::Zero(ds);
    Eigen::VectorXcd with_qubit_down = Eigen::VectorXcd::Zero(ds);
    const auto lower = dicke_state(n_total, p);
    for (Eigen::Index i = 0; i < ds; ++i) {
        const std::size_t s = sector[std::size_t(i)];
        const auto spins = Eigen::Index(s & (qubit_bit - 1));
        if (s & qubit_bit)
            with_qubit_up(i) = upper.vector(spins);
        else
            with_qubit_down(i) = lower.vector(spins);
    }
    const Eigen::VectorXcd psi0 = with_qubit_up;
    const Eigen::VectorXcd c0 = es.eigenvectors().adjoint() * psi0;

    // JC model in {|n,↓⟩, |n−1,↑⟩}.
    const double gc = p.g_collective();
    Eigen::Matrix2d jc;
    jc << n_total * p.omega_c, gc * std::sqrt(double(n_total)), gc * std::sqrt(double(n_total)),
        (n_total - 1) * p.omega_c + p.omega_q;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ej(jc);
    const Eigen::Vector2cd jc0 = ej.eigenvectors().transpose().cast<cplx>() * Eigen::Vector2cd(0.0, 1.0);

    ReductionReport rep;
    rep.dicke_prenorm = upper.prenorm;
    const cplx i_unit(0.0, 1.0);
    for (int k = 0; k < samples; ++k) {
        const double t = t_final * k / (samples - 1);
        Eigen::VectorXcd phase(ds);
        for (Eigen::Index m = 0; m < ds; ++m) phase(m) = std::exp(-i_unit * es.eigenvalues()(m) * t) * c0(m);
        const Eigen::VectorXcd psi_t = es.eigenvectors() * phase;

        Eigen::Vector2cd jphase;
        for (int m = 0; m < 2; ++m) jphase(m) = std::exp(-i_unit * ej.eigenvalues()(m) * t) * jc0(m);
        const Eigen::Vector2cd jc_t = ej.eigenvectors().cast<cplx>() * jphase;
        const Eigen::VectorXcd mapped = jc_t(0) * with_qubit_down + jc_t(1) * with_qubit_up;

        // √(1 − |⟨ψ|χ⟩|²) evaluated as the norm of χ's component orthogonal to ψ,
        // which keeps full absolute accuracy when the states nearly coincide.
        const Eigen::VectorXcd orth = mapped - psi_t.dot(mapped) * psi_t;
        const double err = orth.norm();
        rep.times.push_back(t);
        rep.errors.push_back(err);
        rep.max_error = std::max(rep.max_error, err);
    }
    return rep;
}

}  // namespace jcl
