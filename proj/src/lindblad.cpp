#include "jcl/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "jcl/kernels.hpp"

namespace jcl {

void DissipationRates::validate() const {
    if (!(gamma_q >= 0.0) || !(gamma_c >= 0.0) || !std::isfinite(gamma_q) || !std::isfinite(gamma_c))
        throw std::invalid_argument("dissipation rates must be finite and >= 0");
}

// ---------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("density matrix must be square");
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) { return DensityMatrix(psi * psi.adjoint()); }

double DensityMatrix::hermiticity_defect() const {
    if (m_.size() == 0) return 0.0;
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    if (m_.size() == 0) return 0.0;
    Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double DensityMatrix::purity() const {
    // tr(ρ²) = Σ_ij ρ_ij ρ_ji; for Hermitian ρ this is Σ |ρ_ij|².
    return (m_.cwiseProduct(m_.transpose())).sum().real();
}

cplx DensityMatrix::expectation(const SparseOperator& a) const {
    if (a.dim() != dim()) throw std::invalid_argument("expectation: dimension mismatch");
    // tr(Aρ) = Σ_(r,c) A_rc ρ_cr
    cplx acc{};
    for (const auto& e : a.entries()) acc += e.value * m_(Eigen::Index(e.col), Eigen::Index(e.row));
    return acc;
}

// ---------------------------------------------------------------- generator

LindbladGenerator::LindbladGenerator(const SparseOperator& h, std::vector<JumpOperator> jumps, KernelPolicy policy)
    : jumps_(std::move(jumps)), policy_(policy) {
    SparseOperator k = h;
    for (const auto& j : jumps_) {
        if (j.op.dim() != h.dim()) throw std::invalid_argument("jump operator dimension mismatch");
        if (!(j.rate >= 0.0)) throw std::invalid_argument("jump rate must be >= 0");
        if (j.rate == 0.0) continue;
        k = k - (j.op.adjoint() * j.op).scaled(cplx(0.0, 0.5 * j.rate));
    }
    k_ = std::move(k);
    std::erase_if(jumps_, [](const JumpOperator& j) { return j.rate == 0.0; });
}

void LindbladGenerator::spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) const {
    switch (policy_) {
        case KernelPolicy::serial: kernels::serial::spmm(a, x, y); break;
        case KernelPolicy::parallel: kernels::parallel::spmm(a, x, y); break;
        default: kernels::spmm(a, x, y); break;
    }
}

void LindbladGenerator::apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    const auto n = Eigen::Index(k_.dim());
    if (rho.rows() != n || rho.cols() != n) throw std::invalid_argument("lindblad: dimension mismatch");
    spmm(k_, rho, z_);
    // −i(Z − Z†)
    out.resize(n, n);
    const cplx mi(0.0, -1.0);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) out(r, c) = mi * (z_(r, c) - std::conj(z_(c, r)));
    for (const auto& j : jumps_) {
        spmm(j.op, rho, y_);  // Oρ
        yt_ = y_.adjoint();   // ρO†
        spmm(j.op, yt_, w_);  // OρO†
        out.noalias() += j.rate * w_;
    }
}

Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const SparseOperator& h, std::span<const JumpOperator> jumps,
                              KernelPolicy policy) {
    if (rho.dim() != h.dim()) throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    LindbladGenerator gen(h, std::vector<JumpOperator>(jumps.begin(), jumps.end()), policy);
    Eigen::MatrixXcd out;
    gen.apply(rho.matrix(), out);
    return out;
}

// ---------------------------------------------------------------- system set-up

namespace {

ProductBasis system_basis(const LatticeParams& lp, SubspaceMode mode) {
    if (mode == SubspaceMode::full) return ProductBasis::full(lp.geometry());
    return ProductBasis::excitation_window(lp.geometry(), 0, lp.sites);
}

}  // namespace

OpenSystem make_open_system(const LatticeParams& lp_in, const DissipationRates& rates, SubspaceMode mode) {
    lp_in.validate();
    rates.validate();
    LatticeParams lp = lp_in;
    if (mode == SubspaceMode::reachable) {
        // Nothing above M local excitations is reachable; keep n_max >= 2 for Π₂.
        lp.n_max = std::max(lp.sites, 2);
    }
    OpenSystem sys{lp, rates, system_basis(lp, mode), {}, {}};
    sys.hamiltonian = lattice_hamiltonian(lp, sys.basis);
    const auto ops = site_operators(lp.n_max);
    const auto g = lp.geometry();
    for (int j = 0; j < lp.sites; ++j) {
        if (rates.gamma_c > 0.0)
            sys.jumps.push_back({assemble(OperatorSum(g).add(1.0, j, ops.a), sys.basis), rates.gamma_c});
        if (rates.gamma_q > 0.0)
            sys.jumps.push_back({assemble(OperatorSum(g).add(1.0, j, ops.sigma_minus), sys.basis), rates.gamma_q});
    }
    return sys;
}

DensityMatrix initial_polariton_product(const LatticeParams& lp) {
    return initial_polariton_product(lp, ProductBasis::full(lp.geometry()));
}

DensityMatrix initial_polariton_product(const LatticeParams& lp, const ProductBasis& basis) {
    lp.validate();
    const int m = basis.geometry().sites;
    if (m != lp.sites) throw std::invalid_argument("initial_polariton_product: basis does not match chain");
    const std::vector<int> n(std::size_t(m), 1);
    const std::vector<Species> s(std::size_t(m), Species::minus);
    return DensityMatrix::pure(polariton_product(n, s, lp.jc, basis));
}

namespace {

std::vector<std::size_t> two_excitation_states(const ProductBasis& basis, int site) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto ls = basis.local_state(i, site);
        if (ls.excitations() == 2) idx.push_back(i);  // |2,↓⟩ or |1,↑⟩
    }
    return idx;
}

double p2_from_indices(const DensityMatrix& rho, const std::vector<std::size_t>& idx) {
    double p = 0.0;
    for (auto i : idx) p += rho.matrix()(Eigen::Index(i), Eigen::Index(i)).real();
    return p;
}

void check_p2(const ProductBasis& basis, int site) {
    const auto g = basis.geometry();
    if (g.n_max < 2) throw std::invalid_argument("P2 projector needs n_max >= 2");
    if (site < 0 || site >= g.sites) throw std::invalid_argument("P2: site out of range");
}

}  // namespace

double p2_expectation(const DensityMatrix& rho, const ProductBasis& basis, int site) {
    check_p2(basis, site);
    if (rho.dim() != basis.size()) throw std::invalid_argument("P2: dimension mismatch");
    return p2_from_indices(rho, two_excitation_states(basis, site));
}

double p2_expectation(const DensityMatrix& rho, const LatticeParams& lp, int site) {
    return p2_expectation(rho, ProductBasis::full(lp.geometry()), site);
}

// ---------------------------------------------------------------- integrator

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b − b̂ (the 7th stage is FSAL)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Recorder {
    const OpenSystem& sys;
    const EvolveOptions& opt;
    DynamicsTrace& tr;
    std::vector<std::vector<std::size_t>> p2_idx;
    SparseOperator n_total;

    Recorder(const OpenSystem& s, const EvolveOptions& o, DynamicsTrace& t) : sys(s), opt(o), tr(t) {
        const int m = sys.params.sites;
        for (int j = 0; j < m; ++j) p2_idx.push_back(two_excitation_states(sys.basis, j));
        n_total = total_excitation_operator(sys.params, sys.basis);
        tr.sites = m;
    }

    void record(double t, const Eigen::MatrixXcd& m) {
        const DensityMatrix rho(m);
        std::vector<double> p2;
        double mean = 0.0;
        for (const auto& idx : p2_idx) {
            p2.push_back(p2_from_indices(rho, idx));
            mean += p2.back();
        }
        mean /= double(p2.size());
        tr.times.push_back(t);
        tr.p2_per_site.push_back(std::move(p2));
        tr.p2_mean.push_back(mean);
        tr.n_total.push_back(rho.expectation(n_total).real());
        tr.trace_dev.push_back(rho.trace_deviation());
        tr.hermiticity_defect.push_back(rho.hermiticity_defect());
        const double lam = opt.compute_min_eigenvalue ? rho.min_eigenvalue() : 0.0;
        tr.min_eigenvalue.push_back(lam);
        tr.purity.push_back(rho.purity());
        tr.energy.push_back(rho.expectation(sys.hamiltonian).real());
        if (lam < -opt.positivity_limit)
            throw IntegrationQualityError("density matrix lost positivity at t=" + std::to_string(t), lam);
    }
};

}  // namespace

DynamicsTrace evolve(const DensityMatrix& rho0, const OpenSystem& sys, double t_final, int samples,
                     const EvolveOptions& opt) {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("evolve: t_final must be > 0");
    if (samples < 2) throw std::invalid_argument("evolve: need at least 2 samples");
    if (rho0.dim() != sys.basis.size()) throw std::invalid_argument("evolve: initial state dimension mismatch");
    if (!(opt.rtol > 0.0) || !(opt.atol >= 0.0)) throw std::invalid_argument("evolve: bad tolerances");

    const LindbladGenerator gen(sys.hamiltonian, sys.jumps, opt.policy);
    DynamicsTrace tr;
    Recorder rec(sys, opt, tr);

    const auto n = Eigen::Index(rho0.dim());
    Eigen::MatrixXcd y = rho0.matrix();
    Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n), tmp(n, n), y5(n, n);

    rec.record(0.0, y);
    gen.apply(y, k1);

    double t = 0.0;
    double h = std::min(opt.initial_step, t_final / double(samples - 1));
    for (int s = 1; s < samples; ++s) {
        // Sample times computed from the index so they do not accumulate roundoff.
        const double t_next = (s == samples - 1) ? t_final : t_final * double(s) / double(samples - 1);
        while (t < t_next) {
            if (tr.steps + tr.rejected >= opt.max_steps) throw StiffnessError("evolve: step budget exhausted");
            bool clipped = false;
            double hs = h;
            if (t + hs >= t_next) {
                hs = t_next - t;
                clipped = true;
            }
            if (hs < opt.min_step * std::max(1.0, t))
                throw StiffnessError("evolve: step size underflow at t=" + std::to_string(t));

            tmp = y + hs * (a21 * k1);
            gen.apply(tmp, k2);
            tmp = y + hs * (a31 * k1 + a32 * k2);
            gen.apply(tmp, k3);
            tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            gen.apply(tmp, k4);
            tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            gen.apply(tmp, k5);
            tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            gen.apply(tmp, k6);
            y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            gen.apply(y5, k7);

            tmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double scale = std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
            const double err = tmp.cwiseAbs().maxCoeff() / (opt.atol + opt.rtol * scale);
            if (!std::isfinite(err)) throw StiffnessError("evolve: non-finite state");

            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                t = clipped ? t_next : t + hs;
                y.swap(y5);
                k1.swap(k7);
                ++tr.steps;
                // A clipped step says nothing about the natural step size.
                if (!clipped || fac < 1.0) h = hs * fac;
            } else {
                ++tr.rejected;
                h = hs * std::min(fac, 1.0);
            }
        }
        rec.record(t_next, y);
    }
    return tr;
}

double trapezoid_average(std::span<const double> times, std::span<const double> values, double T) {
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("trapezoid_average: need matching samples");
    const double t0 = times.front();
    if (!(T > t0)) throw std::invalid_argument("trapezoid_average: empty interval");
    if (T > times.back() * (1.0 + 1e-12)) throw std::invalid_argument("trapezoid_average: T beyond last sample");
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double ta = times[i - 1];
        if (ta >= T) break;
        const double tb = std::min(times[i], T);
        // Linear interpolation inside the last (possibly partial) interval.
        const double w = (tb - ta) / (times[i] - ta);
        const double vb = values[i - 1] + w * (values[i] - values[i - 1]);
        acc += 0.5 * (values[i - 1] + vb) * (tb - ta);
    }
    return acc / (T - t0);
}

double averaged_p2(const DynamicsTrace& trace, double T) {
    if (trace.times.empty()) throw std::invalid_argument("averaged_p2: empty trace");
    const auto inside = std::count_if(trace.times.begin(), trace.times.end(), [T](double t) { return t <= T; });
    if (inside < kMinAveragingSamples)
        throw std::invalid_argument("averaged_p2: at least " + std::to_string(kMinAveragingSamples) +
                                    " samples in [0, T] required");
    return trapezoid_average(trace.times, trace.p2_mean, T);
}

}  // namespace jcl
