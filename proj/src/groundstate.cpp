#include "jcl/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace jcl {

SectorGroundState sector_ground_state(const LatticeParams& lp_in, int n_total, const GroundStateOptions& opt) {
    lp_in.validate();
    if (n_total < 0) throw std::invalid_argument("sector_ground_state: negative excitation number");
    // The sector cannot populate Fock states above n_total, so this truncation is exact.
    LatticeParams lp = lp_in;
    lp.n_max = std::max(n_total, 1);
    auto basis = std::make_shared<const SectorBasis>(lp.geometry(), n_total);
    if (basis->size() == 0)
        throw std::invalid_argument("sector_ground_state: no states with " + std::to_string(n_total) +
                                    " excitations");

    const auto h = lattice_hamiltonian(lp, *basis);
    SectorGroundState gs;
    gs.params = lp;
    gs.n_total = n_total;
    gs.basis = basis;
    gs.h_norm = h.inf_norm();

    const bool dense = opt.solver == EigenSolverKind::dense ||
                       (opt.solver == EigenSolverKind::automatic && basis->size() <= opt.dense_limit);
    if (dense) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
        if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0);
        gs.energy = es.eigenvalues()(0);
        gs.amplitudes = es.eigenvectors().col(0);
        gs.gap = es.eigenvalues().size() > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0)
                                             : std::numeric_limits<double>::infinity();
        gs.solver_used = EigenSolverKind::dense;
    } else {
        const auto r = lanczos_ground_state(h, deterministic_start_vector(basis->size(), opt.seed), opt.lanczos);
        gs.energy = r.value;
        gs.amplitudes = r.vector;
        gs.gap = r.ritz_values.size() > 1 ? r.ritz_values[1] - r.ritz_values[0]
                                          : std::numeric_limits<double>::infinity();
        gs.solver_used = EigenSolverKind::lanczos;
    }
    // Fix the global phase: largest component real and positive.
    Eigen::Index imax = 0;
    gs.amplitudes.cwiseAbs().maxCoeff(&imax);
    const cplx ref = gs.amplitudes(imax);
    gs.amplitudes *= std::conj(ref) / std::abs(ref);

    gs.residual = (h.apply(gs.amplitudes) - gs.energy * gs.amplitudes).norm();
    gs.near_degenerate = gs.gap < opt.degeneracy_tol * lp.jc.g;
    return gs;
}

namespace {

void check_site(const SectorGroundState& gs, int site) {
    if (site < 0 || site >= gs.params.sites)
        throw std::invalid_argument("site " + std::to_string(site) + " out of range");
}

}  // namespace

double excitation_mean(const SectorGroundState& gs, int site) {
    check_site(gs, site);
    double mean = 0.0;
    for (std::size_t i = 0; i < gs.basis->size(); ++i)
        mean += std::norm(gs.amplitudes(Eigen::Index(i))) * gs.basis->excitations(i, site);
    return mean;
}

double excitation_variance(const SectorGroundState& gs, int site) {
    const double mean = excitation_mean(gs, site);
    double var = 0.0;
    for (std::size_t i = 0; i < gs.basis->size(); ++i) {
        const double dev = gs.basis->excitations(i, site) - mean;
        var += std::norm(gs.amplitudes(Eigen::Index(i))) * dev * dev;
    }
    return var;
}

int central_site(int sites) { return (sites + 1) / 2 - 1; }

double species_leakage(const SectorGroundState& gs) {
    const auto& g = gs.basis->geometry();
    const int m = g.sites;
    std::vector<int> n(std::size_t(m), 0);
    const std::vector<Species> minus(std::size_t(m), Species::minus);
    double captured = 0.0;
    // All compositions of n_total into M parts of size <= n_max.
    auto visit = [&](auto&& self, int site, int left) -> void {
        if (site == m - 1) {
            if (left > g.n_max) return;
            n[std::size_t(site)] = left;
            const auto v = polariton_product(n, minus, gs.params.jc, *gs.basis);
            captured += std::norm(v.dot(gs.amplitudes));
            return;
        }
        for (int k = 0; k <= std::min(left, g.n_max); ++k) {
            n[std::size_t(site)] = k;
            self(self, site + 1, left - k);
        }
    };
    visit(visit, 0, gs.n_total);
    return std::max(0.0, 1.0 - captured);
}

}  // namespace jcl
