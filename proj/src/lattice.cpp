#include "jcl/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace jcl {

void LatticeParams::validate() const {
    if (sites < 1) throw std::invalid_argument("LatticeParams: sites must be >= 1");
    if (!(J >= 0.0)) throw std::invalid_argument("LatticeParams: J must be >= 0");
    if (n_max < 1) throw std::invalid_argument("LatticeParams: n_max must be >= 1");
    jc.validate();
}

SparseOperator site_hamiltonian(const JCParams& p, int n_max) {
    p.validate();
    const auto ops = site_operators(n_max);
    const auto h = ops.n_qubit.scaled(p.omega_q) + ops.n_fock.scaled(p.omega_c) +
                   (ops.a_dag * ops.sigma_minus + ops.a * ops.sigma_plus).scaled(p.g);
    return SparseOperator(h.dim(), h.entries(), true);
}

OperatorSum onsite_terms(const LatticeParams& lp) {
    lp.validate();
    OperatorSum sum(lp.geometry());
    const auto h = site_hamiltonian(lp.jc, lp.n_max);
    for (int j = 0; j < lp.sites; ++j) sum.add(1.0, j, h);
    return sum;
}

OperatorSum hopping_terms(const LatticeParams& lp) {
    lp.validate();
    OperatorSum sum(lp.geometry());
    if (lp.J == 0.0) return sum;
    const auto ops = site_operators(lp.n_max);
    const bool qq = lp.coupling == Coupling::qubit_qubit;
    const auto& raise = qq ? ops.sigma_plus : ops.a_dag;
    const auto& lower = qq ? ops.sigma_minus : ops.a;
    for (int j = 0; j + 1 < lp.sites; ++j) {
        sum.add(lp.J, j, raise, j + 1, lower);
        sum.add(lp.J, j, lower, j + 1, raise);
    }
    return sum;
}

OperatorSum lattice_terms(const LatticeParams& lp) {
    auto sum = onsite_terms(lp);
    sum.append(hopping_terms(lp));
    return sum;
}

SparseOperator lattice_hamiltonian(const LatticeParams& lp) {
    return lattice_hamiltonian(lp, ProductBasis::full(lp.geometry()));
}

SparseOperator lattice_hamiltonian(const LatticeParams& lp, const ProductBasis& basis) {
    return assemble(lattice_terms(lp), basis, true);
}

namespace {

void check_site(const LatticeParams& lp, int site) {
    if (site < 0 || site >= lp.sites)
        throw std::invalid_argument("excitation_operator: site " + std::to_string(site) + " out of range [0, " +
                                    std::to_string(lp.sites) + ")");
}

SparseOperator local_number(int n_max) {
    const auto ops = site_operators(n_max);
    return ops.n_fock + ops.n_qubit;
}

}  // namespace

SparseOperator excitation_operator(const LatticeParams& lp, int site) {
    return excitation_operator(lp, site, ProductBasis::full(lp.geometry()));
}

SparseOperator excitation_operator(const LatticeParams& lp, int site, const ProductBasis& basis) {
    check_site(lp, site);
    OperatorSum sum(lp.geometry());
    sum.add(1.0, site, local_number(lp.n_max));
    return assemble(sum, basis, true);
}

SparseOperator total_excitation_operator(const LatticeParams& lp) {
    return total_excitation_operator(lp, ProductBasis::full(lp.geometry()));
}

SparseOperator total_excitation_operator(const LatticeParams& lp, const ProductBasis& basis) {
    OperatorSum sum(lp.geometry());
    const auto n = local_number(lp.n_max);
    for (int j = 0; j < lp.sites; ++j) sum.add(1.0, j, n);
    return assemble(sum, basis, true);
}

SparseOperator embed(const SparseOperator& op, int site, const LatticeParams& lp) {
    return embed(op, site, lp.geometry());
}

std::vector<SitePolariton> site_polaritons(const JCParams& p, int n_max) {
    p.validate();
    const SiteBasis basis(n_max);
    const Eigen::MatrixXcd h = site_hamiltonian(p, n_max).to_dense();
    const auto d = Eigen::Index(basis.dim());

    std::vector<SitePolariton> out;
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(d);
    vac(Eigen::Index(basis.index(0, Qubit::down))) = 1.0;
    out.push_back({0, Species::minus, h(0, 0).real(), vac});

    for (int n = 1; n <= n_max; ++n) {
        const auto i_down = Eigen::Index(basis.index(n, Qubit::down));
        const auto i_up = Eigen::Index(basis.index(n - 1, Qubit::up));
        Eigen::Matrix2cd block;
        block << h(i_down, i_down), h(i_down, i_up), h(i_up, i_down), h(i_up, i_up);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
        for (int k = 0; k < 2; ++k) {
            Eigen::Vector2cd v = es.eigenvectors().col(k);
            // Phase reference: |n,↓⟩ for the lower branch, |n−1,↑⟩ for the upper one.
            const cplx ref = k == 0 ? v(0) : v(1);
            if (std::abs(ref) > 0.0) v *= std::conj(ref) / std::abs(ref);
            Eigen::VectorXcd full = Eigen::VectorXcd::Zero(d);
            full(i_down) = v(0);
            full(i_up) = v(1);
            out.push_back({n, k == 0 ? Species::minus : Species::plus, es.eigenvalues()(k), full});
        }
    }
    return out;
}

Eigen::VectorXcd polariton_state(int n, Species s, const JCParams& p, int n_max) {
    const SiteBasis basis(n_max);
    if (n < 0 || n > n_max) throw std::invalid_argument("polariton_state: n outside [0, n_max]");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(basis.dim()));
    if (n == 0) {
        if (s == Species::plus) throw std::invalid_argument("polariton_state: |0,+> does not exist");
        v(Eigen::Index(basis.index(0, Qubit::down))) = 1.0;
        return v;
    }
    const double th = mixing_angle(n, p);
    const auto i_down = Eigen::Index(basis.index(n, Qubit::down));
    const auto i_up = Eigen::Index(basis.index(n - 1, Qubit::up));
    if (s == Species::minus) {
        v(i_down) = std::cos(th);
        v(i_up) = -std::sin(th);
    } else {
        v(i_down) = std::sin(th);
        v(i_up) = std::cos(th);
    }
    return v;
}

Eigen::VectorXcd polariton_product(const std::vector<int>& n, const std::vector<Species>& species,
                                   const JCParams& p, const ProductBasis& basis) {
    const auto& g = basis.geometry();
    if (int(n.size()) != g.sites || int(species.size()) != g.sites)
        throw std::invalid_argument("polariton_product: one (n, species) per site required");
    std::vector<Eigen::VectorXcd> local;
    for (int j = 0; j < g.sites; ++j) local.push_back(polariton_state(n[std::size_t(j)], species[std::size_t(j)], p, g.n_max));

    Eigen::VectorXcd out(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        cplx amp = 1.0;
        for (int j = 0; j < g.sites && amp != cplx{}; ++j) amp *= local[std::size_t(j)](Eigen::Index(basis.local_index(i, j)));
        out(Eigen::Index(i)) = amp;
    }
    return out;
}

}  // namespace jcl
