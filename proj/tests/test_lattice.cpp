#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "jcl/groundstate.hpp"
#include "jcl/lattice.hpp"

using namespace jcl;

namespace {

LatticeParams chain(int m, Coupling k, double J, double delta, int n_max = 2) {
    LatticeParams lp;
    lp.sites = m;
    lp.coupling = k;
    lp.J = J;
    lp.jc = JCParams::from_detuning(delta);
    lp.n_max = n_max;
    return lp;
}

}  // namespace

TEST_CASE("site Hamiltonian") {
    SUBCASE("n_max = 1, resonance") {
        const auto p = JCParams::from_detuning(0.0, 1.0, 2.5);
        const auto h = site_hamiltonian(p, 1);
        CHECK(h.hermitian());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
        const auto e = es.eigenvalues();
        CHECK(e(0) == doctest::Approx(0.0));
        CHECK(e(1) == doctest::Approx(2.5 - 1.0));
        CHECK(e(2) == doctest::Approx(2.5 + 1.0));
        CHECK(e(3) == doctest::Approx(2.5 + 2.5));
    }
    SUBCASE("diagonal and validation") {
        JCParams p{1.7, 0.4, 1.0};
        auto h = site_hamiltonian(p, 3);
        SiteBasis b(3);
        for (std::size_t i = 0; i < b.dim(); ++i) {
            const auto s = b.state(i);
            CHECK(h.element(i, i).real() == doctest::Approx(s.fock * 0.4 + int(s.qubit) * 1.7));
        }
        CHECK_THROWS_AS(site_hamiltonian(JCParams{1.0, 0.0, 0.0}, 2), std::invalid_argument);
    }
    SUBCASE("commutes with the local excitation number") {
        const auto ops = site_operators(4);
        const auto h = site_hamiltonian(JCParams::from_detuning(0.8, 1.2, 0.3), 4);
        CHECK(commutator(h, ops.n_fock + ops.n_qubit).max_abs() < 1e-12);
    }
}

TEST_CASE("spectrum of a single site matches closed forms") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-5.0, 5.0), ug(0.2, 3.0);
    for (int k = 0; k < 30; ++k) {
        const auto p = JCParams::from_detuning(u(rng), ug(rng), u(rng));
        const int n_max = 6;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(site_hamiltonian(p, n_max).to_dense());
        std::vector<double> expect{0.0, n_max * p.omega_c + p.omega_q};  // vacuum, truncated |n_max,↑⟩
        for (int n = 1; n <= n_max; ++n) {
            expect.push_back(polariton_energy(n, Species::minus, p));
            expect.push_back(polariton_energy(n, Species::plus, p));
        }
        std::sort(expect.begin(), expect.end());
        for (std::size_t i = 0; i < expect.size(); ++i)
            CHECK(std::abs(es.eigenvalues()(Eigen::Index(i)) - expect[i]) < 1e-10);
    }
}

TEST_CASE("lattice Hamiltonian") {
    SUBCASE("M = 1 equals the site Hamiltonian") {
        for (auto k : {Coupling::qubit_qubit, Coupling::cavity_cavity}) {
            const auto lp = chain(1, k, 0.7, 0.3, 3);
            CHECK((lattice_hamiltonian(lp) - site_hamiltonian(lp.jc, 3)).max_abs() == 0.0);
        }
    }
    SUBCASE("QQ and CC agree at J = 0") {
        const auto a = lattice_hamiltonian(chain(3, Coupling::qubit_qubit, 0.0, 0.5));
        const auto b = lattice_hamiltonian(chain(3, Coupling::cavity_cavity, 0.0, 0.5));
        CHECK((a - b).max_abs() == 0.0);
    }
    SUBCASE("hermitian and number conserving") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(0.0, 2.0), ud(-3.0, 3.0);
        for (int m = 2; m <= 4; ++m)
            for (auto k : {Coupling::qubit_qubit, Coupling::cavity_cavity}) {
                auto lp = chain(m, k, u(rng), ud(rng), m == 4 ? 1 : 2);
                lp.jc.omega_c = ud(rng);
                lp.jc.omega_q = lp.jc.omega_c + ud(rng);
                const auto h = lattice_hamiltonian(lp);
                CHECK(h.hermiticity_defect() <= 1e-12);
                CHECK(commutator(h, total_excitation_operator(lp)).max_abs() <= 1e-12);
            }
    }
    SUBCASE("hopping is an open chain") {
        const auto lp = chain(3, Coupling::qubit_qubit, 1.0, 0.0, 1);
        const auto ops = site_operators(1);
        const auto g = lp.geometry();
        auto hop = [&](int i, int j) {
            return assemble(OperatorSum(g).add(1.0, i, ops.sigma_plus, j, ops.sigma_minus), ProductBasis::full(g));
        };
        auto expect = hop(0, 1) + hop(1, 0) + hop(1, 2) + hop(2, 1);
        for (int j = 0; j < 3; ++j) expect = expect + embed(site_hamiltonian(lp.jc, 1), j, lp);
        CHECK((lattice_hamiltonian(lp) - expect).max_abs() < 1e-15);
    }
}

TEST_CASE("two-site hopping matrix element") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-6.0, 6.0), uj(0.01, 1.0), ug(0.3, 2.0);
    for (int k = 0; k < 20; ++k) {
        const double J = uj(rng);
        auto lp = chain(2, Coupling::qubit_qubit, J, 0.0, 2);
        lp.jc = JCParams::from_detuning(u(rng), ug(rng));
        const auto basis = ProductBasis::full(lp.geometry());
        const auto bra = polariton_product({2, 0}, {Species::minus, Species::minus}, lp.jc, basis);
        const auto ket = polariton_product({1, 1}, {Species::minus, Species::minus}, lp.jc, basis);
        auto lp0 = lp;
        lp0.J = 0.0;
        const auto hop_only = lattice_hamiltonian(lp) - lattice_hamiltonian(lp0);
        const double s0 = at(hop_coeffs_qubit(0, lp.jc), Species::minus, Species::minus);
        const double s1 = at(hop_coeffs_qubit(1, lp.jc), Species::minus, Species::minus);
        CHECK(std::abs(matrix_element(bra, hop_only, ket) - J * s1 * s0) < 1e-10);

        lp.coupling = Coupling::cavity_cavity;
        auto q0 = lp;
        q0.J = 0.0;
        const auto hop_cc = lattice_hamiltonian(lp) - lattice_hamiltonian(q0);
        const double t0 = at(hop_coeffs_cavity(0, lp.jc), Species::minus, Species::minus);
        const double t1 = at(hop_coeffs_cavity(1, lp.jc), Species::minus, Species::minus);
        CHECK(std::abs(matrix_element(bra, hop_cc, ket) - J * t1 * t0) < 1e-10);
    }
}

TEST_CASE("excitation operators") {
    const auto lp = chain(2, Coupling::qubit_qubit, 0.1, 0.6, 2);
    const auto basis = ProductBasis::full(lp.geometry());
    const auto v = polariton_product({1, 0}, {Species::minus, Species::minus}, lp.jc, basis);
    CHECK(matrix_element(v, excitation_operator(lp, 0), v).real() == doctest::Approx(1.0));
    CHECK(std::abs(matrix_element(v, excitation_operator(lp, 1), v)) < 1e-15);
    CHECK_THROWS_AS(excitation_operator(lp, 2), std::invalid_argument);
    CHECK_THROWS_AS(excitation_operator(lp, -1), std::invalid_argument);
    for (int j = 0; j < 2; ++j) {
        const auto n = excitation_operator(lp, j);
        for (const auto& e : n.entries()) CHECK(e.row == e.col);
    }
}

TEST_CASE("J = 0 two-site sector ground energy") {
    const auto lp = chain(2, Coupling::qubit_qubit, 0.0, 1.3, 2);
    const auto gs = sector_ground_state(lp, 2);
    CHECK(gs.energy == doctest::Approx(2 * polariton_energy(1, Species::minus, lp.jc)).epsilon(1e-12));
}

TEST_CASE("numerical polaritons and closed forms agree") {
    for (double d : {-2.0, 0.0, 0.4, 7.0}) {
        const auto p = JCParams::from_detuning(d, 1.1, 0.2);
        for (const auto& x : site_polaritons(p, 4)) {
            const auto cf = polariton_state(x.n, x.species, p, 4);
            CHECK((x.vector - cf).norm() < 1e-12);
            CHECK(x.energy == doctest::Approx(polariton_energy(x.n, x.species, p)));
        }
    }
    CHECK_THROWS_AS(LatticeParams{0}.validate(), std::invalid_argument);
    auto bad = chain(2, Coupling::qubit_qubit, -0.1, 0.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
