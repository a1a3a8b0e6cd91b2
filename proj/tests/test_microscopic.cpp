#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "jcl/lattice.hpp"
#include "jcl/microscopic.hpp"

using namespace jcl;

namespace {

SpinEnsembleParams random_ensemble(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 1.5);
    SpinEnsembleParams p;
    for (int k = 0; k < n; ++k) p.couplings.push_back(u(rng));
    return p;
}

// Full-space propagation of the spin model by dense diagonalization.
Eigen::VectorXcd propagate(const SparseOperator& h, const Eigen::VectorXcd& psi, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
    Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(cplx(0.0, -es.eigenvalues()(i) * t));
    return es.eigenvectors() * c;
}

}  // namespace

TEST_CASE("collective coupling") {
    const auto p = SpinEnsembleParams::uniform(9, 0.5);
    CHECK(p.g_collective() == doctest::Approx(1.5));
    CHECK(p.g_bar() == doctest::Approx(0.5));
    CHECK_THROWS_AS(SpinEnsembleParams{}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(SpinEnsembleParams::uniform(3, 0.0).validate(), std::invalid_argument);
}

TEST_CASE("spin Hamiltonian") {
    std::mt19937_64 rng(5);
    for (int n : {1, 3, 6}) {
        auto p = random_ensemble(n, rng);
        p.omega_q = 0.3;
        p.omega_c = -0.2;
        const auto h = spin_ensemble_hamiltonian(p);
        CHECK(h.dim() == (std::size_t(2) << n));
        CHECK(h.hermiticity_defect() == 0.0);
        // Conserves the total number of up spins including the qubit.
        std::vector<double> count(h.dim());
        for (std::size_t s = 0; s < h.dim(); ++s) count[s] = std::popcount(s);
        CHECK(commutator(h, SparseOperator::diagonal(count)).max_abs() == 0.0);
    }
    SUBCASE("one-excitation spectrum: bright pair and dark states") {
        auto p = random_ensemble(5, rng);
        const auto h = spin_ensemble_hamiltonian(p).to_dense();
        std::vector<Eigen::Index> one;
        for (Eigen::Index s = 0; s < h.rows(); ++s)
            if (std::popcount(std::uint64_t(s)) == 1) one.push_back(s);
        Eigen::MatrixXcd block(Eigen::Index(one.size()), Eigen::Index(one.size()));
        for (std::size_t i = 0; i < one.size(); ++i)
            for (std::size_t j = 0; j < one.size(); ++j) block(Eigen::Index(i), Eigen::Index(j)) = h(one[i], one[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
        const double g = p.g_collective();
        CHECK(es.eigenvalues()(0) == doctest::Approx(-g));
        for (Eigen::Index i = 1; i + 1 < es.eigenvalues().size(); ++i) CHECK(std::abs(es.eigenvalues()(i)) < 1e-12);
        CHECK(es.eigenvalues().tail(1)(0) == doctest::Approx(g));
    }
}

TEST_CASE("capacity limit") {
    CHECK_NOTHROW(spin_ensemble_hamiltonian(SpinEnsembleParams::uniform(15, 0.1)));
    CHECK_THROWS_AS(spin_ensemble_hamiltonian(SpinEnsembleParams::uniform(16, 0.1)), CapacityError);
    CHECK_THROWS_AS(dicke_state(1, SpinEnsembleParams::uniform(20, 0.1)), CapacityError);
    CHECK_THROWS_AS(reduction_error(SpinEnsembleParams::uniform(16, 0.1), 1, 1.0, 3), CapacityError);
}

TEST_CASE("Dicke states, uniform couplings") {
    for (int big_n : {4, 7, 10})
        for (int n = 0; n <= big_n; ++n) {
            const auto p = SpinEnsembleParams::uniform(big_n, 0.3);
            const auto d = dicke_state(n, p);
            CHECK(d.vector.norm() == doctest::Approx(1.0));
            // Equal weight on every configuration with n spins up.
            double binom = 1.0;
            for (int k = 0; k < n; ++k) binom = binom * (big_n - k) / (k + 1);
            double prenorm_sq = 1.0;
            for (int k = 0; k < n; ++k) prenorm_sq *= 1.0 - double(k) / big_n;
            CHECK(d.prenorm * d.prenorm == doctest::Approx(prenorm_sq));
            for (Eigen::Index s = 0; s < d.vector.size(); ++s) {
                const double expect = std::popcount(std::uint64_t(s)) == n ? 1.0 / std::sqrt(binom) : 0.0;
                CHECK(std::abs(d.vector(s) - expect) < 1e-12);
            }
            CHECK(number_defect(d.vector, n) < 1e-14);
            if (n < big_n) CHECK(number_defect(d.vector, n + 1) == doctest::Approx(1.0));
            CHECK(commutator_defect(d.vector, p) == doctest::Approx(-2.0 * n / big_n));
        }
    const auto p = SpinEnsembleParams::uniform(3, 1.0);
    CHECK_THROWS_AS(dicke_state(4, p), std::invalid_argument);
    CHECK_THROWS_AS(dicke_state(-1, p), std::invalid_argument);
}

TEST_CASE("commutator defect shrinks with ensemble size") {
    std::mt19937_64 rng(11);
    double last = -2.0;
    for (int n : {2, 4, 8, 12}) {
        const auto p = random_ensemble(n, rng);
        const double d = commutator_defect(dicke_state(1, p).vector, p);
        CHECK(d <= 0.0);
        CHECK(d >= -2.0);
        CHECK(d > last);
        last = d;
    }
}

TEST_CASE("reduction error") {
    SUBCASE("single excitation is exact for any couplings") {
        std::mt19937_64 rng(3);
        for (int n : {1, 4, 9}) {
            auto p = random_ensemble(n, rng);
            p.omega_q = 0.4;
            const auto rep = reduction_error(p, 1, 20.0, 101);
            CHECK(rep.times.size() == 101);
            CHECK(rep.times.back() == doctest::Approx(20.0));
            CHECK(rep.max_error < 1e-10);
        }
    }
    SUBCASE("two excitations decrease with N") {
        double last = 1.0;
        for (int n : {3, 6, 12}) {
            auto p = SpinEnsembleParams::uniform(n, 1.0 / std::sqrt(double(n)));
            const auto rep = reduction_error(p, 2, 10.0, 201);
            CHECK(rep.max_error > 1e-6);
            CHECK(rep.max_error < last);
            last = rep.max_error;
        }
    }
    SUBCASE("agrees with a full-space propagation") {
        auto p = SpinEnsembleParams::uniform(4, 0.5, 0.3, 0.0);
        const int n = p.spins();
        const auto rep = reduction_error(p, 2, 6.0, 7);
        const auto h = spin_ensemble_hamiltonian(p);
        const auto d1 = dicke_state(1, p), d2 = dicke_state(2, p);
        const Eigen::Index up = Eigen::Index(1) << n;
        Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(2 * up), down2 = psi0, up1 = psi0;
        up1.tail(up) = d1.vector;
        down2.head(up) = d2.vector;
        psi0 = up1;
        const double g = p.g_collective() * std::sqrt(2.0);
        // JC doublet {|2,↓⟩, |1,↑⟩} with ω_c = 0: [[0, g], [g, ω_q]].
        Eigen::Matrix2cd jc;
        jc << 0.0, g, g, p.omega_q;
        for (std::size_t k = 0; k < rep.times.size(); ++k) {
            const double t = rep.times[k];
            const Eigen::VectorXcd exact = propagate(h, psi0, t);
            Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(jc);
            Eigen::Vector2cd c = es.eigenvectors().inverse() * Eigen::Vector2cd(0.0, 1.0);
            for (int i = 0; i < 2; ++i) c(i) *= std::exp(cplx(0.0, -es.eigenvalues()(i).real() * t));
            const Eigen::Vector2cd jt = es.eigenvectors() * c;
            const Eigen::VectorXcd mapped = jt(0) * down2 + jt(1) * up1;
            const double fid = std::norm(exact.dot(mapped));
            CHECK(rep.errors[k] == doctest::Approx(std::sqrt(std::max(0.0, 1.0 - fid))).epsilon(1e-6));
        }
    }
    SUBCASE("argument checks") {
        const auto p = SpinEnsembleParams::uniform(3, 1.0);
        CHECK_THROWS_AS(reduction_error(p, 0, 1.0, 3), std::invalid_argument);
        CHECK_THROWS_AS(reduction_error(p, 4, 1.0, 3), std::invalid_argument);
        CHECK_THROWS_AS(reduction_error(p, 1, 0.0, 3), std::invalid_argument);
        CHECK_THROWS_AS(reduction_error(p, 1, 1.0, 1), std::invalid_argument);
    }
}

TEST_CASE("small ensembles and edge couplings") {
    SUBCASE("N = 1 is the n_max = 1 JC site") {
        const SpinEnsembleParams p{0.7, 0.2, {1.3}};
        const auto h = spin_ensemble_hamiltonian(p);
        const auto jc = site_hamiltonian(JCParams{0.7, 0.2, 1.3}, 1);
        // spin index = spin + 2·qubit; site index = 2·fock + qubit.
        auto site_index = [](std::size_t s) { return 2 * (s & 1u) + (s >> 1); };
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) CHECK(h.element(r, c) == jc.element(site_index(r), site_index(c)));
    }
    SUBCASE("vanishing couplings give the free Hamiltonian") {
        const SpinEnsembleParams p{0.9, 0.4, {0.0, 0.0, 0.0}};
        const auto h = spin_ensemble_hamiltonian(p);
        for (const auto& e : h.entries()) CHECK(e.row == e.col);
        for (std::size_t s = 0; s < h.dim(); ++s)
            CHECK(h.element(s, s).real() == doctest::Approx(((s >> 3) & 1u) * 0.9 + std::popcount(s & 7u) * 0.4));
    }
    SUBCASE("Dicke vacuum and weighted W state") {
        const SpinEnsembleParams p{0.0, 0.0, {3.0, 4.0}};
        const auto d0 = dicke_state(0, p);
        CHECK(d0.vector(0) == cplx(1.0));
        CHECK(d0.vector.tail(3).norm() == 0.0);
        const auto d1 = dicke_state(1, p);
        CHECK(std::abs(d1.vector(1) - 0.6) < 1e-15);
        CHECK(std::abs(d1.vector(2) - 0.8) < 1e-15);
        CHECK(d1.vector(0) == cplx(0.0));
        CHECK(d1.vector(3) == cplx(0.0));
    }
    SUBCASE("commutator defect of the vacuum and the inverted ensemble") {
        const auto p = SpinEnsembleParams::uniform(6, 0.4);
        Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(64), full = vac;
        vac(0) = 1.0;
        full(63) = 1.0;
        CHECK(std::abs(commutator_defect(vac, p)) < 1e-15);
        CHECK(commutator_defect(full, p) == doctest::Approx(-2.0));
    }
    SUBCASE("one nonzero coupling reduces to the single-spin case") {
        const SpinEnsembleParams p{0.3, 0.0, {0.0, 0.0, 1.0, 0.0}};
        CHECK(reduction_error(p, 1, 15.0, 151).max_error < 1e-10);
    }
}
