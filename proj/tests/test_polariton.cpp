#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "jcl/lattice.hpp"
#include "jcl/polariton.hpp"

using namespace jcl;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

JCParams at_detuning(double d, double g = 1.0, double wc = 0.0) { return JCParams::from_detuning(d, g, wc); }

// Independent reference: the 2×2 block {|n,↓⟩, |n−1,↑⟩} diagonalized numerically.
Eigen::Matrix2d block(int n, const JCParams& p) {
    Eigen::Matrix2d h;
    const double c = p.g * std::sqrt(double(n));
    h << n * p.omega_c, c, c, (n - 1) * p.omega_c + p.omega_q;
    return h;
}

}  // namespace

TEST_CASE("polariton energies") {
    const auto p = at_detuning(0.0, 1.0, 3.0);
    CHECK(polariton_energy(1, Species::minus, p) == doctest::Approx(3.0 - 1.0));
    CHECK(polariton_energy(1, Species::plus, p) == doctest::Approx(3.0 + 1.0));
    CHECK(polariton_energy(0, Species::minus, p) == 0.0);
    CHECK(polariton_energy(0, Species::plus, p) == 0.0);
    CHECK(polariton_energy(2, Species::minus, p) == doctest::Approx(6.0 - sqrt2));
    CHECK_THROWS_AS(polariton_energy(-1, Species::minus, p), std::invalid_argument);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5.0, 5.0), ug(0.2, 3.0);
    for (int k = 0; k < 50; ++k) {
        const auto q = at_detuning(u(rng), ug(rng), u(rng));
        for (int n = 1; n <= 5; ++n) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block(n, q));
            CHECK(polariton_energy(n, Species::minus, q) == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
            CHECK(polariton_energy(n, Species::plus, q) == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("mixing angle") {
    for (int n = 1; n <= 4; ++n) CHECK(mixing_angle(n, at_detuning(0.0)) == doctest::Approx(pi / 4));
    CHECK(mixing_angle(1, at_detuning(1e9)) < 1e-8);
    CHECK(mixing_angle(0, at_detuning(0.0)) == 0.0);
    CHECK(mixing_angle(0, at_detuning(-3.0)) == 0.0);
    const double neg = mixing_angle(1, at_detuning(-1.0));
    CHECK(neg > pi / 4);
    CHECK(neg < pi / 2);
    for (double d : {0.0, 0.3, 2.0, 40.0}) {
        const double t = mixing_angle(2, at_detuning(d));
        CHECK(t >= 0.0);
        CHECK(t <= pi / 4 + 1e-15);
    }
    // The rotation by θ_n diagonalizes the block.
    const auto q = at_detuning(0.7, 1.3);
    const double th = mixing_angle(3, q);
    Eigen::Matrix2d r;
    r << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);  // columns |−⟩, |+⟩
    const Eigen::Matrix2d d = r.transpose() * block(3, q) * r;
    CHECK(std::abs(d(0, 1)) < 1e-12);
    CHECK(d(0, 0) == doctest::Approx(polariton_energy(3, Species::minus, q)));
}

TEST_CASE("qubit hopping coefficients") {
    const auto p = at_detuning(0.0);
    const auto s0 = hop_coeffs_qubit(0, p), s1 = hop_coeffs_qubit(1, p);
    CHECK(at(s0, Species::minus, Species::minus) == doctest::Approx(-1.0 / sqrt2));
    CHECK(at(s1, Species::minus, Species::minus) == doctest::Approx(-0.5));
    const auto far = at_detuning(1e8);
    for (int n = 0; n < 4; ++n) {
        const auto s = hop_coeffs_qubit(n, far);
        CHECK(std::abs(at(s, Species::minus, Species::minus)) < 1e-3);
        CHECK(at(s, Species::minus, Species::plus) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("cavity hopping coefficients") {
    const auto p = at_detuning(0.0);
    CHECK(at(hop_coeffs_cavity(0, p), Species::minus, Species::minus) == doctest::Approx(1.0 / sqrt2));
    CHECK(at(hop_coeffs_cavity(1, p), Species::minus, Species::minus) == doctest::Approx((sqrt2 + 1) / 2));
    const auto far = at_detuning(1e8);
    for (int n = 0; n < 4; ++n)
        CHECK(at(hop_coeffs_cavity(n, far), Species::minus, Species::minus) ==
              doctest::Approx(std::sqrt(n + 1.0)).epsilon(1e-6));
}

TEST_CASE("coefficients agree with the numerically diagonalized site") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-4.0, 4.0), ug(0.3, 2.0);
    for (int k = 0; k < 20; ++k) {
        const auto p = at_detuning(u(rng), ug(rng));
        const int n_max = 5;
        const auto ops = site_operators(n_max);
        const auto pols = site_polaritons(p, n_max);
        auto numeric = [&](int n, Species sp) {
            for (const auto& x : pols)
                if (x.n == n && x.species == sp) return x.vector;
            FAIL("missing polariton");
            return Eigen::VectorXcd();
        };
        for (int n = 0; n < 4; ++n) {
            const auto s = hop_coeffs_qubit(n, p), t = hop_coeffs_cavity(n, p);
            for (auto a : kSpecies)
                for (auto b : kSpecies) {
                    if (n == 0 && a == Species::plus) continue;
                    const auto ket = numeric(n, a), bra = numeric(n + 1, b);
                    CHECK(std::abs(matrix_element(bra, ops.sigma_plus, ket) - at(s, a, b)) < 1e-12);
                    CHECK(std::abs(matrix_element(bra, ops.a_dag, ket) - at(t, a, b)) < 1e-12);
                }
        }
    }
}

TEST_CASE("effective repulsion") {
    CHECK(effective_repulsion(at_detuning(0.0)) == doctest::Approx(2.0 - sqrt2).epsilon(1e-14));
    CHECK(effective_repulsion(at_detuning(2.0)) == doctest::Approx(-std::sqrt(3.0) + 2 * sqrt2 - 1).epsilon(1e-13));
    const double d30 = effective_repulsion(at_detuning(30.0));
    CHECK(std::abs(d30 - 2.0 / 27000.0) / d30 < 0.15);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-10.0, 60.0), ug(0.5, 2.0);
    for (int k = 0; k < 100; ++k) {
        const auto p = at_detuning(u(rng), ug(rng), u(rng));
        const double spectral = polariton_energy(2, Species::minus, p) - 2 * polariton_energy(1, Species::minus, p);
        CHECK(std::abs(effective_repulsion(p) - spectral) <= 1e-12 * std::max(1.0, std::abs(p.omega_c)));
    }
}

TEST_CASE("effective coupling") {
    const auto p = at_detuning(0.0);
    CHECK(effective_coupling(1.0, p, Coupling::qubit_qubit) == doctest::Approx(1.0 / (2 * sqrt2)));
    CHECK(effective_coupling(1.0, p, Coupling::cavity_cavity) == doctest::Approx((sqrt2 + 1) / (2 * sqrt2)));
    CHECK(effective_coupling(0.3, p, Coupling::qubit_qubit) == doctest::Approx(0.3 * 0.35355339059327373));
    // Far detuned: √2 J g²/Δ² within a few percent at Δ = 50 g.
    const double d = 50.0;
    CHECK(effective_coupling(1.0, at_detuning(d), Coupling::qubit_qubit) ==
          doctest::Approx(sqrt2 / (d * d)).epsilon(0.05));
}

TEST_CASE("crossing detuning") {
    const auto p = at_detuning(0.0);
    const double qq = crossing_detuning(0.1, p, Coupling::qubit_qubit);
    const double cc = crossing_detuning(0.1, p, Coupling::cavity_cavity);
    CHECK(std::abs(qq - 10.0 * sqrt2) / qq < 0.10);
    CHECK(cc < qq);
    // At the root δ equals J_eff.
    CHECK(effective_repulsion(at_detuning(qq)) ==
          doctest::Approx(effective_coupling(0.1, at_detuning(qq), Coupling::qubit_qubit)).epsilon(1e-8));
    // Already delocalized at resonance.
    CHECK(crossing_detuning(2.0, p, Coupling::qubit_qubit) == 0.0);
    CHECK_THROWS_AS(crossing_detuning(0.0, p, Coupling::qubit_qubit), std::invalid_argument);
    CHECK_THROWS_AS(crossing_detuning(1e-9, p, Coupling::qubit_qubit, 10.0), NoCrossingError);
    try {
        crossing_detuning(1e-9, p, Coupling::qubit_qubit, 10.0);
    } catch (const NoCrossingError& e) {
        CHECK(e.hi == 10.0);
        CHECK(e.f_hi > 0.0);
    }
}

TEST_CASE("rwa phase frequencies") {
    const auto p = at_detuning(0.0);
    CHECK(rwa_phase_frequency(1, 1, Species::minus, Species::minus, Species::plus, Species::plus, p) == 0.0);
    CHECK(rwa_phase_frequency(0, 0, Species::minus, Species::minus, Species::minus, Species::plus, p) ==
          doctest::Approx(-2.0));
    // Species mixing grows like Δ.
    const double f1 = std::abs(rwa_phase_frequency(1, 1, Species::minus, Species::minus, Species::minus, Species::plus,
                                                   at_detuning(100.0)));
    CHECK(f1 == doctest::Approx(100.0).epsilon(0.01));
}

TEST_CASE("polariton table invariants") {
    for (double d : {0.0, 0.5, 3.0, 25.0}) {
        const auto t = make_polariton_table(at_detuning(d), 4, 0.2);
        for (int n = 1; n <= 4; ++n) {
            CHECK(t.e_plus[std::size_t(n)] >= t.e_minus[std::size_t(n)]);
            CHECK(t.theta[std::size_t(n)] >= 0.0);
            CHECK(t.theta[std::size_t(n)] <= pi / 4 + 1e-15);
        }
        CHECK(t.delta_rep == doctest::Approx(effective_repulsion(at_detuning(d))));
        CHECK(t.j_eff_qq == doctest::Approx(effective_coupling(0.2, at_detuning(d), Coupling::qubit_qubit)));
        CHECK(t.j_eff_cc == doctest::Approx(effective_coupling(0.2, at_detuning(d), Coupling::cavity_cavity)));
    }
}

TEST_CASE("coupling names") {
    CHECK(parse_coupling("qq") == Coupling::qubit_qubit);
    CHECK(parse_coupling("CC") == Coupling::cavity_cavity);
    CHECK(to_string(Coupling::cavity_cavity) == "cc");
    CHECK_THROWS_AS(parse_coupling("xy"), std::invalid_argument);
    CHECK_THROWS_AS(at_detuning(0.0, -1.0).validate(), std::invalid_argument);
}
