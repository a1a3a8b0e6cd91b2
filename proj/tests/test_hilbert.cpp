#include <doctest.h>

#include <cmath>
#include <random>

#include "jcl/hilbert.hpp"
#include "jcl/lattice.hpp"

using namespace jcl;

TEST_CASE("site basis ordering is fock-major, qubit-minor") {
    SiteBasis b(2);
    CHECK(b.dim() == 6);
    CHECK(b.index(0, Qubit::down) == 0);
    CHECK(b.index(0, Qubit::up) == 1);
    CHECK(b.index(2, Qubit::down) == 4);
    CHECK(b.state(3) == LocalState{1, Qubit::up});
    CHECK_THROWS_AS(SiteBasis(0), std::invalid_argument);
}

TEST_CASE("site operators") {
    SUBCASE("n_max = 1: a has two entries equal to 1") {
        const auto ops = site_operators(1);
        CHECK(ops.a.nnz() == 2);
        for (const auto& e : ops.a.entries()) CHECK(e.value == cplx(1.0));
    }
    SUBCASE("n_max = 2: <1|a|2> = sqrt 2") {
        const auto ops = site_operators(2);
        SiteBasis b(2);
        for (auto q : {Qubit::down, Qubit::up})
            CHECK(ops.a.element(b.index(1, q), b.index(2, q)).real() == doctest::Approx(std::sqrt(2.0)));
        // truncation: a† annihilates the top Fock state
        for (auto q : {Qubit::down, Qubit::up})
            for (std::size_t r = 0; r < b.dim(); ++r) CHECK(ops.a_dag.element(r, b.index(2, q)) == cplx(0.0));
    }
    SUBCASE("sigma+ sigma- is a diagonal 0/1 projector") {
        for (int n = 1; n <= 4; ++n) {
            const auto ops = site_operators(n);
            const auto p = ops.sigma_plus * ops.sigma_minus;
            for (const auto& e : p.entries()) {
                CHECK(e.row == e.col);
                CHECK(e.value == cplx(1.0));
            }
            CHECK(p.nnz() == std::size_t(n + 1));
            CHECK((ops.n_qubit.to_dense() - p.to_dense()).norm() == 0.0);
        }
    }
    CHECK_THROWS_AS(site_operators(0), std::invalid_argument);
}

TEST_CASE("embed") {
    const ChainGeometry g{2, 1};
    const auto ops = site_operators(1);
    SUBCASE("identity embeds to identity") {
        const auto id = embed(SparseOperator::identity(4), 1, g);
        CHECK((id.to_dense() - Eigen::MatrixXcd::Identity(16, 16)).norm() == 0.0);
    }
    SUBCASE("trace of the qubit projector on site 0, M=2, n_max=1") {
        // Brute force: count product states with site 0 qubit up.
        double expect = 0.0;
        SiteBasis b(1);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t k = 0; k < 4; ++k) expect += b.state(i).qubit == Qubit::up ? 1.0 : 0.0;
        const auto p = embed(ops.n_qubit, 0, g);
        CHECK(p.to_dense().trace().real() == doctest::Approx(expect));
        CHECK(expect == 8.0);
    }
    SUBCASE("disjoint supports commute") {
        const auto a0 = embed(ops.a, 0, g), b1 = embed(ops.sigma_plus, 1, g);
        CHECK(commutator(a0, b1).max_abs() == 0.0);
    }
    SUBCASE("hermitian flag survives") {
        CHECK(embed(ops.n_fock, 1, g).hermitian());
        CHECK_FALSE(embed(ops.a, 1, g).hermitian());
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(embed(ops.a, 2, g), std::invalid_argument);
        CHECK_THROWS_AS(embed(SparseOperator::identity(3), 0, g), std::invalid_argument);
    }
    SUBCASE("site 0 is the slowest digit") {
        const auto n0 = embed(ops.n_fock, 0, g);
        // Site 0 in |1,down> (local index 2), site 1 in |0,down>: full index 2·4 + 0.
        const std::size_t i = SiteBasis(1).index(1, Qubit::down) * 4;
        CHECK(n0.element(i, i) == cplx(1.0));
    }
}

TEST_CASE("sector bases") {
    CHECK(sector_basis(1, 1, 0).size() == 1);
    CHECK(sector_basis(2, 2, 2).size() == 8);
    const auto top = sector_basis(2, 1, 4);
    CHECK(top.size() == 1);
    CHECK(top.local_state(0, 0) == LocalState{1, Qubit::up});
    CHECK(sector_basis(2, 1, 5).size() == 0);
    CHECK_THROWS_AS(sector_basis(0, 1, 0), std::invalid_argument);

    SUBCASE("brute-force enumeration agrees") {
        for (int m = 1; m <= 3; ++m)
            for (int nmax = 1; nmax <= 3; ++nmax) {
                const auto full = ProductBasis::full({m, nmax});
                for (int n = 0; n <= m * (nmax + 1); ++n) {
                    std::size_t count = 0;
                    for (std::size_t i = 0; i < full.size(); ++i) count += full.total_excitations(i) == n;
                    const auto s = sector_basis(m, nmax, n);
                    CHECK(s.size() == count);
                    for (std::size_t i = 0; i < s.size(); ++i) {
                        CHECK(s.total_excitations(i) == n);
                        CHECK(s.find(s.full_index(i)) == i);  // bijection
                    }
                }
            }
    }
}

TEST_CASE("projection onto a sector is idempotent and kills other sectors") {
    const ChainGeometry g{2, 2};
    const auto full = ProductBasis::full(g);
    const auto s = SectorBasis(g, 2);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd v(Eigen::Index(full.size()));
    for (auto& x : v) x = cplx(nd(rng), nd(rng));
    const Eigen::VectorXcd once = s.extend_vector(s.restrict_vector(v));
    const Eigen::VectorXcd twice = s.extend_vector(s.restrict_vector(once));
    CHECK((once - twice).norm() == 0.0);
    Eigen::VectorXcd other = Eigen::VectorXcd::Zero(v.size());
    for (std::size_t i = 0; i < full.size(); ++i)
        if (full.total_excitations(i) != 2) other(Eigen::Index(i)) = v(Eigen::Index(i));
    CHECK(s.restrict_vector(other).norm() == 0.0);
}

TEST_CASE("total excitation operator is n_total on its sector") {
    LatticeParams lp;
    lp.sites = 3;
    lp.n_max = 2;
    for (int n = 0; n <= 4; ++n) {
        const SectorBasis s(lp.geometry(), n);
        const auto nt = total_excitation_operator(lp, s).to_dense();
        const Eigen::MatrixXcd expect = double(n) * Eigen::MatrixXcd::Identity(nt.rows(), nt.cols());
        CHECK((nt - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("excitation window") {
    const auto w = ProductBasis::excitation_window({2, 2}, 0, 2);
    CHECK(w.size() == 13);  // 1 + 4 + 8 over N_total = 0, 1, 2
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.total_excitations(i) <= 2);
}
