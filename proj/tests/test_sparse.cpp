#include <doctest.h>

#include <random>

#include "jcl/kernels.hpp"
#include "jcl/sparse.hpp"

using namespace jcl;

namespace {

SparseOperator random_operator(std::size_t dim, double density, std::mt19937_64& rng, bool hermitian) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution keep(density);
    std::vector<Entry> e;
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = hermitian ? r : 0; c < dim; ++c) {
            if (!keep(rng)) continue;
            const cplx v(u(rng), r == c && hermitian ? 0.0 : u(rng));
            e.push_back({r, c, v});
            if (hermitian && r != c) e.push_back({c, r, std::conj(v)});
        }
    return SparseOperator(dim, std::move(e), hermitian);
}

}  // namespace

TEST_CASE("construction merges duplicates and drops tiny entries") {
    SparseOperator a(3, {{0, 1, 1.0}, {0, 1, 2.0}, {2, 2, 1e-16}, {1, 0, 0.5}});
    CHECK(a.nnz() == 2);
    CHECK(a.element(0, 1) == cplx(3.0));
    CHECK(a.element(1, 0) == cplx(0.5));
    CHECK(a.element(2, 2) == cplx(0.0));
    CHECK(a.row_ptr().size() == 4);
}

TEST_CASE("cancelling duplicates leave no stored zero") {
    SparseOperator a(2, {{0, 0, 1.0}, {0, 0, -1.0}});
    CHECK(a.nnz() == 0);
}

TEST_CASE("hermitian flag is checked") {
    CHECK_THROWS_AS(SparseOperator(2, {{0, 1, 1.0}}, true), std::invalid_argument);
    CHECK_NOTHROW(SparseOperator(2, {{0, 1, cplx(1, 1)}, {1, 0, cplx(1, -1)}}, true));
    CHECK_THROWS_AS(SparseOperator(2, {{2, 0, 1.0}}), std::invalid_argument);
}

TEST_CASE("algebra matches dense arithmetic") {
    std::mt19937_64 rng(7);
    const auto a = random_operator(9, 0.3, rng, false);
    const auto b = random_operator(9, 0.3, rng, false);
    const Eigen::MatrixXcd da = a.to_dense(), db = b.to_dense();
    CHECK(((a + b).to_dense() - (da + db)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(((a - b).to_dense() - (da - db)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(((a * b).to_dense() - da * db).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.adjoint().to_dense() - da.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((commutator(a, b).to_dense() - (da * db - db * da)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.scaled(cplx(0, 2)).to_dense() - cplx(0, 2) * da).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(a.hermiticity_defect() == doctest::Approx((da - da.adjoint()).cwiseAbs().maxCoeff()));
}

TEST_CASE("matrix_element and apply") {
    std::mt19937_64 rng(11);
    const auto h = random_operator(12, 0.4, rng, true);
    Eigen::VectorXcd u = Eigen::VectorXcd::Random(12), v = Eigen::VectorXcd::Random(12);
    const cplx expect = u.dot(h.to_dense() * v);
    CHECK(std::abs(matrix_element(u, h, v) - expect) < 1e-13);
    CHECK((h.apply(v) - h.to_dense() * v).norm() < 1e-13);
    CHECK_THROWS_AS(h.apply(Eigen::VectorXcd::Zero(5)), std::invalid_argument);
}

TEST_CASE("from_dense / identity / diagonal") {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, cplx(0, 1), cplx(0, -1), 2.0;
    const auto s = SparseOperator::from_dense(m, true);
    CHECK(s.hermitian());
    CHECK((s.to_dense() - m).norm() == 0.0);
    CHECK(SparseOperator::identity(4).nnz() == 4);
    const std::vector<double> d{0.0, 3.0};
    CHECK(SparseOperator::diagonal(d).nnz() == 1);
}

TEST_CASE("serial and parallel kernels are bitwise identical") {
    std::mt19937_64 rng(2024);
    for (std::size_t dim : {5u, 64u, 300u}) {
        const auto a = random_operator(dim, 0.1, rng, false);
        Eigen::VectorXcd x = Eigen::VectorXcd::Random(Eigen::Index(dim));
        Eigen::VectorXcd y1(static_cast<Eigen::Index>(dim)), y2(static_cast<Eigen::Index>(dim));
        const std::span<const cplx> xs(x.data(), dim);
        kernels::serial::spmv(a, xs, std::span<cplx>(y1.data(), dim));
        kernels::parallel::spmv(a, xs, std::span<cplx>(y2.data(), dim));
        CHECK((y1.array() == y2.array()).all());

        Eigen::MatrixXcd X = Eigen::MatrixXcd::Random(Eigen::Index(dim), 7), Y1, Y2;
        kernels::serial::spmm(a, X, Y1);
        kernels::parallel::spmm(a, X, Y2);
        CHECK((Y1.array() == Y2.array()).all());
        CHECK((Y1 - a.to_dense() * X).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("spmm_right_adjoint computes X A^dagger") {
    std::mt19937_64 rng(3);
    const auto a = random_operator(10, 0.3, rng, false);
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Random(10, 10), Y;
    kernels::spmm_right_adjoint(a, X, Y);
    CHECK((Y - X * a.to_dense().adjoint()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kernel dimension mismatch throws") {
    const auto a = SparseOperator::identity(3);
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(4, 2), Y;
    CHECK_THROWS_AS(kernels::serial::spmm(a, X, Y), std::invalid_argument);
    CHECK_THROWS_AS(kernels::parallel::spmm(a, X, Y), std::invalid_argument);
}
