#include "jcl/kernels.hpp"

#include <stdexcept>

namespace jcl::kernels {

namespace {

void check_vec(const SparseOperator& a, std::span<const cplx> x, std::span<cplx> y) {
    if (x.size() != a.dim() || y.size() != a.dim()) throw std::invalid_argument("spmv: dimension mismatch");
}

void check_mat(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) {
    if (std::size_t(x.rows()) != a.dim()) throw std::invalid_argument("spmm: dimension mismatch");
    if (y.rows() != x.rows() || y.cols() != x.cols()) y.resize(x.rows(), x.cols());
}

inline cplx row_dot(const SparseOperator& a, std::size_t r, const cplx* x) {
    const auto& e = a.entries();
    const auto& p = a.row_ptr();
    cplx acc{};
    for (std::size_t k = p[r]; k < p[r + 1]; ++k) acc += e[k].value * x[e[k].col];
    return acc;
}

}  // namespace

namespace serial {

void spmv(const SparseOperator& a, std::span<const cplx> x, std::span<cplx> y) {
    check_vec(a, x, y);
    for (std::size_t r = 0; r < a.dim(); ++r) y[r] = row_dot(a, r, x.data());
}

void spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) {
    check_mat(a, x, y);
    const std::size_t n = a.dim();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const cplx* xc = x.col(c).data();
        cplx* yc = y.col(c).data();
        for (std::size_t r = 0; r < n; ++r) yc[r] = row_dot(a, r, xc);
    }
}

}  // namespace serial

namespace parallel {

void spmv(const SparseOperator& a, std::span<const cplx> x, std::span<cplx> y) {
    check_vec(a, x, y);
    const auto n = static_cast<std::ptrdiff_t>(a.dim());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) y[std::size_t(r)] = row_dot(a, std::size_t(r), x.data());
}

void spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) {
    check_mat(a, x, y);
    const std::size_t n = a.dim();
    const auto cols = static_cast<std::ptrdiff_t>(x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
        const cplx* xc = x.col(c).data();
        cplx* yc = y.col(c).data();
        for (std::size_t r = 0; r < n; ++r) yc[r] = row_dot(a, r, xc);
    }
}

}  // namespace parallel

void spmv(const SparseOperator& a, std::span<const cplx> x, std::span<cplx> y) {
    if (a.nnz() >= kParallelWorkThreshold)
        parallel::spmv(a, x, y);
    else
        serial::spmv(a, x, y);
}

void spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) {
    if (a.nnz() * std::size_t(x.cols()) >= kParallelWorkThreshold)
        parallel::spmm(a, x, y);
    else
        serial::spmm(a, x, y);
}

void spmm_right_adjoint(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) {
    Eigen::MatrixXcd xa = x.adjoint();
    Eigen::MatrixXcd tmp;
    spmm(a, xa, tmp);
    y = tmp.adjoint();
}

}  // namespace jcl::kernels
