#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version. The OpenMP versions partition over
// independent output rows/columns, so each output element is reduced in the
// same order as in the serial kernel and the results are bitwise identical.

#include <span>

#include <Eigen/Dense>

#include "jcl/sparse.hpp"

namespace jcl::kernels {

namespace serial {
/// y = A x.
void spmv(const SparseOperator& a, std::span<const cplx> x, std::span<cplx> y);
/// Y = A X, column by column.
void spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y);
}  // namespace serial

namespace parallel {
void spmv(const SparseOperator& a, std::span<const cplx> x, std::span<cplx> y);
void spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y);
}  // namespace parallel

/// Work size (multiply-adds) below which the dispatchers stay serial.
inline constexpr std::size_t kParallelWorkThreshold = 1u << 15;

// Dispatchers used by the library.
void spmv(const SparseOperator& a, std::span<const cplx> x, std::span<cplx> y);
void spmm(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y);

/// Y = X A† computed as (A X†)†, so only row-compressed access is needed.
void spmm_right_adjoint(const SparseOperator& a, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y);

}  // namespace jcl::kernels
