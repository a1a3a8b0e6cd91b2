#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace jcl {

using cplx = std::complex<double>;

/// Coordinate-format matrix entry.
struct Entry {
    std::size_t row = 0;
    std::size_t col = 0;
    cplx value{};
};

/// Square complex sparse matrix.
///
/// Entries are kept in coordinate form sorted row-major, with duplicates
/// merged and magnitudes below `kDropTolerance` removed. A row-pointer index
/// is built alongside so the same storage serves as CSR for products.
/// Instances are immutable once constructed and safe to share across threads.
class SparseOperator {
public:
    static constexpr double kDropTolerance = 1e-15;
    static constexpr double kHermitianTolerance = 1e-12;

    SparseOperator() = default;

    /// Throws std::invalid_argument on out-of-range indices, or when
    /// `hermitian` is claimed but ‖A − A†‖_max exceeds kHermitianTolerance.
    SparseOperator(std::size_t dim, std::vector<Entry> entries, bool hermitian = false);

    static SparseOperator identity(std::size_t dim);
    static SparseOperator diagonal(std::span<const double> values);
    static SparseOperator from_dense(const Eigen::MatrixXcd& m, bool hermitian = false);

    std::size_t dim() const { return dim_; }
    std::size_t nnz() const { return entries_.size(); }
    bool hermitian() const { return hermitian_; }
    const std::vector<Entry>& entries() const { return entries_; }

    /// CSR row pointers into entries(); size dim()+1.
    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }

    cplx element(std::size_t row, std::size_t col) const;

    SparseOperator adjoint() const;
    SparseOperator scaled(cplx factor) const;

    /// Largest entry magnitude of A − A†.
    double hermiticity_defect() const;
    double max_abs() const;
    /// Max absolute row sum; an upper bound on the spectral norm.
    double inf_norm() const;

    Eigen::MatrixXcd to_dense() const;

    /// y = A x.
    void apply(std::span<const cplx> x, std::span<cplx> y) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

    friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);

private:
    std::size_t dim_ = 0;
    std::vector<Entry> entries_;
    std::vector<std::size_t> row_ptr_{0};
    bool hermitian_ = false;
};

/// A·B − B·A.
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

/// ⟨u|A|v⟩.
cplx matrix_element(const Eigen::VectorXcd& u, const SparseOperator& a, const Eigen::VectorXcd& v);

}  // namespace jcl
