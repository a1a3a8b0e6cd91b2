#include "jcl/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "jcl/kernels.hpp"

namespace jcl {

SparseOperator::SparseOperator(std::size_t dim, std::vector<Entry> entries, bool hermitian)
    : dim_(dim), hermitian_(hermitian) {
    for (const auto& e : entries) {
        if (e.row >= dim || e.col >= dim) {
            throw std::invalid_argument("SparseOperator: entry (" + std::to_string(e.row) + ", " +
                                        std::to_string(e.col) + ") outside dimension " +
                                        std::to_string(dim));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    entries_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size();) {
        Entry merged = entries[i];
        std::size_t k = i + 1;
        while (k < entries.size() && entries[k].row == merged.row && entries[k].col == merged.col) {
            merged.value += entries[k].value;
            ++k;
        }
        if (std::abs(merged.value) >= kDropTolerance) entries_.push_back(merged);
        i = k;
    }

    row_ptr_.assign(dim_ + 1, 0);
    for (const auto& e : entries_) ++row_ptr_[e.row + 1];
    for (std::size_t r = 0; r < dim_; ++r) row_ptr_[r + 1] += row_ptr_[r];

    if (hermitian_ && hermiticity_defect() > kHermitianTolerance) {
        throw std::invalid_argument("SparseOperator: flagged Hermitian but ‖A − A†‖_max = " +
                                    std::to_string(hermiticity_defect()));
    }
}

SparseOperator SparseOperator::identity(std::size_t dim) {
    std::vector<Entry> e;
    e.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) e.push_back({i, i, 1.0});
    return SparseOperator(dim, std::move(e), true);
}

SparseOperator SparseOperator::diagonal(std::span<const double> values) {
    std::vector<Entry> e;
    e.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) e.push_back({i, i, values[i]});
    return SparseOperator(values.size(), std::move(e), true);
}

SparseOperator SparseOperator::from_dense(const Eigen::MatrixXcd& m, bool hermitian) {
    if (m.rows() != m.cols()) throw std::invalid_argument("from_dense: matrix is not square");
    std::vector<Entry> e;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (m(r, c) != cplx{}) e.push_back({std::size_t(r), std::size_t(c), m(r, c)});
    return SparseOperator(std::size_t(m.rows()), std::move(e), hermitian);
}

cplx SparseOperator::element(std::size_t row, std::size_t col) const {
    if (row >= dim_ || col >= dim_) throw std::out_of_range("SparseOperator::element");
    auto first = entries_.begin() + std::ptrdiff_t(row_ptr_[row]);
    auto last = entries_.begin() + std::ptrdiff_t(row_ptr_[row + 1]);
    auto it = std::lower_bound(first, last, col, [](const Entry& e, std::size_t c) { return e.col < c; });
    return (it != last && it->col == col) ? it->value : cplx{};
}

SparseOperator SparseOperator::adjoint() const {
    std::vector<Entry> e;
    e.reserve(entries_.size());
    for (const auto& x : entries_) e.push_back({x.col, x.row, std::conj(x.value)});
    return SparseOperator(dim_, std::move(e), hermitian_);
}

SparseOperator SparseOperator::scaled(cplx factor) const {
    std::vector<Entry> e = entries_;
    for (auto& x : e) x.value *= factor;
    return SparseOperator(dim_, std::move(e), hermitian_ && factor.imag() == 0.0);
}

double SparseOperator::hermiticity_defect() const {
    double worst = 0.0;
    for (const auto& e : entries_) {
        worst = std::max(worst, std::abs(e.value - std::conj(element(e.col, e.row))));
    }
    return worst;
}

double SparseOperator::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
}

double SparseOperator::inf_norm() const {
    double best = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(entries_[k].value);
        best = std::max(best, s);
    }
    return best;
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index(dim_), Eigen::Index(dim_));
    for (const auto& e : entries_) m(Eigen::Index(e.row), Eigen::Index(e.col)) = e.value;
    return m;
}

void SparseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
    kernels::spmv(*this, x, y);
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
    if (std::size_t(x.size()) != dim_) throw std::invalid_argument("SparseOperator::apply: dimension mismatch");
    Eigen::VectorXcd y(x.size());
    kernels::spmv(*this, {x.data(), dim_}, {y.data(), dim_});
    return y;
}

namespace {

SparseOperator combine(const SparseOperator& a, const SparseOperator& b, double sign) {
    if (a.dim() != b.dim()) throw std::invalid_argument("SparseOperator: dimension mismatch in sum");
    std::vector<Entry> e = a.entries();
    e.reserve(a.nnz() + b.nnz());
    for (const auto& x : b.entries()) e.push_back({x.row, x.col, sign * x.value});
    return SparseOperator(a.dim(), std::move(e), a.hermitian() && b.hermitian());
}

}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return combine(a, b, 1.0); }
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return combine(a, b, -1.0); }

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("SparseOperator: dimension mismatch in product");
    std::vector<Entry> out;
    const auto& ae = a.entries();
    const auto& be = b.entries();
    const auto& bp = b.row_ptr();
    for (const auto& x : ae) {
        for (std::size_t k = bp[x.col]; k < bp[x.col + 1]; ++k) {
            out.push_back({x.row, be[k].col, x.value * be[k].value});
        }
    }
    return SparseOperator(a.dim(), std::move(out), false);
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

cplx matrix_element(const Eigen::VectorXcd& u, const SparseOperator& a, const Eigen::VectorXcd& v) {
    return u.dot(a.apply(v));
}

}  // namespace jcl
