#include "jcl/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jcl {

SiteBasis::SiteBasis(int n_max) : n_max_(n_max) {
    if (n_max < 1) throw std::invalid_argument("SiteBasis: n_max must be >= 1, got " + std::to_string(n_max));
}

LocalState SiteBasis::state(std::size_t i) const {
    if (i >= dim()) throw std::out_of_range("SiteBasis::state");
    return {int(i / 2), static_cast<Qubit>(i % 2)};
}

std::size_t SiteBasis::index(int fock, Qubit q) const {
    if (fock < 0 || fock > n_max_) throw std::out_of_range("SiteBasis::index: fock out of range");
    return std::size_t(2 * fock) + static_cast<std::size_t>(q);
}

std::uint64_t ChainGeometry::full_dim() const {
    validate();
    std::uint64_t d = 1;
    for (int j = 0; j < sites; ++j) {
        if (d > std::numeric_limits<std::uint64_t>::max() / site_dim())
            throw std::length_error("ChainGeometry: full dimension overflows 64 bits");
        d *= site_dim();
    }
    return d;
}

void ChainGeometry::validate() const {
    if (sites < 1) throw std::invalid_argument("chain needs at least one site, got " + std::to_string(sites));
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1, got " + std::to_string(n_max));
}

ProductBasis::ProductBasis(ChainGeometry g, std::vector<std::uint64_t> indices, bool is_full)
    : geometry_(g), full_(std::move(indices)), full_dim_(g.full_dim()), is_full_(is_full) {
    stride_.assign(std::size_t(g.sites), 1);
    for (int j = g.sites - 2; j >= 0; --j) stride_[std::size_t(j)] = stride_[std::size_t(j + 1)] * g.site_dim();
}

ProductBasis ProductBasis::full(ChainGeometry g) {
    g.validate();
    return ProductBasis(g, {}, true);
}

ProductBasis ProductBasis::excitation_window(ChainGeometry g, int min_total, int max_total) {
    g.validate();
    const auto d = g.site_dim();
    const int per_site_max = g.n_max + 1;
    std::vector<std::uint64_t> out;

    // Depth-first over sites, site 0 outermost, digits ascending: indices come out sorted.
    auto visit = [&](auto&& self, int site, std::uint64_t prefix, int used) -> void {
        const int remaining_sites = g.sites - site;
        if (used > max_total) return;
        if (used + remaining_sites * per_site_max < min_total) return;
        if (site == g.sites) {
            if (used >= min_total) out.push_back(prefix);
            return;
        }
        for (std::size_t k = 0; k < d; ++k) {
            const int exc = int(k / 2) + int(k % 2);
            self(self, site + 1, prefix * d + k, used + exc);
        }
    };
    visit(visit, 0, 0, 0);
    return ProductBasis(g, std::move(out), false);
}

std::optional<std::size_t> ProductBasis::find(std::uint64_t full_index) const {
    if (is_full_) {
        if (full_index < full_dim_) return std::size_t(full_index);
        return std::nullopt;
    }
    auto it = std::lower_bound(full_.begin(), full_.end(), full_index);
    if (it == full_.end() || *it != full_index) return std::nullopt;
    return std::size_t(it - full_.begin());
}

std::size_t ProductBasis::local_index(std::size_t i, int site) const {
    return std::size_t((full_index(i) / stride_[std::size_t(site)]) % geometry_.site_dim());
}

LocalState ProductBasis::local_state(std::size_t i, int site) const {
    const auto k = local_index(i, site);
    return {int(k / 2), static_cast<Qubit>(k % 2)};
}

int ProductBasis::total_excitations(std::size_t i) const {
    int n = 0;
    for (int j = 0; j < geometry_.sites; ++j) n += excitations(i, j);
    return n;
}

Eigen::VectorXcd ProductBasis::restrict_vector(const Eigen::VectorXcd& full) const {
    if (std::uint64_t(full.size()) != full_dim_) throw std::invalid_argument("restrict_vector: dimension mismatch");
    Eigen::VectorXcd out(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) out(Eigen::Index(i)) = full(Eigen::Index(full_index(i)));
    return out;
}

Eigen::VectorXcd ProductBasis::extend_vector(const Eigen::VectorXcd& local) const {
    if (std::size_t(local.size()) != size()) throw std::invalid_argument("extend_vector: dimension mismatch");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index(full_dim_));
    for (std::size_t i = 0; i < size(); ++i) out(Eigen::Index(full_index(i))) = local(Eigen::Index(i));
    return out;
}

SectorBasis::SectorBasis(ChainGeometry g, int n_total)
    : ProductBasis(ProductBasis::excitation_window(g, n_total, n_total)), n_total_(n_total) {}

SectorBasis sector_basis(int sites, int n_max, int n_total) {
    ChainGeometry g{sites, n_max};
    g.validate();
    return SectorBasis(g, n_total);
}

SiteOperators site_operators(int n_max) {
    const SiteBasis basis(n_max);
    const auto d = basis.dim();
    std::vector<Entry> a, sm, nf, nq;
    for (int n = 1; n <= n_max; ++n) {
        for (Qubit q : {Qubit::down, Qubit::up}) {
            a.push_back({basis.index(n - 1, q), basis.index(n, q), std::sqrt(double(n))});
        }
    }
    for (int n = 0; n <= n_max; ++n) {
        sm.push_back({basis.index(n, Qubit::down), basis.index(n, Qubit::up), 1.0});
        for (Qubit q : {Qubit::down, Qubit::up}) {
            nf.push_back({basis.index(n, q), basis.index(n, q), double(n)});
            nq.push_back({basis.index(n, q), basis.index(n, q), q == Qubit::up ? 1.0 : 0.0});
        }
    }
    SparseOperator a_op(d, a);
    SparseOperator sm_op(d, sm);
    return {a_op,
            a_op.adjoint(),
            sm_op,
            sm_op.adjoint(),
            SparseOperator(d, nf, true),
            SparseOperator(d, nq, true)};
}

void OperatorSum::check(int site, const SparseOperator& op) const {
    if (site < 0 || site >= geometry_.sites)
        throw std::invalid_argument("OperatorSum: site " + std::to_string(site) + " out of range");
    if (op.dim() != geometry_.site_dim())
        throw std::invalid_argument("OperatorSum: operator dimension " + std::to_string(op.dim()) +
                                    " does not match site dimension " + std::to_string(geometry_.site_dim()));
}

OperatorSum& OperatorSum::add(cplx coeff, int site, const SparseOperator& op) {
    check(site, op);
    terms_.push_back({coeff, {{site, op}}});
    return *this;
}

OperatorSum& OperatorSum::add(cplx coeff, int site_a, const SparseOperator& op_a, int site_b,
                              const SparseOperator& op_b) {
    check(site_a, op_a);
    check(site_b, op_b);
    terms_.push_back({coeff, {{site_a, op_a}, {site_b, op_b}}});
    return *this;
}

OperatorSum& OperatorSum::append(const OperatorSum& other) {
    if (other.geometry_.sites != geometry_.sites || other.geometry_.n_max != geometry_.n_max)
        throw std::invalid_argument("OperatorSum::append: geometry mismatch");
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

namespace {

// Column-wise view of a small local operator: for each input digit, the
// (output digit, value) pairs.
using LocalColumns = std::vector<std::vector<std::pair<std::size_t, cplx>>>;

LocalColumns columns_of(const SparseOperator& op) {
    LocalColumns cols(op.dim());
    for (const auto& e : op.entries()) cols[e.col].push_back({e.row, e.value});
    return cols;
}

}  // namespace

SparseOperator assemble(const OperatorSum& op, const ProductBasis& basis, bool hermitian) {
    const auto& g = op.geometry();
    if (g.sites != basis.geometry().sites || g.n_max != basis.geometry().n_max)
        throw std::invalid_argument("assemble: operator and basis geometries differ");

    const std::uint64_t d = g.site_dim();
    std::vector<std::uint64_t> stride(std::size_t(g.sites), 1);
    for (int j = g.sites - 2; j >= 0; --j) stride[std::size_t(j)] = stride[std::size_t(j + 1)] * d;

    struct PreparedTerm {
        cplx coeff;
        std::vector<int> sites;
        std::vector<LocalColumns> cols;
    };
    std::vector<PreparedTerm> prepared;
    prepared.reserve(op.terms().size());
    for (const auto& t : op.terms()) {
        PreparedTerm p{t.coeff, {}, {}};
        for (const auto& f : t.factors) {
            p.sites.push_back(f.site);
            p.cols.push_back(columns_of(f.op));
        }
        prepared.push_back(std::move(p));
    }

    std::vector<Entry> entries;
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const std::uint64_t in = basis.full_index(col);
        for (const auto& t : prepared) {
            // Factors are applied right to left, matching operator products.
            auto expand = [&](auto&& self, std::size_t k, std::uint64_t state, cplx amp) -> void {
                if (k == 0) {
                    if (auto row = basis.find(state)) entries.push_back({*row, col, t.coeff * amp});
                    return;
                }
                const auto site = std::size_t(t.sites[k - 1]);
                const std::uint64_t digit = (state / stride[site]) % d;
                for (const auto& [out_digit, v] : t.cols[k - 1][digit]) {
                    const std::uint64_t next = state - digit * stride[site] + out_digit * stride[site];
                    self(self, k - 1, next, amp * v);
                }
            };
            expand(expand, t.sites.size(), in, cplx{1.0});
        }
    }
    return SparseOperator(basis.size(), std::move(entries), hermitian);
}

SparseOperator embed(const SparseOperator& op, int site, ChainGeometry g) {
    OperatorSum sum(g);
    sum.add(1.0, site, op);
    return assemble(sum, ProductBasis::full(g), op.hermitian());
}

}  // namespace jcl
