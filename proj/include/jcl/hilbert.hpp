#pragma once

// Product Hilbert spaces of qubit ⊗ truncated-oscillator sites.
//
// Ordering conventions (fixed, so dumps of operators are reproducible):
//   * within a site, states are fock-major, qubit-minor:
//       index(fock, qubit) = 2·fock + qubit, qubit down = 0, up = 1;
//   * across the chain site 0 is the slowest-varying digit:
//       full = Σ_j local_j · d^(M−1−j), d = 2·(n_max+1).

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "jcl/sparse.hpp"

namespace jcl {

enum class Qubit : std::uint8_t { down = 0, up = 1 };

struct LocalState {
    int fock = 0;
    Qubit qubit = Qubit::down;

    int excitations() const { return fock + static_cast<int>(qubit); }
    friend bool operator==(const LocalState&, const LocalState&) = default;
};

class SiteBasis {
public:
    explicit SiteBasis(int n_max);

    int n_max() const { return n_max_; }
    std::size_t dim() const { return std::size_t(2 * (n_max_ + 1)); }
    LocalState state(std::size_t i) const;
    std::size_t index(int fock, Qubit q) const;

private:
    int n_max_;
};

/// Shape of an open chain: number of sites and per-site Fock cutoff.
struct ChainGeometry {
    int sites = 1;
    int n_max = 1;

    std::size_t site_dim() const { return std::size_t(2 * (n_max + 1)); }
    /// d^M; throws std::length_error when it does not fit in 64 bits.
    std::uint64_t full_dim() const;
    void validate() const;
};

/// Ordered subset of product states, sorted by full-space index.
class ProductBasis {
public:
    /// Every product state.
    static ProductBasis full(ChainGeometry g);
    /// States with Σ_j excitations_j in [min_total, max_total].
    static ProductBasis excitation_window(ChainGeometry g, int min_total, int max_total);

    const ChainGeometry& geometry() const { return geometry_; }
    std::size_t size() const { return is_full_ ? std::size_t(full_dim_) : full_.size(); }
    bool is_full() const { return is_full_; }

    std::uint64_t full_index(std::size_t i) const { return is_full_ ? i : full_[i]; }
    std::optional<std::size_t> find(std::uint64_t full_index) const;

    /// Local basis index of `site` in basis state i.
    std::size_t local_index(std::size_t i, int site) const;
    LocalState local_state(std::size_t i, int site) const;
    int excitations(std::size_t i, int site) const { return local_state(i, site).excitations(); }
    int total_excitations(std::size_t i) const;

    /// Restricts a full-space vector to this basis (drops components outside).
    Eigen::VectorXcd restrict_vector(const Eigen::VectorXcd& full) const;
    /// Embeds a vector on this basis into the full space (zeros elsewhere).
    Eigen::VectorXcd extend_vector(const Eigen::VectorXcd& local) const;

protected:
    ProductBasis(ChainGeometry g, std::vector<std::uint64_t> indices, bool is_full);

private:
    ChainGeometry geometry_;
    std::vector<std::uint64_t> full_;  // empty when is_full_
    std::vector<std::uint64_t> stride_;
    std::uint64_t full_dim_ = 0;
    bool is_full_ = false;
};

/// States of fixed total excitation number.
class SectorBasis : public ProductBasis {
public:
    SectorBasis(ChainGeometry g, int n_total);
    int n_total() const { return n_total_; }

private:
    int n_total_;
};

/// M sites, cutoff n_max, Σ excitations = n_total. An unsatisfiable n_total
/// gives an empty basis. Throws std::invalid_argument for M < 1 or n_max < 1.
SectorBasis sector_basis(int sites, int n_max, int n_total);

/// Named single-site operators on SiteBasis(n_max). a is truncated:
/// a†|n_max⟩ = 0.
struct SiteOperators {
    SparseOperator a;
    SparseOperator a_dag;
    SparseOperator sigma_minus;
    SparseOperator sigma_plus;
    SparseOperator n_fock;
    SparseOperator n_qubit;
};

/// Throws std::invalid_argument for n_max < 1.
SiteOperators site_operators(int n_max);

/// One product term coeff · ⊗_k op_k acting on the listed sites (identity elsewhere).
struct ProductTerm {
    struct Factor {
        int site;
        SparseOperator op;
    };
    cplx coeff{1.0};
    std::vector<Factor> factors;
};

/// Sum of product terms; the symbolic form of a chain operator.
class OperatorSum {
public:
    explicit OperatorSum(ChainGeometry g) : geometry_(g) {}

    OperatorSum& add(cplx coeff, int site, const SparseOperator& op);
    OperatorSum& add(cplx coeff, int site_a, const SparseOperator& op_a, int site_b, const SparseOperator& op_b);
    OperatorSum& append(const OperatorSum& other);

    const ChainGeometry& geometry() const { return geometry_; }
    const std::vector<ProductTerm>& terms() const { return terms_; }

private:
    void check(int site, const SparseOperator& op) const;

    ChainGeometry geometry_;
    std::vector<ProductTerm> terms_;
};

/// Matrix of P·O·P on `basis`, where P projects onto the basis span.
SparseOperator assemble(const OperatorSum& op, const ProductBasis& basis, bool hermitian = false);

/// Site-local operator embedded at `site` of the full chain space; keeps
/// op's Hermitian flag.
SparseOperator embed(const SparseOperator& op, int site, ChainGeometry g);

}  // namespace jcl
