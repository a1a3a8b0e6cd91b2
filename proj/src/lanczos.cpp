#include "jcl/lanczos.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace jcl {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Eigen::VectorXcd deterministic_start_vector(std::size_t dim, std::uint64_t seed) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    std::uint64_t state = seed;
    const double amp = 1.0 / std::sqrt(double(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const double u = double(splitmix64(state) >> 11) * 0x1.0p-53;
        v(Eigen::Index(i)) = std::polar(amp, 2.0 * std::numbers::pi * u);
    }
    return v;
}

LanczosResult lanczos_ground_state(const SparseOperator& h, const Eigen::VectorXcd& start, const LanczosOptions& opt) {
    const auto n = Eigen::Index(h.dim());
    if (start.size() != n) throw std::invalid_argument("lanczos: start vector dimension mismatch");
    if (n == 0) throw std::invalid_argument("lanczos: empty operator");
    const double scale = std::max(h.inf_norm(), 1e-300);

    LanczosResult res;
    Eigen::VectorXcd x = start.normalized();
    double last_residual = std::numeric_limits<double>::infinity();

    for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
        const Eigen::Index m_max = std::min<Eigen::Index>(opt.krylov_dim, n);
        Eigen::MatrixXcd q(n, m_max);
        std::vector<double> alpha, beta;
        q.col(0) = x;
        Eigen::Index m = 0;
        for (Eigen::Index j = 0; j < m_max; ++j) {
            Eigen::VectorXcd w = h.apply(Eigen::VectorXcd(q.col(j)));
            ++res.matvecs;
            alpha.push_back(q.col(j).dot(w).real());
            // Two passes of classical Gram-Schmidt against the whole basis.
            for (int pass = 0; pass < 2; ++pass) {
                w -= q.leftCols(j + 1) * (q.leftCols(j + 1).adjoint() * w);
            }
            m = j + 1;
            const double b = w.norm();
            if (j + 1 == m_max || b <= 1e-14 * scale) break;
            beta.push_back(b);
            q.col(j + 1) = w / b;
        }

        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            t(i, i) = alpha[std::size_t(i)];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[std::size_t(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        res.ritz_values.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);

        x = (q.leftCols(m) * es.eigenvectors().col(0).cast<cplx>()).normalized();
        res.value = es.eigenvalues()(0);
        const Eigen::VectorXcd r = h.apply(x) - res.value * x;
        ++res.matvecs;
        last_residual = r.norm();
        if (last_residual <= opt.rel_tol * scale) {
            res.vector = x;
            res.residual = last_residual;
            return res;
        }
        // A complete Krylov space cannot improve further.
        if (m == n && cycle > 0) break;
    }
    if (last_residual <= opt.accept_tol * scale) {
        res.vector = x;
        res.residual = last_residual;
        return res;
    }
    throw ConvergenceError("lanczos: residual " + std::to_string(last_residual) + " above tolerance after " +
                               std::to_string(opt.max_cycles) + " cycles",
                           last_residual);
}

}  // namespace jcl
