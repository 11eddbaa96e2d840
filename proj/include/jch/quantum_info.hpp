// quantum_info.hpp: reduced states, partial transpose, negativity, purity and
// fidelity over arbitrary tensor factorizations.

#pragma once

#include "jch/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace jch {

/// Eigenvalues below -kNegativeCutoff count as negative in the partial transpose.
inline constexpr double kNegativeCutoff = 1e-12;

class DensityMatrix {
public:
    DensityMatrix() = default;

    DensityMatrix(std::vector<int> dims, CMatrix matrix) : dims_(std::move(dims)), matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("DensityMatrix: matrix must be square");
        if (static_cast<Eigen::Index>(product(dims_)) != matrix_.rows())
            throw std::invalid_argument("DensityMatrix: dims do not factor the matrix dimension");
    }

    static DensityMatrix from_pure(const QuantumState& psi, std::vector<int> dims) {
        const CVector& v = psi.amplitudes();
        return DensityMatrix(std::move(dims), v * v.adjoint());
    }

    const std::vector<int>& dims() const noexcept { return dims_; }
    const CMatrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

    cplx trace() const { return matrix_.trace(); }
    double purity() const { return (matrix_ * matrix_).trace().real(); }

    /// Unit trace, hermiticity and positivity within tol.
    bool is_valid(double tol = 1e-10) const {
        if (std::abs(trace() - cplx(1.0)) > tol) return false;
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff() >= -tol;
    }

    static std::size_t product(const std::vector<int>& d) {
        std::size_t p = 1;
        for (int x : d) {
            if (x < 1) throw std::invalid_argument("DensityMatrix: subsystem dimensions must be positive");
            p *= static_cast<std::size_t>(x);
        }
        return p;
    }

private:
    std::vector<int> dims_;
    CMatrix matrix_;
};

namespace detail {

inline std::vector<std::size_t> strides(const std::vector<int>& dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * static_cast<std::size_t>(dims[k + 1]);
    return s;
}

inline std::vector<int> checked_subset(std::vector<int> subset, std::size_t n, const char* who) {
    std::sort(subset.begin(), subset.end());
    if (subset.empty()) throw std::invalid_argument(std::string(who) + ": subsystem set must be non-empty");
    if (std::adjacent_find(subset.begin(), subset.end()) != subset.end())
        throw std::invalid_argument(std::string(who) + ": repeated subsystem index");
    if (subset.front() < 0 || static_cast<std::size_t>(subset.back()) >= n)
        throw std::invalid_argument(std::string(who) + ": subsystem index out of range");
    return subset;
}

/// For each full index, its (kept, traced) coordinates.
struct Split {
    std::vector<std::size_t> kept, env;
    std::size_t kept_dim = 1, env_dim = 1;
    std::vector<int> kept_dims;
};

inline Split split_indices(const std::vector<int>& dims, const std::vector<int>& keep) {
    Split sp;
    std::vector<bool> is_kept(dims.size(), false);
    for (int k : keep) is_kept[k] = true;
    std::vector<int> env_dims;
    for (std::size_t s = 0; s < dims.size(); ++s) (is_kept[s] ? sp.kept_dims : env_dims).push_back(dims[s]);
    sp.kept_dim = DensityMatrix::product(sp.kept_dims);
    sp.env_dim = env_dims.empty() ? 1 : DensityMatrix::product(env_dims);
    const auto total = DensityMatrix::product(dims);
    sp.kept.resize(total);
    sp.env.resize(total);
    const auto st = strides(dims);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t k = 0, e = 0;
        for (std::size_t s = 0; s < dims.size(); ++s) {
            const std::size_t digit = (i / st[s]) % static_cast<std::size_t>(dims[s]);
            if (is_kept[s]) k = k * static_cast<std::size_t>(dims[s]) + digit;
            else e = e * static_cast<std::size_t>(dims[s]) + digit;
        }
        sp.kept[i] = k;
        sp.env[i] = e;
    }
    return sp;
}

}  // namespace detail

/// Reduced state on `keep` (ascending subsystem order) of a pure state.
inline DensityMatrix partial_trace(const QuantumState& psi, std::vector<int> keep, const std::vector<int>& dims) {
    keep = detail::checked_subset(std::move(keep), dims.size(), "partial_trace");
    if (DensityMatrix::product(dims) != psi.dim())
        throw std::invalid_argument("partial_trace: dims do not factor the state dimension");
    const auto sp = detail::split_indices(dims, keep);
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(sp.kept_dim), static_cast<Eigen::Index>(sp.env_dim));
    for (std::size_t i = 0; i < psi.dim(); ++i)
        m(static_cast<Eigen::Index>(sp.kept[i]), static_cast<Eigen::Index>(sp.env[i])) = psi[i];
    return DensityMatrix(sp.kept_dims, m * m.adjoint());
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
    const auto& dims = rho.dims();
    keep = detail::checked_subset(std::move(keep), dims.size(), "partial_trace");
    const auto sp = detail::split_indices(dims, keep);
    // full index for each (kept, env) pair
    std::vector<std::size_t> full(sp.kept_dim * sp.env_dim);
    for (std::size_t i = 0; i < sp.kept.size(); ++i) full[sp.env[i] * sp.kept_dim + sp.kept[i]] = i;
    const auto kd = static_cast<Eigen::Index>(sp.kept_dim);
    CMatrix out = CMatrix::Zero(kd, kd);
    const CMatrix& m = rho.matrix();
    for (std::size_t e = 0; e < sp.env_dim; ++e)
        for (Eigen::Index c = 0; c < kd; ++c) {
            const auto jc = static_cast<Eigen::Index>(full[e * sp.kept_dim + c]);
            for (Eigen::Index r = 0; r < kd; ++r)
                out(r, c) += m(static_cast<Eigen::Index>(full[e * sp.kept_dim + r]), jc);
        }
    return DensityMatrix(sp.kept_dims, std::move(out));
}

/// rho^{T_A}: transpose on the subsystems in `partition_a`.
inline CMatrix partial_transpose(const DensityMatrix& rho, std::vector<int> partition_a) {
    const auto& dims = rho.dims();
    partition_a = detail::checked_subset(std::move(partition_a), dims.size(), "partial_transpose");
    const auto st = detail::strides(dims);
    const auto n = static_cast<std::size_t>(rho.dim());
    std::vector<std::size_t> a_part(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (int s : partition_a) a_part[i] += ((i / st[s]) % static_cast<std::size_t>(dims[s])) * st[s];
    CMatrix out(rho.dim(), rho.dim());
    const CMatrix& m = rho.matrix();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ri = i - a_part[i], rj = j - a_part[j];
            out(static_cast<Eigen::Index>(a_part[j] + ri), static_cast<Eigen::Index>(a_part[i] + rj)) =
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    return out;
}

/// Sum of |negative eigenvalues| of rho^{T_A}.
inline double negativity(const DensityMatrix& rho, std::vector<int> partition_a) {
    const CMatrix pt = partial_transpose(rho, std::move(partition_a));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(pt, Eigen::EigenvaluesOnly);
    double n = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()(k) < -kNegativeCutoff) n -= es.eigenvalues()(k);
    return n;
}

/// Negativity of a pure bipartite state from its Schmidt coefficients:
/// ((sum_k s_k)^2 - 1) / 2. `partition_a` and its complement cover all subsystems.
inline double negativity_pure(const QuantumState& psi, std::vector<int> partition_a, const std::vector<int>& dims) {
    partition_a = detail::checked_subset(std::move(partition_a), dims.size(), "negativity_pure");
    if (DensityMatrix::product(dims) != psi.dim())
        throw std::invalid_argument("negativity_pure: dims do not factor the state dimension");
    const auto sp = detail::split_indices(dims, partition_a);
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(sp.kept_dim), static_cast<Eigen::Index>(sp.env_dim));
    for (std::size_t i = 0; i < psi.dim(); ++i)
        m(static_cast<Eigen::Index>(sp.kept[i]), static_cast<Eigen::Index>(sp.env[i])) = psi[i];
    Eigen::JacobiSVD<CMatrix> svd(m);
    const double s = svd.singularValues().sum();
    const double n = 0.5 * (s * s - 1.0);
    return n > kNegativeCutoff ? n : 0.0;
}

/// 1 - tr(rho^2)
inline double purity_entanglement(const DensityMatrix& rho) { return 1.0 - rho.purity(); }

inline double fidelity(const QuantumState& psi, const QuantumState& phi) { return std::norm(psi.inner(phi)); }

// ----------------------- lattice-aware convenience views ----------------------
// Fine subsystem layout of a lattice state: (atom_0, photon_0, atom_1, photon_1, ...).

inline void check_site(const HilbertSpace& space, int site) {
    if (site < 0 || site >= space.n_sites()) throw std::out_of_range("site index out of range");
}

/// Single-site reduced state, dims (atom, photon).
inline DensityMatrix site_reduced_state(const QuantumState& psi, int site, const HilbertSpace& space) {
    check_site(space, site);
    return partial_trace(psi, {2 * site, 2 * site + 1}, space.fine_dims());
}

/// Atom-photon negativity within one site, everything else traced out.
inline double in_site_entanglement(const QuantumState& psi, int site, const HilbertSpace& space) {
    return negativity(site_reduced_state(psi, site, space), {0});
}

/// Negativity between two whole sites.
inline double site_site_entanglement(const QuantumState& psi, int site_a, int site_b, const HilbertSpace& space) {
    check_site(space, site_a);
    check_site(space, site_b);
    if (site_a == site_b) throw std::invalid_argument("site_site_entanglement: sites must differ");
    if (space.n_sites() == 2) return negativity_pure(psi, {site_a}, space.site_dims());
    auto rho = partial_trace(psi, {site_a, site_b}, space.site_dims());
    return negativity(rho, {0});
}

/// Negativity between the dopants of two sites, all photon modes traced out.
inline double atom_atom_entanglement(const QuantumState& psi, int site_a, int site_b, const HilbertSpace& space) {
    check_site(space, site_a);
    check_site(space, site_b);
    if (site_a == site_b) throw std::invalid_argument("atom_atom_entanglement: sites must differ");
    auto rho = partial_trace(psi, {2 * site_a, 2 * site_b}, space.fine_dims());
    return negativity(rho, {site_a < site_b ? 0 : 1});
}

}  // namespace jch
