// eigensolve.hpp: lowest eigenpairs of hermitian Hamiltonians, in the full space
// or restricted to a fixed total-excitation sector.

#pragma once

#include "jch/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jch {

struct SolverOptions {
    double tol = 1e-9;             // residual bound ||H psi - E psi||
    int dense_threshold = 2048;    // dense solve at or below this dimension
    int krylov_dim = 120;          // Lanczos subspace size per restart
    int max_restarts = 400;
    double degeneracy_tol = 1e-10;
    double truncation_flag = 1e-4; // flag when top-photon occupancy exceeds this
};

struct EigResult {
    double energy = 0.0;
    QuantumState state;
    double residual = 0.0;
    double truncation_weight = 0.0;
    bool truncated = false;
    bool degenerate = false;
    double gap = std::numeric_limits<double>::infinity();  // E1 - E0 (estimate on the Lanczos path)
    int iterations = 0;                                    // Lanczos restarts; 0 for dense
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Raised when a sector-restricted solve is requested for an operator that does not
/// conserve the total excitation number.
class ConservationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

/// Fixes the global phase so the largest-magnitude amplitude is real positive.
template <class Vec>
void fix_phase(Vec& v) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    if constexpr (std::is_same_v<typename Vec::Scalar, cplx>) {
        const cplx p = v(k) / std::abs(v(k));
        v /= p;
    } else {
        if (v(k) < 0) v = -v;
    }
}

inline CVector start_vector(Eigen::Index dim) {
    // all-ones plus a small deterministic ramp
    CVector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = 1.0 + 0.1 * std::cos(0.7 * double(k) + 0.3);
    return v.normalized();
}

}  // namespace detail

struct DenseEigenpair {
    double energy;
    CVector vector;
    double gap;
};

inline DenseEigenpair lowest_eigenpair_dense(const RMatrix& h) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", std::numeric_limits<double>::infinity());
    RVector v = es.eigenvectors().col(0);
    detail::fix_phase(v);
    const double gap = h.rows() > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : std::numeric_limits<double>::infinity();
    return {es.eigenvalues()(0), v.cast<cplx>(), gap};
}

inline DenseEigenpair lowest_eigenpair_dense(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", std::numeric_limits<double>::infinity());
    CVector v = es.eigenvectors().col(0);
    detail::fix_phase(v);
    const double gap = h.rows() > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : std::numeric_limits<double>::infinity();
    return {es.eigenvalues()(0), v, gap};
}

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (d, e) below x.
inline int sturm_count(const RVector& d, const RVector& e, double x) {
    int count = 0;
    double q = 1.0;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        q = d(i) - x - (i > 0 ? e(i - 1) * e(i - 1) / q : 0.0);
        if (std::abs(q) < tiny) q = -tiny;
        if (q < 0.0) ++count;
    }
    return count;
}

/// k-th smallest eigenvalue (0-based) of a symmetric tridiagonal by bisection.
inline double tridiagonal_eigenvalue(const RVector& d, const RVector& e, int k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double r = (i > 0 ? std::abs(e(i - 1)) : 0.0) + (i + 1 < d.size() ? std::abs(e(i)) : 0.0);
        lo = std::min(lo, d(i) - r);
        hi = std::max(hi, d(i) + r);
    }
    const double eps = 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    while (hi - lo > eps) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(d, e, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Two steps of inverse iteration on (T - shift) with partial pivoting.
inline RVector tridiagonal_eigenvector(const RVector& d, const RVector& e, double shift) {
    const Eigen::Index n = d.size();
    // U has diagonal u0 and two superdiagonals u1, u2; L stored as multipliers and swaps
    RVector u0(n), u1 = RVector::Zero(n), u2 = RVector::Zero(n), mult = RVector::Zero(n);
    std::vector<char> swapped(n, 0);
    const double scale = std::max(d.cwiseAbs().maxCoeff(), n > 1 ? e.cwiseAbs().maxCoeff() : 0.0);
    const double floor = std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
    double a = d(0) - shift, b = n > 1 ? e(0) : 0.0, c = 0.0;  // current row: a (diag), b, c
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double sub = e(i);
        double nd = d(i + 1) - shift, ne = i + 1 < n - 1 ? e(i + 1) : 0.0;
        if (std::abs(sub) > std::abs(a)) {
            swapped[i] = 1;
            u0(i) = sub;
            u1(i) = nd;
            u2(i) = ne;
            const double m = a / sub;
            mult(i) = m;
            a = b - m * nd;
            b = c - m * ne;
            c = 0.0;
        } else {
            if (std::abs(a) < floor) a = floor;
            u0(i) = a;
            u1(i) = b;
            u2(i) = c;
            const double m = sub / a;
            mult(i) = m;
            a = nd - m * b;
            b = ne - m * c;  // c is 0 unless a swap happened two rows up
            c = 0.0;
        }
    }
    if (std::abs(a) < floor) a = floor;
    u0(n - 1) = a;
    RVector v = RVector::Ones(n);
    for (int pass = 0; pass < 2; ++pass) {
        if (pass > 0) {
            // forward substitution with L
            for (Eigen::Index i = 0; i + 1 < n; ++i) {
                if (swapped[i]) std::swap(v(i), v(i + 1));
                v(i + 1) -= mult(i) * v(i);
            }
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            double s = v(i);
            if (i + 1 < n) s -= u1(i) * v(i + 1);
            if (i + 2 < n) s -= u2(i) * v(i + 2);
            v(i) = s / u0(i);
        }
        v.normalize();
    }
    return v;
}

}  // namespace detail

struct RealEigenpair {
    double energy;
    RVector vector;
    double gap;
};

/// Lowest eigenpair of a real symmetric matrix through Householder tridiagonalization,
/// Sturm bisection for the two lowest eigenvalues and inverse iteration.
inline RealEigenpair lowest_real_eigenpair(const RMatrix& h) {
    if (h.rows() < 3) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
        RVector v = es.eigenvectors().col(0);
        detail::fix_phase(v);
        return {es.eigenvalues()(0), v, h.rows() > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : std::numeric_limits<double>::infinity()};
    }
    Eigen::Tridiagonalization<RMatrix> tr(h);
    const RVector d = tr.diagonal(), e = tr.subDiagonal();
    const double e0 = detail::tridiagonal_eigenvalue(d, e, 0);
    const double e1 = detail::tridiagonal_eigenvalue(d, e, 1);
    RVector v = tr.matrixQ() * detail::tridiagonal_eigenvector(d, e, e0);
    v.normalize();
    detail::fix_phase(v);
    return {e0, std::move(v), e1 - e0};
}

inline DenseEigenpair lowest_eigenpair_tridiagonal(const RMatrix& h) {
    auto p = lowest_real_eigenpair(h);
    return {p.energy, p.vector.cast<cplx>(), p.gap};
}

/// Restarted Lanczos with full reorthogonalization for the lowest eigenpair.
inline DenseEigenpair lanczos_lowest(const SparseMat& h, const SolverOptions& opt, int* restarts = nullptr) {
    const Eigen::Index dim = h.rows();
    const Eigen::Index m = std::min<Eigen::Index>(opt.krylov_dim, dim);
    CVector x = detail::start_vector(dim);
    double best = std::numeric_limits<double>::infinity();
    CMatrix basis(dim, m);

    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        std::vector<double> alpha, beta;
        basis.col(0) = x;
        Eigen::Index used = 0;
        for (Eigen::Index j = 0; j < m; ++j) {
            CVector w = h * basis.col(j);
            alpha.push_back(basis.col(j).dot(w).real());
            used = j + 1;
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index k = 0; k <= j; ++k) w -= basis.col(k).dot(w) * basis.col(k);
            const double b = w.norm();
            if (j + 1 == m || b < 1e-13) break;
            beta.push_back(b);
            basis.col(j + 1) = w / b;
        }
        RMatrix t = RMatrix::Zero(used, used);
        for (Eigen::Index k = 0; k < used; ++k) {
            t(k, k) = alpha[k];
            if (k + 1 < used) t(k, k + 1) = t(k + 1, k) = beta[k];
        }
        Eigen::SelfAdjointEigenSolver<RMatrix> es(t);
        const double theta = es.eigenvalues()(0);
        x = (basis.leftCols(used) * es.eigenvectors().col(0).cast<cplx>()).normalized();
        const double res = (h * x - theta * x).norm();
        best = std::min(best, res);
        if (res <= opt.tol) {
            if (restarts) *restarts = restart;
            detail::fix_phase(x);
            const double gap = used > 1 ? es.eigenvalues()(1) - theta : std::numeric_limits<double>::infinity();
            return {theta, x, gap};
        }
    }
    throw ConvergenceError("Lanczos did not converge (best residual " + std::to_string(best) + ")", best);
}

/// Probability that any site sits in its top photon state.
inline double truncation_weight(const QuantumState& psi, const HilbertSpace& space) {
    if (psi.dim() != space.dim()) throw std::invalid_argument("truncation_weight: dimension mismatch");
    double w = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        const auto digits = space.digits(i);
        const bool top = std::any_of(digits.begin(), digits.end(),
                                     [&](int d) { return space.basis.photons_of(d) == space.basis.n_max(); });
        if (top) w += std::norm(psi[i]);
    }
    return std::min(1.0, w);
}

namespace detail {

inline EigResult solve_matrix(const SparseMat& h, const SolverOptions& opt) {
    EigResult r;
    DenseEigenpair p;
    if (h.rows() <= opt.dense_threshold) {
        bool real = true;
        for (int k = 0; k < h.outerSize() && real; ++k)
            for (SparseMat::InnerIterator it(h, k); it; ++it)
                if (it.value().imag() != 0.0) { real = false; break; }
        p = real ? lowest_eigenpair_dense(RMatrix(CMatrix(h).real())) : lowest_eigenpair_dense(CMatrix(h));
    } else {
        p = lanczos_lowest(h, opt, &r.iterations);
    }
    r.energy = p.energy;
    r.gap = p.gap;
    r.degenerate = p.gap < opt.degeneracy_tol;
    r.residual = (h * p.vector - p.energy * p.vector).norm();
    r.state = QuantumState(std::move(p.vector));
    if (r.residual > opt.tol)
        throw ConvergenceError("eigensolver residual above tolerance", r.residual);
    return r;
}

inline void fill_truncation(EigResult& r, const HilbertSpace& space, const SolverOptions& opt) {
    r.truncation_weight = truncation_weight(r.state, space);
    r.truncated = r.truncation_weight > opt.truncation_flag;
}

}  // namespace detail

/// Lowest eigenpair of H over the whole space.
inline EigResult ground_state_full(const SparseOperator& h, const SolverOptions& opt = {}) {
    return detail::solve_matrix(h.matrix(), opt);
}

inline EigResult ground_state_full(const SparseOperator& h, const HilbertSpace& space, const SolverOptions& opt = {}) {
    if (h.dim() != static_cast<int>(space.dim())) throw std::invalid_argument("ground_state_full: dimension mismatch");
    auto r = detail::solve_matrix(h.matrix(), opt);
    detail::fill_truncation(r, space, opt);
    return r;
}

/// Lowest eigenpair within the sector of total excitation n_total; the state is
/// returned embedded in the full space.
inline EigResult ground_state_in_sector(const SparseOperator& h, int n_total, const HilbertSpace& space,
                                        const SolverOptions& opt = {}) {
    if (h.dim() != static_cast<int>(space.dim()))
        throw std::invalid_argument("ground_state_in_sector: dimension mismatch");
    const auto comm = commutator(h, total_number_operator(space));
    if (comm.max_abs_entry() > 1e-12 * std::max(1.0, h.max_abs_entry()))
        throw ConservationError(
            "ground_state_in_sector: H does not conserve total excitation number; use ground_state_full");
    const auto idx = sector_basis(n_total, space);
    if (idx.empty()) throw std::invalid_argument("ground_state_in_sector: empty sector");

    const auto n = static_cast<Eigen::Index>(idx.size());
    std::vector<int> position(space.dim(), -1);
    for (Eigen::Index k = 0; k < n; ++k) position[idx[k]] = static_cast<int>(k);
    std::vector<Eigen::Triplet<cplx>> t;
    const SparseMat& m = h.matrix();
    for (int c : idx)
        for (SparseMat::InnerIterator it(m, c); it; ++it) {
            const int r = position[it.row()];
            if (r >= 0) t.emplace_back(r, position[c], it.value());
        }
    SparseMat block(n, n);
    block.setFromTriplets(t.begin(), t.end());

    auto r = detail::solve_matrix(block, opt);
    CVector full = CVector::Zero(static_cast<Eigen::Index>(space.dim()));
    for (Eigen::Index k = 0; k < n; ++k) full(idx[k]) = r.state[k];
    r.state = QuantumState(std::move(full));
    detail::fill_truncation(r, space, opt);
    return r;
}

}  // namespace jch
