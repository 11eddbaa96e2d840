// hilbert.hpp: truncated local spaces, ladder/qubit operators, tensor embeddings
// and fixed-excitation sectors for cavity-dopant lattices.
//
// Local basis ordering (per site): index = atom * (n_max + 1) + photons,
// atom in {g = 0, e = 1}. Global ordering: site 0 is the slowest index.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jch {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<cplx>;

// --------------------------------- SiteBasis ---------------------------------

class SiteBasis {
public:
    explicit SiteBasis(int n_max) : n_max_(n_max) {
        if (n_max < 1) throw std::invalid_argument("SiteBasis: n_max must be >= 1");
    }

    int n_max() const noexcept { return n_max_; }
    int photon_dim() const noexcept { return n_max_ + 1; }
    int local_dim() const noexcept { return 2 * (n_max_ + 1); }

    int index(int atom, int photons) const {
        if (atom < 0 || atom > 1 || photons < 0 || photons > n_max_)
            throw std::out_of_range("SiteBasis::index: level out of range");
        return atom * photon_dim() + photons;
    }
    int atom_of(int idx) const noexcept { return idx / photon_dim(); }
    int photons_of(int idx) const noexcept { return idx % photon_dim(); }
    int excitations_of(int idx) const noexcept { return atom_of(idx) + photons_of(idx); }

    friend bool operator==(const SiteBasis&, const SiteBasis&) = default;

private:
    int n_max_;
};

// -------------------------------- LatticeSpec --------------------------------

using Edge = std::pair<int, int>;

class LatticeSpec {
public:
    LatticeSpec(int n_sites, std::vector<Edge> edges, int z)
        : n_sites_(n_sites), edges_(std::move(edges)), z_(z) {
        if (n_sites < 1) throw std::invalid_argument("LatticeSpec: n_sites must be >= 1");
        if (z < 0) throw std::invalid_argument("LatticeSpec: coordination must be >= 0");
        std::set<Edge> seen;
        for (auto& [i, j] : edges_) {
            if (i < 0 || j < 0 || i >= n_sites || j >= n_sites)
                throw std::invalid_argument("LatticeSpec: edge references invalid site");
            if (i == j) throw std::invalid_argument("LatticeSpec: self-loop edge");
            if (!seen.insert({std::min(i, j), std::max(i, j)}).second)
                throw std::invalid_argument("LatticeSpec: duplicate edge");
        }
    }

    /// Open (or periodic) chain; coordination 2.
    static LatticeSpec chain(int n_sites, bool periodic = false) {
        std::vector<Edge> e;
        for (int i = 0; i + 1 < n_sites; ++i) e.emplace_back(i, i + 1);
        if (periodic && n_sites > 2) e.emplace_back(n_sites - 1, 0);
        return LatticeSpec(n_sites, std::move(e), 2);
    }

    /// 2x2 plaquette cut from a square lattice; coordination 4.
    static LatticeSpec plaquette() {
        return LatticeSpec(4, {{0, 1}, {1, 3}, {3, 2}, {2, 0}}, 4);
    }

    static LatticeSpec single_site(int z) { return LatticeSpec(1, {}, z); }

    int n_sites() const noexcept { return n_sites_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    int n_edges() const noexcept { return static_cast<int>(edges_.size()); }
    int z() const noexcept { return z_; }

    std::vector<int> degrees() const {
        std::vector<int> d(n_sites_, 0);
        for (auto& [i, j] : edges_) { ++d[i]; ++d[j]; }
        return d;
    }

private:
    int n_sites_;
    std::vector<Edge> edges_;
    int z_;
};

// ------------------------------- HilbertSpace --------------------------------

/// Product space of identical truncated sites over a lattice.
struct HilbertSpace {
    SiteBasis basis;
    LatticeSpec lattice;

    int n_sites() const noexcept { return lattice.n_sites(); }
    int local_dim() const noexcept { return basis.local_dim(); }

    std::size_t dim() const {
        std::size_t d = 1;
        for (int i = 0; i < n_sites(); ++i) d *= static_cast<std::size_t>(local_dim());
        return d;
    }

    /// Local index of `site` inside global index `idx`.
    int local_index(std::size_t idx, int site) const {
        const auto d = static_cast<std::size_t>(local_dim());
        for (int s = n_sites() - 1; s > site; --s) idx /= d;
        return static_cast<int>(idx % d);
    }

    std::vector<int> digits(std::size_t idx) const {
        std::vector<int> out(n_sites());
        const auto d = static_cast<std::size_t>(local_dim());
        for (int s = n_sites() - 1; s >= 0; --s) {
            out[s] = static_cast<int>(idx % d);
            idx /= d;
        }
        return out;
    }

    int excitations(std::size_t idx) const {
        int n = 0;
        const auto d = static_cast<std::size_t>(local_dim());
        for (int s = 0; s < n_sites(); ++s) {
            n += basis.excitations_of(static_cast<int>(idx % d));
            idx /= d;
        }
        return n;
    }

    /// Subsystem dimensions with each site split into (atom, photon) factors.
    std::vector<int> fine_dims() const {
        std::vector<int> d;
        for (int s = 0; s < n_sites(); ++s) {
            d.push_back(2);
            d.push_back(basis.photon_dim());
        }
        return d;
    }

    std::vector<int> site_dims() const { return std::vector<int>(n_sites(), local_dim()); }
};

// ------------------------------ SparseOperator -------------------------------

class SparseOperator {
public:
    SparseOperator() = default;

    explicit SparseOperator(SparseMat m, bool hermitian = false)
        : matrix_(std::move(m)), hermitian_(hermitian) {
        if (matrix_.rows() != matrix_.cols())
            throw std::invalid_argument("SparseOperator: matrix must be square");
        matrix_.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
        matrix_.makeCompressed();
    }

    static SparseOperator identity(int dim) {
        SparseMat m(dim, dim);
        m.setIdentity();
        return SparseOperator(std::move(m), true);
    }

    static SparseOperator zero(int dim) { return SparseOperator(SparseMat(dim, dim), true); }

    int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
    const SparseMat& matrix() const noexcept { return matrix_; }
    bool hermitian() const noexcept { return hermitian_; }
    Eigen::Index nonzeros() const noexcept { return matrix_.nonZeros(); }

    /// Elementwise check of H = H^dagger; sets the flag on success.
    bool verify_hermitian(double tol = 1e-12) {
        SparseMat diff = matrix_ - SparseMat(matrix_.adjoint());
        double worst = 0.0;
        for (int k = 0; k < diff.outerSize(); ++k)
            for (SparseMat::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
        hermitian_ = worst <= tol;
        return hermitian_;
    }

    double max_abs_entry() const {
        double worst = 0.0;
        for (int k = 0; k < matrix_.outerSize(); ++k)
            for (SparseMat::InnerIterator it(matrix_, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
        return worst;
    }

    bool is_real() const {
        for (int k = 0; k < matrix_.outerSize(); ++k)
            for (SparseMat::InnerIterator it(matrix_, k); it; ++it)
                if (it.value().imag() != 0.0) return false;
        return true;
    }

    cplx element(int row, int col) const { return matrix_.coeff(row, col); }

    SparseOperator adjoint() const { return SparseOperator(SparseMat(matrix_.adjoint()), hermitian_); }

    CVector apply(const CVector& v) const {
        if (v.size() != matrix_.cols()) throw std::invalid_argument("SparseOperator::apply: dimension mismatch");
        return matrix_ * v;
    }

    SparseOperator& operator+=(const SparseOperator& o) {
        check_same(o);
        matrix_ += o.matrix_;
        hermitian_ = hermitian_ && o.hermitian_;
        return *this;
    }
    SparseOperator& operator-=(const SparseOperator& o) {
        check_same(o);
        matrix_ -= o.matrix_;
        hermitian_ = hermitian_ && o.hermitian_;
        return *this;
    }

    friend SparseOperator operator+(SparseOperator a, const SparseOperator& b) { return a += b; }
    friend SparseOperator operator-(SparseOperator a, const SparseOperator& b) { return a -= b; }
    friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
        a.check_same(b);
        return SparseOperator(SparseMat(a.matrix_ * b.matrix_));
    }
    friend SparseOperator operator*(cplx s, const SparseOperator& a) {
        return SparseOperator(SparseMat(s * a.matrix_), a.hermitian_ && s.imag() == 0.0);
    }
    friend SparseOperator operator*(double s, const SparseOperator& a) {
        return SparseOperator(SparseMat(s * a.matrix_), a.hermitian_);
    }

    /// [A, B] = AB - BA
    friend SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
        a.check_same(b);
        return SparseOperator(SparseMat(a.matrix_ * b.matrix_ - b.matrix_ * a.matrix_));
    }

    CMatrix to_dense() const { return CMatrix(matrix_); }

private:
    void check_same(const SparseOperator& o) const {
        if (o.dim() != dim()) throw std::invalid_argument("SparseOperator: dimension mismatch");
    }

    SparseMat matrix_;
    bool hermitian_ = false;
};

// ------------------------------- QuantumState --------------------------------

class QuantumState {
public:
    QuantumState() = default;

    /// Normalizes the given amplitudes; throws on a zero vector.
    explicit QuantumState(CVector amplitudes) : amps_(std::move(amplitudes)) {
        const double n = amps_.norm();
        if (!(n > 0.0)) throw std::invalid_argument("QuantumState: zero vector");
        amps_ /= n;
    }

    static QuantumState basis_state(std::size_t dim, std::size_t index) {
        if (index >= dim) throw std::out_of_range("QuantumState::basis_state: index out of range");
        CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return QuantumState(std::move(v));
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
    const CVector& amplitudes() const noexcept { return amps_; }
    cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    cplx inner(const QuantumState& other) const {
        if (other.dim() != dim()) throw std::invalid_argument("QuantumState::inner: dimension mismatch");
        return amps_.dot(other.amps_);
    }

    friend QuantumState tensor(const QuantumState& a, const QuantumState& b) {
        CVector v(static_cast<Eigen::Index>(a.dim() * b.dim()));
        for (Eigen::Index i = 0; i < a.amps_.size(); ++i)
            v.segment(i * b.amps_.size(), b.amps_.size()) = a.amps_(i) * b.amps_;
        return QuantumState(std::move(v));
    }

private:
    CVector amps_;
};

inline cplx expectation(const SparseOperator& op, const QuantumState& psi) {
    return psi.amplitudes().dot(op.apply(psi.amplitudes()));
}

// ------------------------------ Site operators -------------------------------

struct SiteOperators {
    SparseOperator a, a_dag, sigma, sigma_dag, n_op;
};

/// Photon ladder operators with hard truncation at n_max; sigma = |g><e|.
inline SiteOperators site_operators(const SiteBasis& basis) {
    const int d = basis.local_dim();
    std::vector<Eigen::Triplet<cplx>> ta, ts;
    for (int atom = 0; atom < 2; ++atom)
        for (int n = 1; n <= basis.n_max(); ++n)
            ta.emplace_back(basis.index(atom, n - 1), basis.index(atom, n), std::sqrt(double(n)));
    for (int n = 0; n <= basis.n_max(); ++n) ts.emplace_back(basis.index(0, n), basis.index(1, n), 1.0);

    SparseMat a(d, d), s(d, d);
    a.setFromTriplets(ta.begin(), ta.end());
    s.setFromTriplets(ts.begin(), ts.end());

    SiteOperators ops;
    ops.a = SparseOperator(a);
    ops.a_dag = ops.a.adjoint();
    ops.sigma = SparseOperator(s);
    ops.sigma_dag = ops.sigma.adjoint();
    ops.n_op = ops.a_dag * ops.a + ops.sigma_dag * ops.sigma;
    ops.n_op.verify_hermitian();
    return ops;
}

// --------------------------------- Embedding ---------------------------------

/// I_left (x) op (x) I_right for sparse operands.
inline SparseMat kron_identity(const SparseMat& op, std::size_t left, std::size_t right) {
    const auto d = static_cast<std::size_t>(op.rows());
    const auto dim = static_cast<Eigen::Index>(left * d * right);
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(op.nonZeros()) * left * right);
    for (std::size_t l = 0; l < left; ++l)
        for (int k = 0; k < op.outerSize(); ++k)
            for (SparseMat::InnerIterator it(op, k); it; ++it)
                for (std::size_t r = 0; r < right; ++r) {
                    const auto row = (l * d + static_cast<std::size_t>(it.row())) * right + r;
                    const auto col = (l * d + static_cast<std::size_t>(it.col())) * right + r;
                    t.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), it.value());
                }
    SparseMat out(dim, dim);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

inline SparseOperator embed(const SparseOperator& op, int site, const HilbertSpace& space) {
    if (op.dim() != space.local_dim())
        throw std::invalid_argument("embed: operator dimension does not match local dimension");
    if (site < 0 || site >= space.n_sites()) throw std::out_of_range("embed: site index out of range");
    std::size_t left = 1, right = 1;
    const auto d = static_cast<std::size_t>(space.local_dim());
    for (int s = 0; s < site; ++s) left *= d;
    for (int s = site + 1; s < space.n_sites(); ++s) right *= d;
    return SparseOperator(kron_identity(op.matrix(), left, right), op.hermitian());
}

/// Sum_i N_i over all sites.
inline SparseOperator total_number_operator(const HilbertSpace& space) {
    const auto n_op = site_operators(space.basis).n_op;
    auto total = SparseOperator::zero(static_cast<int>(space.dim()));
    for (int i = 0; i < space.n_sites(); ++i) total += embed(n_op, i, space);
    return total;
}

// ---------------------------------- Sectors ----------------------------------

/// Ordered global indices with total excitation number n_total (may be empty).
inline std::vector<int> sector_basis(int n_total, const HilbertSpace& space) {
    const int max_n = space.n_sites() * (space.basis.n_max() + 1);
    if (n_total < 0 || n_total > max_n)
        throw std::invalid_argument("sector_basis: n_total outside [0, n_sites*(n_max+1)]");
    std::vector<int> out;
    const std::size_t dim = space.dim();
    for (std::size_t i = 0; i < dim; ++i)
        if (space.excitations(i) == n_total) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace jch
