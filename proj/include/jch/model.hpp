// model.hpp: Jaynes-Cummings-Hubbard Hamiltonian assembly, grand-canonical shift,
// and single-site dressed (polariton) states.
//
// Energies are dimensionless multiples of a reference coupling g_ref.

#pragma once

#include "jch/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace jch {

struct JCHParams {
    std::vector<double> omega;    // cavity frequency per site
    std::vector<double> nu;       // dopant transition frequency per site
    std::vector<double> g;        // matter-light coupling per site
    std::vector<double> hopping;  // A per lattice edge
    double mu = 0.0;

    /// Homogeneous parameters; nu = omega + detuning.
    static JCHParams uniform(const LatticeSpec& lattice, double omega, double detuning, double g,
                             double hopping, double mu = 0.0) {
        JCHParams p;
        p.omega.assign(lattice.n_sites(), omega);
        p.nu.assign(lattice.n_sites(), omega + detuning);
        p.g.assign(lattice.n_sites(), g);
        p.hopping.assign(lattice.n_edges(), hopping);
        p.mu = mu;
        return p;
    }

    double detuning(int site) const { return nu.at(site) - omega.at(site); }

    void validate(const LatticeSpec& lattice) const {
        const auto n = static_cast<std::size_t>(lattice.n_sites());
        if (omega.size() != n || nu.size() != n || g.size() != n)
            throw std::invalid_argument("JCHParams: per-site arrays must have length n_sites");
        if (hopping.size() != static_cast<std::size_t>(lattice.n_edges()))
            throw std::invalid_argument("JCHParams: hopping array must have one entry per edge");
    }
};

/// Embedded building blocks of H; assemble() forms the linear combination for
/// any parameter set on the same space.
class JCHTerms {
public:
    explicit JCHTerms(HilbertSpace space) : space_(std::move(space)) {
        const auto ops = site_operators(space_.basis);
        const auto photons = ops.a_dag * ops.a;
        const auto atom = ops.sigma_dag * ops.sigma;
        const auto jc = ops.sigma_dag * ops.a + ops.sigma * ops.a_dag;
        for (int i = 0; i < space_.n_sites(); ++i) {
            a_.push_back(embed(ops.a, i, space_));
            photons_.push_back(embed(photons, i, space_));
            atoms_.push_back(embed(atom, i, space_));
            jc_.push_back(embed(jc, i, space_));
        }
        for (auto [i, j] : space_.lattice.edges()) {
            const auto& ai = a_[i];
            const auto& aj = a_[j];
            hop_.push_back(ai.adjoint() * aj + ai * aj.adjoint());
        }
    }

    const HilbertSpace& space() const noexcept { return space_; }
    int dim() const { return static_cast<int>(space_.dim()); }

    const SparseOperator& a(int site) const { return a_.at(site); }
    const SparseOperator& photon_number(int site) const { return photons_.at(site); }
    const SparseOperator& atom_number(int site) const { return atoms_.at(site); }
    const SparseOperator& jc_coupling(int site) const { return jc_.at(site); }
    const SparseOperator& hopping_term(int edge) const { return hop_.at(edge); }

    SparseOperator number(int site) const { return photons_.at(site) + atoms_.at(site); }

    SparseOperator total_number() const {
        auto n = SparseOperator::zero(dim());
        for (int i = 0; i < space_.n_sites(); ++i) n += number(i);
        return n;
    }

    /// H without the chemical potential.
    SparseOperator assemble(const JCHParams& p) const {
        p.validate(space_.lattice);
        SparseMat h(dim(), dim());
        for (int i = 0; i < space_.n_sites(); ++i) {
            h += p.omega[i] * photons_[i].matrix();
            h += p.nu[i] * atoms_[i].matrix();
            h += p.g[i] * jc_[i].matrix();
        }
        for (int e = 0; e < space_.lattice.n_edges(); ++e) h -= p.hopping[e] * hop_[e].matrix();
        SparseOperator out(std::move(h));
        if (!out.verify_hermitian()) throw std::logic_error("JCHTerms::assemble: result not hermitian");
        return out;
    }

private:
    HilbertSpace space_;
    std::vector<SparseOperator> a_, photons_, atoms_, jc_, hop_;
};

inline SparseOperator build_hamiltonian(const JCHParams& params, const HilbertSpace& space) {
    return JCHTerms(space).assemble(params);
}

/// H - mu * sum_i N_i
inline SparseOperator apply_chemical_potential(const SparseOperator& h, double mu, const HilbertSpace& space) {
    if (h.dim() != static_cast<int>(space.dim()))
        throw std::invalid_argument("apply_chemical_potential: dimension mismatch");
    if (mu == 0.0) return h;
    auto out = h - mu * total_number_operator(space);
    out.verify_hermitian();
    return out;
}

/// The same building blocks gathered onto one fixed-excitation sector as dense
/// real matrices. All JCH terms are real in the product basis.
class SectorTerms {
public:
    SectorTerms(const JCHTerms& terms, int n_total)
        : n_total_(n_total), indices_(sector_basis(n_total, terms.space())) {
        const int n = terms.space().n_sites();
        for (int i = 0; i < n; ++i) {
            photons_.push_back(gather(terms.photon_number(i)));
            atoms_.push_back(gather(terms.atom_number(i)));
            jc_.push_back(gather(terms.jc_coupling(i)));
        }
        for (int e = 0; e < terms.space().lattice.n_edges(); ++e) hop_.push_back(gather(terms.hopping_term(e)));
        lattice_n_ = n;
        edges_ = terms.space().lattice.n_edges();
    }

    int n_total() const noexcept { return n_total_; }
    const std::vector<int>& indices() const noexcept { return indices_; }
    int size() const noexcept { return static_cast<int>(indices_.size()); }

    const RMatrix& photon_number(int site) const { return photons_.at(site); }
    const RMatrix& atom_number(int site) const { return atoms_.at(site); }

    RMatrix assemble(const JCHParams& p) const {
        RMatrix h = RMatrix::Zero(size(), size());
        for (int i = 0; i < lattice_n_; ++i)
            h += p.omega.at(i) * photons_[i] + p.nu.at(i) * atoms_[i] + p.g.at(i) * jc_[i];
        for (int e = 0; e < edges_; ++e) h -= p.hopping.at(e) * hop_[e];
        return h;
    }

    /// Scatter sector amplitudes back into the full space.
    CVector embed(const CVector& sector_vec, int full_dim) const {
        CVector v = CVector::Zero(full_dim);
        for (int k = 0; k < size(); ++k) v(indices_[k]) = sector_vec(k);
        return v;
    }

private:
    RMatrix gather(const SparseOperator& op) const {
        RMatrix m(size(), size());
        for (int r = 0; r < size(); ++r)
            for (int c = 0; c < size(); ++c) m(r, c) = op.element(indices_[r], indices_[c]).real();
        return m;
    }

    int n_total_;
    std::vector<int> indices_;
    std::vector<RMatrix> photons_, atoms_, jc_, hop_;
    int lattice_n_ = 0;
    int edges_ = 0;
};

// ------------------------------ Polariton states -----------------------------

enum class Branch { plus, minus };

struct PolaritonAmplitudes {
    double ground;   // on |g>|n>
    double excited;  // on |e>|n-1>
    double energy;   // eigenvalue of the 2x2 block relative to n*omega
};

/// Dressed states |n+> = sin t |g,n> + cos t |e,n-1>, |n-> = cos t |g,n> - sin t |e,n-1>.
/// The mixing angle diagonalizes ((0, g sqrt n), (g sqrt n, delta)): tan 2t = 2 g sqrt(n) / delta,
/// with 2t taken in (0, pi). |n-> is the lower branch; it is photon-like for delta -> +inf
/// and atom-like for delta -> -inf.
inline PolaritonAmplitudes polariton_state(int n, Branch branch, double delta, double g) {
    if (n < 1) throw std::invalid_argument("polariton_state: n must be >= 1");
    if (!(g > 0.0)) throw std::invalid_argument("polariton_state: g must be positive");
    const double s = g * std::sqrt(double(n));
    const double theta = 0.5 * std::atan2(2.0 * s, delta);
    const double split = std::sqrt(0.25 * delta * delta + s * s);
    if (branch == Branch::plus) return {std::sin(theta), std::cos(theta), 0.5 * delta + split};
    return {std::cos(theta), -std::sin(theta), 0.5 * delta - split};
}

/// The dressed state as a local-site vector in the SiteBasis ordering.
inline QuantumState polariton_site_state(int n, Branch branch, double delta, double g, const SiteBasis& basis) {
    if (n > basis.n_max()) throw std::invalid_argument("polariton_site_state: n exceeds truncation");
    const auto amp = polariton_state(n, branch, delta, g);
    CVector v = CVector::Zero(basis.local_dim());
    v(basis.index(0, n)) = amp.ground;
    v(basis.index(1, n - 1)) = amp.excited;
    return QuantumState(std::move(v));
}

}  // namespace jch
