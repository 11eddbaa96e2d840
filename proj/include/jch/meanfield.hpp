// meanfield.hpp: cluster mean-field decoupling <a> = alpha, self-consistency by
// energy minimization, and (mu, A) phase-diagram sweeps.

#pragma once

#include "jch/eigensolve.hpp"
#include "jch/model.hpp"
#include "jch/parallel.hpp"
#include "jch/quantum_info.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace jch {

struct BoundaryAttachment {
    int site;
    int multiplicity;  // number of environment neighbours of this cluster site
};

/// Each cluster site couples to z - (internal degree) environment neighbours.
inline std::vector<BoundaryAttachment> default_boundary(const LatticeSpec& cluster) {
    std::vector<BoundaryAttachment> b;
    const auto deg = cluster.degrees();
    for (int i = 0; i < cluster.n_sites(); ++i)
        if (cluster.z() - deg[i] > 0) b.push_back({i, cluster.z() - deg[i]});
    return b;
}

struct MeanFieldProblem {
    HilbertSpace cluster;
    std::vector<BoundaryAttachment> boundary;
    JCHParams params;          // cluster-internal parameters (mu is taken from `mu` below)
    double env_hopping = 0.0;  // A on cluster-environment bonds
    double mu = 0.0;
    cplx alpha = 0.0;          // uniform order parameter of the environment

    void validate() const {
        params.validate(cluster.lattice);
        const auto deg = cluster.lattice.degrees();
        for (auto [site, m] : boundary) {
            if (site < 0 || site >= cluster.n_sites())
                throw std::invalid_argument("MeanFieldProblem: boundary site out of range");
            if (m < 0) throw std::invalid_argument("MeanFieldProblem: negative boundary multiplicity");
            if (cluster.lattice.z() > 0 && deg[site] + m > cluster.lattice.z())
                throw std::invalid_argument("MeanFieldProblem: boundary multiplicity exceeds coordination");
        }
    }
};

/// H_MF = sum [S_i + T_ij] - mu N + sum_boundary -A (alpha* a_i + alpha a_i^dag - |alpha|^2)
inline SparseOperator mf_hamiltonian(const MeanFieldProblem& p, const JCHTerms& terms) {
    p.validate();
    auto h = terms.assemble(p.params) - p.mu * terms.total_number();
    const int dim = terms.dim();
    SparseMat field(dim, dim);
    double constant = 0.0;
    for (auto [site, m] : p.boundary) {
        const SparseMat& a = terms.a(site).matrix();
        field += (-p.env_hopping * m) * (std::conj(p.alpha) * a + p.alpha * SparseMat(a.adjoint()));
        constant += p.env_hopping * m * std::norm(p.alpha);
    }
    SparseMat id(dim, dim);
    id.setIdentity();
    field += constant * id;
    auto out = h + SparseOperator(std::move(field));
    out.verify_hermitian();
    return out;
}

inline SparseOperator mf_hamiltonian(const MeanFieldProblem& p) { return mf_hamiltonian(p, JCHTerms(p.cluster)); }

struct MFPolicy {
    double alpha_max = 3.0;
    int scan_points = 31;
    double golden_tol = 1e-9;
    double flat_tol = 1e-12;   // energy spread below which the landscape counts as flat
    SolverOptions solver{};
};

struct MFResult {
    double alpha = 0.0;
    double energy = 0.0;
    QuantumState ground_state;
    std::vector<double> site_entanglements;  // 1 - tr(rho_site^2) per cluster site
    std::vector<double> in_site_entanglements;
    std::vector<double> mean_occupation;     // <N_i>
    double fixed_point_residual = 0.0;       // |<a> - alpha| over boundary sites
    double truncation_weight = 0.0;
    int iterations = 0;                      // energy evaluations
    bool flat = false;                       // energy independent of alpha
    bool at_alpha_max = false;               // minimum sits on the upper edge of the search domain
    bool degenerate = false;

    double mean_site_entanglement() const { return mean(site_entanglements); }
    double mean_in_site_entanglement() const { return mean(in_site_entanglements); }
    double mean_filling() const { return mean(mean_occupation); }

private:
    static double mean(const std::vector<double>& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    }
};

/// Energy landscape E(alpha) for real alpha >= 0 on one problem. Uses dense real
/// matrices H(alpha) = H0 + alpha B + alpha^2 c at or below the dense threshold.
class MeanFieldLandscape {
public:
    MeanFieldLandscape(const MeanFieldProblem& p, const JCHTerms& terms, SolverOptions opt = {})
        : problem_(p), terms_(terms), opt_(opt) {
        p.validate();
        dense_ = terms.dim() <= opt.dense_threshold;
        if (dense_) {
            auto base = p;
            base.alpha = 0.0;
            h0_ = CMatrix(mf_hamiltonian(base, terms).matrix()).real();
            b_ = RMatrix::Zero(terms.dim(), terms.dim());
            for (auto [site, m] : p.boundary) {
                const RMatrix a = CMatrix(terms.a(site).matrix()).real();
                b_ -= p.env_hopping * m * (a + a.transpose());
                c_ += p.env_hopping * m;
            }
        }
    }

    double energy(double alpha) const {
        if (dense_) {
            RMatrix h = h0_ + alpha * b_;
            h.diagonal().array() += c_ * alpha * alpha;
            Eigen::SelfAdjointEigenSolver<RMatrix> es(h, Eigen::EigenvaluesOnly);
            return es.eigenvalues()(0);
        }
        return ground(alpha).energy;
    }

    EigResult ground(double alpha) const {
        auto p = problem_;
        p.alpha = alpha;
        return ground_state_full(mf_hamiltonian(p, terms_), terms_.space(), opt_);
    }

private:
    MeanFieldProblem problem_;
    const JCHTerms& terms_;
    SolverOptions opt_;
    bool dense_ = false;
    RMatrix h0_, b_;
    double c_ = 0.0;
};

/// Fills site observables of a cluster ground state at order parameter alpha.
inline void measure_cluster(MFResult& r, const EigResult& g, const MeanFieldProblem& p, const JCHTerms& terms) {
    r.energy = g.energy;
    r.ground_state = g.state;
    r.truncation_weight = g.truncation_weight;
    r.degenerate = g.degenerate;
    const auto& space = terms.space();
    r.site_entanglements.clear();
    r.in_site_entanglements.clear();
    r.mean_occupation.clear();
    for (int i = 0; i < space.n_sites(); ++i) {
        const auto rho = site_reduced_state(g.state, i, space);
        r.site_entanglements.push_back(purity_entanglement(rho));
        r.in_site_entanglements.push_back(negativity(rho, {0}));
        r.mean_occupation.push_back(expectation(terms.number(i), g.state).real());
    }
    double res = 0.0;
    for (auto [site, m] : p.boundary) res = std::max(res, std::abs(expectation(terms.a(site), g.state) - r.alpha));
    r.fixed_point_residual = res;
}

/// alpha* = argmin_alpha E(alpha) on [0, alpha_max]: coarse scan, then golden-section
/// refinement inside the bracket around the best scan point.
inline MFResult solve_self_consistent(const MeanFieldProblem& problem, const JCHTerms& terms, const MFPolicy& policy = {}) {
    if (policy.scan_points < 3) throw std::invalid_argument("solve_self_consistent: need at least 3 scan points");
    MeanFieldLandscape land(problem, terms, policy.solver);
    MFResult r;
    const int n = policy.scan_points;
    const double h = policy.alpha_max / double(n - 1);
    std::vector<double> e(n);
    for (int k = 0; k < n; ++k) e[k] = land.energy(k * h);
    r.iterations = n;
    const auto best = static_cast<int>(std::min_element(e.begin(), e.end()) - e.begin());
    const double spread = *std::max_element(e.begin(), e.end()) - e[best];

    double alpha = 0.0;
    if (spread < policy.flat_tol) {
        r.flat = true;
    } else {
        double lo = std::max(0, best - 1) * h, hi = std::min(n - 1, best + 1) * h;
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
        double f1 = land.energy(x1), f2 = land.energy(x2);
        r.iterations += 2;
        while (hi - lo > policy.golden_tol) {
            if (f1 <= f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = land.energy(x1);
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = land.energy(x2);
            }
            ++r.iterations;
        }
        alpha = 0.5 * (lo + hi);
        double e_alpha = land.energy(alpha);
        ++r.iterations;
        // endpoints of the bracket can win over the interior
        for (double cand : {std::max(0, best - 1) * h, std::min(n - 1, best + 1) * h, best * h}) {
            const double ec = e[static_cast<int>(std::lround(cand / h))];
            if (ec < e_alpha) { e_alpha = ec; alpha = cand; }
        }
        if (e_alpha >= e[0] - 1e-14) alpha = 0.0;
    }
    r.alpha = alpha;
    r.at_alpha_max = alpha >= policy.alpha_max - 10 * policy.golden_tol;
    measure_cluster(r, land.ground(alpha), problem, terms);
    return r;
}

inline MFResult solve_self_consistent(const MeanFieldProblem& problem, const MFPolicy& policy = {}) {
    JCHTerms terms(problem.cluster);
    return solve_self_consistent(problem, terms, policy);
}

// --------------------------------- sweeps ------------------------------------

/// Clean homogeneous cluster setup; energies in units of g.
struct ClusterSetup {
    LatticeSpec cluster = LatticeSpec::chain(2);
    int n_max = 6;
    double omega = 10.0;
    double detuning = 0.0;
    double g = 1.0;

    HilbertSpace space() const { return {SiteBasis(n_max), cluster}; }

    MeanFieldProblem problem(double mu_over_g, double hopping) const {
        MeanFieldProblem p{space(), default_boundary(cluster),
                           JCHParams::uniform(cluster, omega, detuning, g, hopping), hopping,
                           omega + mu_over_g * g, 0.0};
        p.params.mu = p.mu;
        return p;
    }
};

struct PhasePoint {
    std::size_t mu_index = 0, a_index = 0;
    double mu_over_g = 0.0;
    double log10_a = 0.0;
    double a_over_g = 0.0;
    double alpha = 0.0;
    double site_cluster_ent = 0.0;
    double in_site_ent = 0.0;
    double filling = 0.0;
    double fixed_point_residual = 0.0;
    double truncation_weight = 0.0;
    int iterations = 0;
    bool flat = false;
    bool at_alpha_max = false;
    std::string error;  // non-empty if this point failed

    std::string flags() const {
        std::string f;
        if (flat) f += "flat;";
        if (at_alpha_max) f += "alpha_max;";
        if (truncation_weight > 1e-4) f += "truncated;";
        if (!error.empty()) f += "failed;";
        return f;
    }
};

struct PhaseGrid {
    std::vector<double> mu_over_g;
    std::vector<double> log10_a;

    static std::vector<double> linspace(double lo, double hi, int n) {
        std::vector<double> v(n);
        for (int k = 0; k < n; ++k) v[k] = n == 1 ? lo : lo + (hi - lo) * k / double(n - 1);
        return v;
    }
};

/// Row-major over (A, mu): index = a_index * n_mu + mu_index.
inline std::vector<PhasePoint> phase_diagram_sweep(const ClusterSetup& setup, const PhaseGrid& grid,
                                                   const MFPolicy& policy = {}, int workers = 0) {
    const JCHTerms terms(setup.space());
    const std::size_t n_mu = grid.mu_over_g.size(), n_a = grid.log10_a.size();
    return parallel_map<PhasePoint>(n_mu * n_a, workers, [&](std::size_t idx) {
        PhasePoint pt;
        pt.mu_index = idx % n_mu;
        pt.a_index = idx / n_mu;
        pt.mu_over_g = grid.mu_over_g[pt.mu_index];
        pt.log10_a = grid.log10_a[pt.a_index];
        pt.a_over_g = std::pow(10.0, pt.log10_a);
        try {
            const auto r = solve_self_consistent(setup.problem(pt.mu_over_g, pt.a_over_g * setup.g), terms, policy);
            pt.alpha = r.alpha;
            pt.site_cluster_ent = r.mean_site_entanglement();
            pt.in_site_ent = r.mean_in_site_entanglement();
            pt.filling = r.mean_filling();
            pt.fixed_point_residual = r.fixed_point_residual;
            pt.truncation_weight = r.truncation_weight;
            pt.iterations = r.iterations;
            pt.flat = r.flat;
            pt.at_alpha_max = r.at_alpha_max;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        return pt;
    });
}

/// Lobe labels on a phase grid: connected (4-neighbour) components of cells with
/// alpha <= alpha_tol and equal rounded filling. -1 marks superfluid or failed cells.
struct LobeMap {
    std::vector<int> label;  // same indexing as the sweep output
    std::vector<int> filling_of_label;
    std::size_t n_mu = 0, n_a = 0;

    bool in_lobe(std::size_t idx) const { return label[idx] >= 0; }
    bool on_border(std::size_t idx) const {
        if (!in_lobe(idx)) return false;
        const std::size_t m = idx % n_mu, a = idx / n_mu;
        auto sf = [&](std::size_t mm, std::size_t aa) { return !in_lobe(aa * n_mu + mm); };
        return (m > 0 && sf(m - 1, a)) || (m + 1 < n_mu && sf(m + 1, a)) || (a > 0 && sf(m, a - 1)) ||
               (a + 1 < n_a && sf(m, a + 1));
    }
};

inline LobeMap find_lobes(const std::vector<PhasePoint>& pts, std::size_t n_mu, std::size_t n_a, double alpha_tol = 1e-6) {
    LobeMap map;
    map.n_mu = n_mu;
    map.n_a = n_a;
    map.label.assign(pts.size(), -1);
    auto insulating = [&](std::size_t i) { return pts[i].error.empty() && pts[i].alpha <= alpha_tol; };
    auto filling = [&](std::size_t i) { return static_cast<int>(std::lround(pts[i].filling)); };
    std::vector<int> seen(pts.size(), 0);
    for (std::size_t s = 0; s < pts.size(); ++s) {
        if (seen[s] || !insulating(s)) continue;
        const int lab = static_cast<int>(map.filling_of_label.size());
        map.filling_of_label.push_back(filling(s));
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            map.label[i] = lab;
            const std::size_t m = i % n_mu, a = i / n_mu;
            std::vector<std::size_t> nb;
            if (m > 0) nb.push_back(i - 1);
            if (m + 1 < n_mu) nb.push_back(i + 1);
            if (a > 0) nb.push_back(i - n_mu);
            if (a + 1 < n_a) nb.push_back(i + n_mu);
            for (auto j : nb)
                if (!seen[j] && insulating(j) && filling(j) == filling(s)) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
        }
    }
    return map;
}

/// Zero-hopping boundary between fillings n and n+1 of a single site, located by
/// bisection in x = (mu - omega)/g on the numerical ground-state occupation.
inline double zero_hopping_lobe_boundary(int n, double omega, double detuning, double g, int n_max, double x_lo,
                                         double x_hi, double tol = 1e-12) {
    const HilbertSpace space{SiteBasis(n_max), LatticeSpec::single_site(0)};
    const JCHTerms terms(space);
    const auto params = JCHParams::uniform(space.lattice, omega, detuning, g, 0.0);
    const auto h = terms.assemble(params);
    const auto n_op = terms.total_number();
    auto filling = [&](double x) {
        const auto r = ground_state_full(h - (omega + x * g) * n_op, space);
        return expectation(n_op, r.state).real();
    };
    if (!(filling(x_lo) < n + 0.5 && filling(x_hi) > n + 0.5))
        throw std::invalid_argument("zero_hopping_lobe_boundary: bracket does not contain the boundary");
    while (x_hi - x_lo > tol) {
        const double mid = 0.5 * (x_lo + x_hi);
        (filling(mid) < n + 0.5 ? x_lo : x_hi) = mid;
    }
    return 0.5 * (x_lo + x_hi);
}

}  // namespace jch
