// smft.hpp: stochastic mean-field theory on a single site: the order-parameter
// distribution P(alpha) is iterated to a fixed point through the distribution Q(eta)
// of the neighbour field eta = sum_j A_j alpha_j.
//
// Distributions live on uniform grids starting at 0. A GridDensity stores density
// values at the nodes; node masses are the trapezoid weights times the density.

#pragma once

#include "jch/disorder.hpp"
#include "jch/eigensolve.hpp"
#include "jch/hilbert.hpp"
#include "jch/parallel.hpp"
#include "jch/quantum_info.hpp"
#include "jch/stats.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jch {

template <class Tag>
class GridDensity {
public:
    GridDensity() = default;

    GridDensity(double step, RVector density) : step_(step), density_(std::move(density)) {
        if (!(step_ > 0.0) || density_.size() < 2) throw std::invalid_argument("GridDensity: need step > 0 and >= 2 nodes");
        if ((density_.array() < 0.0).any()) throw std::invalid_argument("GridDensity: negative density");
    }

    static GridDensity from_masses(double step, const RVector& masses) {
        RVector d = masses / step;
        d(0) *= 2.0;
        d(d.size() - 1) *= 2.0;
        return GridDensity(step, std::move(d));
    }

    static GridDensity uniform(double max, int size) {
        return GridDensity(max / double(size - 1), RVector::Constant(size, 1.0 / max));
    }

    /// Point mass at x, split linearly between the neighbouring nodes.
    static GridDensity point_mass(double max, int size, double x) {
        const double step = max / double(size - 1);
        RVector m = RVector::Zero(size);
        deposit(m, step, x, 1.0);
        return from_masses(step, m);
    }

    /// Linear (cloud-in-cell) deposit; returns the part of w beyond the last node.
    static double deposit(RVector& masses, double step, double x, double w) {
        const auto n = masses.size();
        const double t = x / step;
        if (t >= double(n - 1)) {
            masses(n - 1) += w;
            return t > double(n - 1) ? w : 0.0;
        }
        const double tc = std::max(t, 0.0);
        const auto k = static_cast<Eigen::Index>(std::floor(tc));
        const double f = tc - double(k);
        masses(k) += (1.0 - f) * w;
        masses(k + 1) += f * w;
        return 0.0;
    }

    double step() const noexcept { return step_; }
    int size() const noexcept { return static_cast<int>(density_.size()); }
    double x(int k) const noexcept { return step_ * k; }
    double max() const noexcept { return step_ * (size() - 1); }
    const RVector& density() const noexcept { return density_; }

    RVector masses() const {
        RVector m = density_ * step_;
        m(0) *= 0.5;
        m(m.size() - 1) *= 0.5;
        return m;
    }

    double integral() const { return masses().sum(); }

    double mean() const {
        const RVector m = masses();
        double s = 0.0;
        for (int k = 0; k < size(); ++k) s += m(k) * x(k);
        return s;
    }

    bool is_normalized(double tol = 1e-9) const { return std::abs(integral() - 1.0) <= tol; }

private:
    double step_ = 1.0;
    RVector density_;
};

using AlphaDistribution = GridDensity<struct AlphaTag>;
using EtaDistribution = GridDensity<struct EtaTag>;

/// Half the integrated absolute difference; both densities on the same grid.
template <class Tag>
double tv_distance(const GridDensity<Tag>& a, const GridDensity<Tag>& b) {
    if (a.size() != b.size() || std::abs(a.step() - b.step()) > 1e-15 * a.step())
        throw std::invalid_argument("tv_distance: grids differ");
    return 0.5 * (a.masses() - b.masses()).cwiseAbs().sum();
}

class AliasingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::size_t fft_size(std::size_t at_least) {
    std::size_t n = 1;
    while (n < at_least) n <<= 1;
    return n;
}

/// z-fold self-convolution of node masses through the characteristic function,
/// zero-padded to at least twice the support of the result.
inline RVector spectral_power(const RVector& masses, int z) {
    const auto n = static_cast<std::size_t>(masses.size());
    const std::size_t out = static_cast<std::size_t>(z) * (n - 1) + 1;
    const std::size_t len = fft_size(2 * out);
    std::vector<cplx> in(len, 0.0), spec, back;
    for (std::size_t k = 0; k < n; ++k) in[k] = masses(static_cast<Eigen::Index>(k));
    Eigen::FFT<double> fft;
    fft.fwd(spec, in);
    for (auto& c : spec) {
        cplx p = 1.0;
        for (int i = 0; i < z; ++i) p *= c;
        c = p;
    }
    fft.inv(back, spec);
    RVector q(static_cast<Eigen::Index>(out));
    for (std::size_t k = 0; k < out; ++k) q(static_cast<Eigen::Index>(k)) = back[k].real();
    return q;
}

/// Clips negative ringing and renormalizes; throws if the clipped mass is not negligible.
inline void clip_and_normalize(RVector& m, const char* who) {
    double clipped = 0.0;
    for (Eigen::Index k = 0; k < m.size(); ++k)
        if (m(k) < 0.0) {
            clipped -= m(k);
            m(k) = 0.0;
        } else if (m(k) < 1e-300) {
            m(k) = 0.0;
        }
    if (clipped > 1e-6) throw std::runtime_error(std::string(who) + ": negative ringing mass " + std::to_string(clipped));
    m /= m.sum();
}

inline void aliasing_guard(const RVector& m, const char* who) {
    // nodes within 1e-6 (relative) of the upper edge: only the last node on any grid of < 1e6 nodes
    const double top = m(m.size() - 1);
    if (top > 1e-6)
        throw AliasingError(std::string(who) + ": mass " + std::to_string(top) +
                            " at the eta-grid upper edge; increase alpha_max");
}

}  // namespace detail

/// Distribution of eta = A * sum_{j<=z} alpha_j for i.i.d. alpha_j ~ P. The result lives
/// on the grid of |eta| with step |A| * P.step(); sign of A is absorbed by the a -> -a gauge.
inline EtaDistribution convolve_to_eta(const AlphaDistribution& p, int z, double hopping) {
    if (z < 1) throw std::invalid_argument("convolve_to_eta: z must be >= 1");
    if (!p.is_normalized(1e-9)) throw std::invalid_argument("convolve_to_eta: P is not normalized");
    if (hopping == 0.0) {
        RVector m = RVector::Zero(2);
        m(0) = 1.0;
        return EtaDistribution::from_masses(p.step(), m);
    }
    RVector q = detail::spectral_power(p.masses() / p.integral(), z);
    detail::clip_and_normalize(q, "convolve_to_eta");
    detail::aliasing_guard(q, "convolve_to_eta");
    return EtaDistribution::from_masses(std::abs(hopping) * p.step(), q);
}

/// Direct z-fold convolution of node masses; used to cross-check the spectral route.
inline RVector direct_convolution_power(const RVector& masses, int z) {
    RVector acc = masses;
    for (int i = 1; i < z; ++i) {
        RVector next = RVector::Zero(acc.size() + masses.size() - 1);
        for (Eigen::Index a = 0; a < acc.size(); ++a)
            for (Eigen::Index b = 0; b < masses.size(); ++b) next(a + b) += acc(a) * masses(b);
        acc = std::move(next);
    }
    return acc;
}

struct GaussianMeasure {
    double mean = 0.0;
    double delta = 0.0;
};

/// Eta distribution under hopping disorder: phi = A alpha with A ~ N(mean, delta) on
/// each bond, then the z-fold convolution over phi directly. The A measure is
/// integrated on a uniform node set fine enough that neighbouring nodes land at most
/// one phi-grid step apart.
inline EtaDistribution hopping_disorder_transform(const AlphaDistribution& p, const GaussianMeasure& a, int z) {
    if (z < 1) throw std::invalid_argument("hopping_disorder_transform: z must be >= 1");
    if (!(a.delta >= 0.0)) throw std::invalid_argument("hopping_disorder_transform: delta must be >= 0");
    if (!p.is_normalized(1e-9)) throw std::invalid_argument("hopping_disorder_transform: P is not normalized");
    if (a.delta == 0.0) return convolve_to_eta(p, z, a.mean);

    const double step = (std::abs(a.mean) + a.delta) * p.step();
    const double alpha_max = p.max();
    const int n_a = static_cast<int>(std::ceil(16.0 * a.delta * alpha_max / step)) + 1;
    std::vector<double> nodes(n_a), weights(n_a);
    double wsum = 0.0;
    for (int i = 0; i < n_a; ++i) {
        const double t = n_a == 1 ? 0.0 : -8.0 + 16.0 * i / double(n_a - 1);
        nodes[i] = a.mean + a.delta * t;
        weights[i] = std::exp(-0.5 * t * t);
        wsum += weights[i];
    }
    for (auto& w : weights) w /= wsum;

    const double a_lo = nodes.front(), a_hi = nodes.back();
    const long k_lo = static_cast<long>(std::floor(std::min(0.0, a_lo * alpha_max) / step));
    const long k_hi = static_cast<long>(std::ceil(std::max(0.0, a_hi * alpha_max) / step));
    RVector phi = RVector::Zero(k_hi - k_lo + 2);
    const RVector pm = p.masses() / p.integral();
    for (int i = 0; i < n_a; ++i)
        for (int k = 0; k < p.size(); ++k) {
            if (pm(k) == 0.0) continue;
            const double t = nodes[i] * p.x(k) / step - double(k_lo);
            const auto j = static_cast<Eigen::Index>(std::floor(t));
            const double f = t - double(j);
            const double w = weights[i] * pm(k);
            phi(j) += (1.0 - f) * w;
            phi(j + 1) += f * w;
        }

    RVector sum = detail::spectral_power(phi, z);
    // index s of `sum` sits at phi-sum = (s + z k_lo) * step; fold onto |eta|
    const long offset = static_cast<long>(z) * k_lo;
    long top = 0;
    for (Eigen::Index s = 0; s < sum.size(); ++s) top = std::max(top, std::labs(s + offset));
    RVector eta = RVector::Zero(top + 1);
    for (Eigen::Index s = 0; s < sum.size(); ++s) eta(std::labs(s + offset)) += sum(s);
    detail::clip_and_normalize(eta, "hopping_disorder_transform");
    detail::aliasing_guard(eta, "hopping_disorder_transform");
    return EtaDistribution::from_masses(step, eta);
}

// ------------------------------ quadrature -----------------------------------

struct Quadrature {
    std::vector<double> nodes, weights;
};

/// Gauss-Hermite rule for the standard normal measure (Golub-Welsch).
inline Quadrature gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    RMatrix jac = RMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(double(k));
    Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
    Quadrature q;
    for (int i = 0; i < n; ++i) {
        q.nodes.push_back(es.eigenvalues()(i));
        q.weights.push_back(es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
    }
    return q;
}

// ---------------------------- single-site model ------------------------------

struct SMFTConfig {
    int z = 4;
    int n_grid = 512;
    double alpha_max = 3.0;
    double tol_tv = 1e-4;
    int max_iters = 200;
    int quad_nodes = 64;
    int n_max = 20;
    double weight_cutoff = 1e-14;    // node pairs below this weight are skipped
    double max_excluded = 1e-3;      // failed-node weight that aborts a step
    int workers = 0;
    SolverOptions solver{};

    void validate() const {
        if (z < 1) throw std::invalid_argument("SMFTConfig: z must be >= 1");
        if (n_grid < 2 || max_iters < 1 || quad_nodes < 1 || n_max < 1)
            throw std::invalid_argument("SMFTConfig: counts must be positive");
        if (!(alpha_max > 0.0) || !(tol_tv > 0.0)) throw std::invalid_argument("SMFTConfig: alpha_max and tol_tv must be positive");
    }
};

/// Clean single-site model plus one disordered parameter family. mu is measured from
/// the clean cavity frequency omega_c; detuning draws move the cavity frequency only.
struct SMFTModel {
    double omega_c = 10.0;
    double detuning = 0.0;  // mean detuning
    double g = 1.0;         // mean coupling
    double hopping = 0.0;   // mean hopping A
    double mu_over_g = 0.0; // (mu - omega_c) / g
    DisorderTarget target = DisorderTarget::detuning;
    double delta = 0.0;

    double mu() const { return omega_c + mu_over_g * g; }
    double nu() const { return omega_c + detuning; }
};

struct SiteSolution {
    double alpha = 0.0;      // |<a>|
    double n = 0.0, z_atom = 0.0, in_site = 0.0, var_n = 0.0;
    CVector state;
    bool degenerate = false;
};

/// Single-site mean-field Hamiltonian with field eta:
/// (omega - mu) a^dag a + (nu - mu) s^dag s + g (s^dag a + s a^dag) - (eta* a + eta a^dag).
class SiteHamiltonian {
public:
    static constexpr double kEtaLimit = 1e-9;

    explicit SiteHamiltonian(int n_max) : basis_(n_max) {
        const auto ops = site_operators(basis_);
        photons_ = CMatrix((ops.a_dag * ops.a).matrix()).real();
        atom_ = CMatrix((ops.sigma_dag * ops.sigma).matrix()).real();
        jc_ = CMatrix((ops.sigma_dag * ops.a + ops.sigma * ops.a_dag).matrix()).real();
        a_ = CMatrix(ops.a.matrix()).real();
        number_ = photons_ + atom_;
    }

    const SiteBasis& basis() const noexcept { return basis_; }

    RMatrix matrix(double omega, double nu, double g, double mu, double eta) const {
        return (omega - mu) * photons_ + (nu - mu) * atom_ + g * jc_ - eta * (a_ + a_.transpose());
    }

    CMatrix matrix(double omega, double nu, double g, double mu, cplx eta) const {
        CMatrix h = ((omega - mu) * photons_ + (nu - mu) * atom_ + g * jc_).cast<cplx>();
        h -= std::conj(eta) * a_.cast<cplx>() + eta * a_.transpose().cast<cplx>();
        return h;
    }

    /// A degenerate ground state at eta = 0 is resolved by the eta -> 0+ limit.
    SiteSolution solve(double omega, double nu, double g, double mu, double eta, bool full, const SolverOptions& opt) const {
        RMatrix h = matrix(omega, nu, g, mu, eta);
        auto pair = lowest_real_eigenpair(h);
        if (eta == 0.0 && pair.gap < opt.degeneracy_tol) {
            h = matrix(omega, nu, g, mu, kEtaLimit);
            pair = lowest_real_eigenpair(h);
        }
        const RVector& v = pair.vector;
        const double res = (h * v - pair.energy * v).norm();
        if (res > opt.tol) throw ConvergenceError("site solve residual above tolerance", res);
        SiteSolution s;
        s.degenerate = pair.gap < opt.degeneracy_tol;
        s.alpha = std::abs(v.dot(a_ * v));
        if (full) fill(s, v.cast<cplx>());
        return s;
    }

    /// Complex field; the ground state is found with the full hermitian solver.
    SiteSolution solve(double omega, double nu, double g, double mu, cplx eta, bool full, const SolverOptions& opt) const {
        const CMatrix h = matrix(omega, nu, g, mu, eta);
        const auto pair = lowest_eigenpair_dense(h);
        const double res = (h * pair.vector - pair.energy * pair.vector).norm();
        if (res > opt.tol) throw ConvergenceError("site solve residual above tolerance", res);
        SiteSolution s;
        s.degenerate = pair.gap < opt.degeneracy_tol;
        s.alpha = std::abs(pair.vector.dot(a_.cast<cplx>() * pair.vector));
        if (full) fill(s, pair.vector);
        return s;
    }

private:
    void fill(SiteSolution& s, const CVector& v) const {
        s.n = v.dot(number_.cast<cplx>() * v).real();
        s.var_n = v.dot((number_ * number_).cast<cplx>() * v).real() - s.n * s.n;
        s.z_atom = v.dot(atom_.cast<cplx>() * v).real();
        s.in_site = negativity_pure(QuantumState(v), {0}, {2, basis_.photon_dim()});
        s.state = v;
    }

    SiteBasis basis_;
    RMatrix photons_, atom_, jc_, a_, number_;
};

struct NodeObservables {
    double weight;
    double alpha, n, z_atom, in_site, var_n;
};

struct SMFTResult {
    AlphaDistribution p_alpha;
    int iterations = 0;
    bool converged = false;
    bool oscillating = false;
    std::vector<double> tv_history;
    double mean_alpha = 0.0;
    DensityMatrix avg_state;          // disorder-averaged single-site state, dims (atom, photon)
    double ent_of_avg_state = 0.0;    // atom-photon negativity of avg_state
    double mean_in_site = 0.0;        // ensemble mean of the per-node in-site negativity
    double mean_n = 0.0, mean_z = 0.0;
    double number_variance = 0.0;     // variance of N in avg_state
    double mean_local_variance = 0.0; // mean over nodes of var(N) in each ground state
    double overflow_mass = 0.0;       // weight deposited at alpha_max from beyond the grid
    std::vector<NodeObservables> nodes;

    /// Weighted histogram of one node observable.
    template <class Member>
    Histogram histogram(Member m, double lo, double hi, int bins) const {
        Histogram h(lo, hi, bins);
        for (const auto& n : nodes) h.add(n.*m, n.weight);
        h.normalize();
        return h;
    }

    /// Mass of the <N> distribution within +-tol of an integer.
    double integer_concentration(double tol) const {
        double s = 0.0, tot = 0.0;
        for (const auto& n : nodes) {
            tot += n.weight;
            if (std::abs(n.n - std::round(n.n)) <= tol) s += n.weight;
        }
        return s / tot;
    }

    double mass_above(double n_threshold) const {
        double s = 0.0, tot = 0.0;
        for (const auto& n : nodes) {
            tot += n.weight;
            if (n.n > n_threshold) s += n.weight;
        }
        return s / tot;
    }
};

/// Holds the model, the disorder quadrature and a memo of site responses keyed by
/// (disorder node, eta node). The eta grid is fixed for a given model, so every
/// iteration reuses earlier solves.
class SMFTSolver {
public:
    SMFTSolver(SMFTModel model, SMFTConfig config) : model_(model), config_(config), site_(config.n_max) {
        config_.validate();
        if (!(model_.delta >= 0.0)) throw std::invalid_argument("SMFTModel: delta must be >= 0");
        const bool on_site = model_.target != DisorderTarget::hopping && model_.delta > 0.0;
        const Quadrature q = on_site ? gauss_hermite(config_.quad_nodes) : Quadrature{{0.0}, {1.0}};
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            Node n{model_.omega_c, model_.nu(), model_.g, q.weights[k]};
            if (on_site && model_.target == DisorderTarget::detuning)
                n.omega = model_.nu() - (model_.detuning + model_.delta * q.nodes[k]);
            if (on_site && model_.target == DisorderTarget::coupling) n.g = model_.g + model_.delta * q.nodes[k];
            nodes_.push_back(n);
        }
    }

    const SMFTModel& model() const noexcept { return model_; }
    const SMFTConfig& config() const noexcept { return config_; }
    std::size_t disorder_nodes() const noexcept { return nodes_.size(); }

    AlphaDistribution initial() const { return AlphaDistribution::uniform(config_.alpha_max, config_.n_grid); }

    EtaDistribution eta_distribution(const AlphaDistribution& p) const {
        if (model_.target == DisorderTarget::hopping && model_.delta > 0.0)
            return hopping_disorder_transform(p, {model_.hopping, model_.delta}, config_.z);
        return convolve_to_eta(p, config_.z, model_.hopping);
    }

    /// One fixed-point map P_i -> P_{i+1}.
    AlphaDistribution step(const AlphaDistribution& p) {
        const auto q = eta_distribution(p);
        const RVector qm = q.masses();
        prepare_cache(q);
        std::vector<std::pair<std::size_t, int>> missing;
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            for (int j = 0; j < q.size(); ++j)
                if (nodes_[k].weight * qm(j) > config_.weight_cutoff && std::isnan(cache_[k][j])) missing.emplace_back(k, j);
        parallel_for(missing.size(), config_.workers, [&](std::size_t i) {
            auto [k, j] = missing[i];
            const auto& n = nodes_[k];
            try {
                cache_[k][j] = site_.solve(n.omega, n.nu, n.g, model_.mu(), q.x(j), false, config_.solver).alpha;
            } catch (const std::exception&) {
                cache_[k][j] = -1.0;  // failed
            }
        });

        RVector out = RVector::Zero(config_.n_grid);
        const double step = config_.alpha_max / double(config_.n_grid - 1);
        double excluded = 0.0;
        last_overflow_ = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            for (int j = 0; j < q.size(); ++j) {
                const double w = nodes_[k].weight * qm(j);
                if (w <= config_.weight_cutoff) continue;
                const double a = cache_[k][j];
                if (a < 0.0) {
                    excluded += w;
                    continue;
                }
                last_overflow_ += AlphaDistribution::deposit(out, step, a, w);
            }
        if (excluded > config_.max_excluded)
            throw std::runtime_error("smft_step: failed-node weight " + std::to_string(excluded) + " exceeds limit");
        out /= out.sum();
        return AlphaDistribution::from_masses(step, out);
    }

    double last_overflow() const noexcept { return last_overflow_; }

    /// Iterates to TV convergence, then evaluates the ensemble over the final Q.
    SMFTResult solve(std::optional<AlphaDistribution> start = std::nullopt) {
        SMFTResult r;
        AlphaDistribution p = start.value_or(initial());
        std::vector<AlphaDistribution> recent{p};
        int cycling = 0;
        for (int it = 1; it <= config_.max_iters; ++it) {
            AlphaDistribution next = step(p);
            const double tv = tv_distance(p, next);
            r.tv_history.push_back(tv);
            r.iterations = it;
            if (recent.size() >= 2 && tv >= config_.tol_tv && tv_distance(recent[recent.size() - 2], next) < config_.tol_tv)
                ++cycling;
            else
                cycling = 0;
            recent.push_back(next);
            if (recent.size() > 3) recent.erase(recent.begin());
            p = std::move(next);
            if (tv < config_.tol_tv) {
                r.converged = true;
                break;
            }
            if (cycling >= 10) {
                r.oscillating = true;
                break;
            }
        }
        r.p_alpha = p;
        r.mean_alpha = p.mean();
        r.overflow_mass = last_overflow_;
        evaluate(r);
        return r;
    }

private:
    struct Node {
        double omega, nu, g, weight;
    };

    void prepare_cache(const EtaDistribution& q) {
        if (cache_.empty() || cache_step_ != q.step() || cache_size_ != q.size()) {
            cache_.assign(nodes_.size(), std::vector<double>(q.size(), std::numeric_limits<double>::quiet_NaN()));
            cache_step_ = q.step();
            cache_size_ = q.size();
        }
    }

    void evaluate(SMFTResult& r) const {
        const auto q = eta_distribution(r.p_alpha);
        const RVector qm = q.masses();
        std::vector<std::pair<std::size_t, int>> pairs;
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            for (int j = 0; j < q.size(); ++j)
                if (nodes_[k].weight * qm(j) > config_.weight_cutoff) pairs.emplace_back(k, j);
        struct Slot {
            bool ok = false;
            SiteSolution s;
        };
        auto slots = parallel_map<Slot>(pairs.size(), config_.workers, [&](std::size_t i) {
            auto [k, j] = pairs[i];
            const auto& n = nodes_[k];
            Slot slot;
            try {
                slot.s = site_.solve(n.omega, n.nu, n.g, model_.mu(), q.x(j), true, config_.solver);
                slot.ok = true;
            } catch (const std::exception&) {
            }
            return slot;
        });
        const int d = site_.basis().local_dim();
        CMatrix rho = CMatrix::Zero(d, d);
        double total = 0.0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (!slots[i].ok) continue;
            const auto& s = slots[i].s;
            const double w = nodes_[pairs[i].first].weight * qm(pairs[i].second);
            total += w;
            rho += w * s.state * s.state.adjoint();
            r.nodes.push_back({w, s.alpha, s.n, s.z_atom, s.in_site, s.var_n});
        }
        rho /= total;
        for (auto& n : r.nodes) {
            n.weight /= total;
            r.mean_n += n.weight * n.n;
            r.mean_z += n.weight * n.z_atom;
            r.mean_in_site += n.weight * n.in_site;
            r.mean_local_variance += n.weight * n.var_n;
        }
        r.avg_state = DensityMatrix({2, site_.basis().photon_dim()}, rho);
        r.ent_of_avg_state = negativity(r.avg_state, {0});
        const CMatrix num = CMatrix(site_operators(site_.basis()).n_op.matrix());
        const double n1 = (rho * num).trace().real(), n2 = (rho * num * num).trace().real();
        r.number_variance = n2 - n1 * n1;
    }

    SMFTModel model_;
    SMFTConfig config_;
    SiteHamiltonian site_;
    std::vector<Node> nodes_;
    std::vector<std::vector<double>> cache_;
    double cache_step_ = 0.0;
    int cache_size_ = 0;
    double last_overflow_ = 0.0;
};

inline AlphaDistribution smft_step(const AlphaDistribution& p, const SMFTModel& model, const SMFTConfig& config) {
    SMFTSolver s(model, config);
    return s.step(p);
}

inline SMFTResult smft_solve(const SMFTModel& model, const SMFTConfig& config) {
    SMFTSolver s(model, config);
    return s.solve();
}

}  // namespace jch
