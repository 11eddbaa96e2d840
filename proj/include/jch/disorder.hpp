// disorder.hpp: Gaussian static disorder for small lattices: realization sampling,
// exact fixed-sector ground states per realization, ensemble statistics.

#pragma once

#include "jch/eigensolve.hpp"
#include "jch/model.hpp"
#include "jch/parallel.hpp"
#include "jch/quantum_info.hpp"
#include "jch/stats.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jch {

enum class DisorderTarget { detuning, hopping, coupling };

inline const char* to_string(DisorderTarget t) {
    switch (t) {
        case DisorderTarget::detuning: return "detuning";
        case DisorderTarget::hopping: return "hopping";
        case DisorderTarget::coupling: return "coupling";
    }
    return "?";
}

inline DisorderTarget parse_disorder_target(const std::string& s) {
    if (s == "detuning") return DisorderTarget::detuning;
    if (s == "hopping") return DisorderTarget::hopping;
    if (s == "coupling") return DisorderTarget::coupling;
    throw std::invalid_argument("unknown disorder target '" + s + "' (expected detuning, hopping or coupling)");
}

struct DisorderSpec {
    DisorderTarget target = DisorderTarget::detuning;
    std::optional<double> mean;  // unset: each site/edge fluctuates around its base value
    double delta = 0.0;          // standard deviation
    int n_samples = 4000;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(delta >= 0.0)) throw std::invalid_argument("DisorderSpec: delta must be >= 0");
        if (n_samples < 1) throw std::invalid_argument("DisorderSpec: n_samples must be >= 1");
    }
};

/// Independent Gaussian draws replace the target family. Detuning disorder moves the
/// cavity frequency: omega_i = nu_i - Delta_i. Draws are a pure function of
/// (seed, sample_index); unbounded draws (negative g or A) are kept as drawn.
inline JCHParams sample_realization(const JCHParams& base, const DisorderSpec& spec, std::uint64_t sample_index) {
    spec.validate();
    JCHParams p = base;
    auto draw = [&](std::size_t count) { return standard_normals(spec.seed, sample_index, count); };
    switch (spec.target) {
        case DisorderTarget::detuning: {
            const auto z = draw(p.omega.size());
            for (std::size_t i = 0; i < p.omega.size(); ++i) {
                const double mean = spec.mean.value_or(base.nu[i] - base.omega[i]);
                p.omega[i] = base.nu[i] - (mean + spec.delta * z[i]);
            }
            break;
        }
        case DisorderTarget::coupling: {
            const auto z = draw(p.g.size());
            for (std::size_t i = 0; i < p.g.size(); ++i) p.g[i] = spec.mean.value_or(base.g[i]) + spec.delta * z[i];
            break;
        }
        case DisorderTarget::hopping: {
            const auto z = draw(p.hopping.size());
            for (std::size_t e = 0; e < p.hopping.size(); ++e)
                p.hopping[e] = spec.mean.value_or(base.hopping[e]) + spec.delta * z[e];
            break;
        }
    }
    return p;
}

struct SampleRecord {
    double n1 = 0.0;         // <N_1> on the first site
    double var_n1 = 0.0;
    double site_site = 0.0;  // negativity between sites 0 and 1
    double in_site = 0.0;    // atom-photon negativity of site 0
    double atom_atom = 0.0;
    double z_atoms = 0.0;    // <sum_i sigma_i^dag sigma_i>
    double energy = 0.0;
    bool degenerate = false;
};

struct EnsembleOptions {
    int bins = 40;
    int workers = 0;
    SolverOptions solver{};
};

struct EnsembleStats {
    DisorderSpec spec;
    std::vector<SampleRecord> records;  // failed samples are excluded
    Histogram n1{0.0, 2.0, 40}, site_site{0.0, 1.0, 40}, z_atoms{0.0, 2.0, 40}, var_n1{0.0, 1.0, 40};
    DensityMatrix average_state;        // average reduced state of sites (0, 1)
    double avg_entanglement = 0.0;      // mean over realizations of E[rho_AB]
    double ent_of_avg_state = 0.0;      // E of the average state
    int failures = 0;
    int degenerate = 0;
    double mean_n1 = 0.0, var_of_n1 = 0.0, mean_z = 0.0;
};

inline double average_entanglement(const std::vector<SampleRecord>& records) {
    if (records.empty()) throw std::invalid_argument("average_entanglement: empty ensemble");
    double s = 0.0;
    for (const auto& r : records) s += r.site_site;
    return s / double(records.size());
}

/// Site-site negativity of an average two-site state.
inline double entanglement_of_average(const DensityMatrix& average_state) { return negativity(average_state, {0}); }

/// Equal-weight mixture of pure states on the given factorization.
inline DensityMatrix mixture(const std::vector<QuantumState>& states, std::vector<int> dims) {
    if (states.empty()) throw std::invalid_argument("mixture: empty ensemble");
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(states[0].dim()), static_cast<Eigen::Index>(states[0].dim()));
    for (const auto& s : states) m += s.amplitudes() * s.amplitudes().adjoint();
    return DensityMatrix(std::move(dims), m / double(states.size()));
}

/// Per-realization observables for a fixed-sector ground state already embedded in `space`.
inline SampleRecord measure_two_site(const QuantumState& g, const JCHTerms& terms) {
    const auto& space = terms.space();
    SampleRecord r;
    const auto n0 = terms.number(0);
    r.n1 = expectation(n0, g).real();
    r.var_n1 = expectation(n0 * n0, g).real() - r.n1 * r.n1;
    for (int i = 0; i < space.n_sites(); ++i) r.z_atoms += expectation(terms.atom_number(i), g).real();
    r.site_site = site_site_entanglement(g, 0, 1, space);
    r.in_site = in_site_entanglement(g, 0, space);
    r.atom_atom = atom_atom_entanglement(g, 0, 1, space);
    return r;
}

/// Clean-system point solve in the sector n_total = n_sites.
struct TwoSiteSolve {
    EigResult ground;
    SampleRecord record;
};

inline TwoSiteSolve solve_two_site(const JCHParams& p, const JCHTerms& terms, const SolverOptions& opt = {}) {
    const int n_total = terms.space().n_sites();
    TwoSiteSolve out;
    out.ground = ground_state_in_sector(terms.assemble(p), n_total, terms.space(), opt);
    out.record = measure_two_site(out.ground.state, terms);
    out.record.energy = out.ground.energy;
    out.record.degenerate = out.ground.degenerate;
    return out;
}

/// Solves every realization in the sector n_total = n_sites and accumulates
/// histograms, the average state and both entanglement averages.
inline EnsembleStats run_ensemble(const JCHParams& base, const HilbertSpace& space, const DisorderSpec& spec,
                                  const EnsembleOptions& opt = {}) {
    spec.validate();
    if (space.n_sites() < 2) throw std::invalid_argument("run_ensemble: need at least two sites");
    base.validate(space.lattice);
    const JCHTerms terms(space);
    const int n_total = space.n_sites();
    const SectorTerms sector(terms, n_total);
    const auto full_dim = static_cast<int>(space.dim());

    struct Slot {
        bool ok = false;
        SampleRecord rec;
        CVector sector_state;
    };
    auto slots = parallel_map<Slot>(static_cast<std::size_t>(spec.n_samples), opt.workers, [&](std::size_t s) {
        Slot slot;
        try {
            const auto p = sample_realization(base, spec, s);
            const RMatrix h = sector.assemble(p);
            const auto pair = lowest_eigenpair_dense(h);
            const double res = (h.cast<cplx>() * pair.vector - pair.energy * pair.vector).norm();
            if (res > opt.solver.tol) throw ConvergenceError("sector solve residual above tolerance", res);
            const QuantumState g(sector.embed(pair.vector, full_dim));
            slot.rec = measure_two_site(g, terms);
            slot.rec.energy = pair.energy;
            slot.rec.degenerate = pair.gap < opt.solver.degeneracy_tol;
            slot.sector_state = pair.vector;
            slot.ok = true;
        } catch (const std::exception&) {
            slot.ok = false;
        }
        return slot;
    });

    EnsembleStats st;
    st.spec = spec;
    st.n1 = Histogram(0.0, double(n_total), opt.bins);
    st.site_site = Histogram(0.0, 1.0, opt.bins);
    st.z_atoms = Histogram(0.0, double(space.n_sites()), opt.bins);
    st.var_n1 = Histogram(0.0, 0.25 * n_total * n_total, opt.bins);
    CMatrix avg = CMatrix::Zero(sector.size(), sector.size());
    for (const auto& slot : slots) {
        if (!slot.ok) {
            ++st.failures;
            continue;
        }
        st.records.push_back(slot.rec);
        avg += slot.sector_state * slot.sector_state.adjoint();
    }
    if (st.failures > 0.01 * spec.n_samples)
        throw std::runtime_error("run_ensemble: " + std::to_string(st.failures) + " of " +
                                 std::to_string(spec.n_samples) + " realizations failed");
    const double n_ok = double(st.records.size());
    avg /= n_ok;

    CMatrix full = CMatrix::Zero(full_dim, full_dim);
    for (int r = 0; r < sector.size(); ++r)
        for (int c = 0; c < sector.size(); ++c) full(sector.indices()[r], sector.indices()[c]) = avg(r, c);
    DensityMatrix rho(space.site_dims(), std::move(full));
    st.average_state = space.n_sites() == 2 ? rho : partial_trace(rho, {0, 1});

    for (const auto& r : st.records) {
        st.n1.add(r.n1);
        st.site_site.add(r.site_site);
        st.z_atoms.add(r.z_atoms);
        st.var_n1.add(r.var_n1);
        st.mean_n1 += r.n1 / n_ok;
        st.mean_z += r.z_atoms / n_ok;
        if (r.degenerate) ++st.degenerate;
    }
    for (const auto& r : st.records) st.var_of_n1 += (r.n1 - st.mean_n1) * (r.n1 - st.mean_n1) / n_ok;
    st.n1.normalize();
    st.site_site.normalize();
    st.z_atoms.normalize();
    st.var_n1.normalize();
    st.avg_entanglement = average_entanglement(st.records);
    st.ent_of_avg_state = entanglement_of_average(st.average_state);
    return st;
}

}  // namespace jch
