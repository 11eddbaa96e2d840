// experiments.hpp: the five experiment drivers: each one turns a resolved
// ExperimentConfig into data files inside a RunContext.

#pragma once

#include "jch/cli/artifacts.hpp"
#include "jch/disorder.hpp"
#include "jch/meanfield.hpp"
#include "jch/smft.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace jch::cli {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = n == 1 ? lo : lo + (hi - lo) * k / double(n - 1);
    return v;
}

// ------------------------------ clean-two-site --------------------------------

inline void run_clean_two_site(RunContext& ctx) {
    const auto& c = ctx.config();
    const HilbertSpace space{SiteBasis(c.model.n_max), LatticeSpec::chain(2)};
    const JCHTerms terms(space);
    const auto dets = linspace(c.clean.detuning_min, c.clean.detuning_max, c.clean.grid_delta);
    const auto logs = linspace(c.clean.log10_a_min, c.clean.log10_a_max, c.clean.grid_A);
    const double g = c.model.g;
    const auto recs = parallel_map<SampleRecord>(dets.size() * logs.size(), c.workers, [&](std::size_t idx) {
        const double det = dets[idx % dets.size()] * g, a = std::pow(10.0, logs[idx / dets.size()]) * g;
        return solve_two_site(JCHParams::uniform(space.lattice, c.model.omega, det, g, a), terms).record;
    });

    auto all = ctx.csv("clean_two_site.csv", {"detuning_over_g", "log10_A_over_g", "site_site", "in_site", "atom_atom", "n1",
                                              "var_n1", "energy_over_g", "degenerate"});
    auto ss = ctx.csv("map_site_site.csv", {"detuning_over_g", "log10_A_over_g", "negativity"});
    auto is = ctx.csv("map_in_site.csv", {"detuning_over_g", "log10_A_over_g", "negativity"});
    auto aa = ctx.csv("map_atom_atom.csv", {"detuning_over_g", "log10_A_over_g", "negativity"});
    for (std::size_t idx = 0; idx < recs.size(); ++idx) {
        const double d = dets[idx % dets.size()], l = logs[idx / dets.size()];
        const auto& r = recs[idx];
        all.row(d, l, r.site_site, r.in_site, r.atom_atom, r.n1, r.var_n1, r.energy / g, r.degenerate);
        ss.row(d, l, r.site_site);
        is.row(d, l, r.in_site);
        aa.row(d, l, r.atom_atom);
    }
}

// ----------------------------- mf-phase-diagram -------------------------------

inline ClusterSetup cluster_setup(const ExperimentConfig& c) {
    ClusterSetup s;
    if (c.mf.cluster == "plaquette") {
        const auto p = LatticeSpec::plaquette();
        s.cluster = LatticeSpec(p.n_sites(), p.edges(), c.mf.z);
    } else {
        const auto ch = LatticeSpec::chain(c.mf.cluster_sites);
        s.cluster = LatticeSpec(ch.n_sites(), ch.edges(), c.mf.z);
    }
    s.n_max = c.model.n_max;
    s.omega = c.model.omega;
    s.detuning = c.model.detuning * c.model.g;
    s.g = c.model.g;
    return s;
}

inline void run_mf_phase_diagram(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto setup = cluster_setup(c);
    PhaseGrid grid{linspace(c.mf.mu_min, c.mf.mu_max, c.mf.grid_mu), linspace(c.mf.log10_a_min, c.mf.log10_a_max, c.mf.grid_A)};
    MFPolicy policy;
    policy.alpha_max = c.mf.alpha_max;
    const auto pts = phase_diagram_sweep(setup, grid, policy, c.workers);
    const auto lobes = find_lobes(pts, grid.mu_over_g.size(), grid.log10_a.size());

    auto out = ctx.csv("phase_diagram.csv", {"mu_over_g", "log10_A_over_g", "alpha", "site_cluster_ent", "in_site_ent", "filling",
                                             "fixed_point_residual", "truncation_weight", "lobe", "flags", "error"});
    int failures = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!p.error.empty()) ++failures;
        out.row(p.mu_over_g, p.log10_a, p.alpha, p.site_cluster_ent, p.in_site_ent, p.filling, p.fixed_point_residual,
                p.truncation_weight, lobes.label[i], p.flags(), p.error);
    }
    json lobe_list = json::array();
    for (std::size_t l = 0; l < lobes.filling_of_label.size(); ++l) {
        long cells = 0;
        for (int lab : lobes.label) cells += lab == int(l);
        lobe_list.push_back({{"label", l}, {"filling", lobes.filling_of_label[l]}, {"cells", cells}});
    }
    ctx.write_json("summary.json", {{"points", pts.size()}, {"failures", failures}, {"lobes", lobe_list}});
    if (failures > 0) throw std::runtime_error(std::to_string(failures) + " phase-diagram points failed (see phase_diagram.csv)");
}

// ----------------------------- disorder-ensemble ------------------------------

inline void write_histogram_rows(CsvWriter& w, double delta, const Histogram& h) {
    for (int b = 0; b < h.bins(); ++b) w.row(delta, h.center(b), h.probabilities()[b]);
}

inline void run_disorder_ensemble(RunContext& ctx) {
    const auto& c = ctx.config();
    const HilbertSpace space{SiteBasis(c.model.n_max), LatticeSpec::chain(2)};
    const double g = c.model.g;
    DisorderSpec base_spec;
    base_spec.target = parse_disorder_target(c.disorder.target);
    if (c.disorder.mean) base_spec.mean = *c.disorder.mean * g;
    base_spec.n_samples = c.disorder.n_samples;
    base_spec.seed = c.seed;
    EnsembleOptions opt;
    opt.bins = c.disorder.bins;
    opt.workers = c.workers;

    if (c.disorder.mode == "map") {
        const auto dets = linspace(c.clean.detuning_min, c.clean.detuning_max, c.clean.grid_delta);
        const auto logs = linspace(c.clean.log10_a_min, c.clean.log10_a_max, c.clean.grid_A);
        auto out = ctx.csv("avg_entanglement_map.csv",
                           {"detuning_over_g", "log10_A_over_g", "delta_over_g", "avg_entanglement", "ent_of_avg_state", "mean_n1"});
        DisorderSpec spec = base_spec;
        spec.delta = c.disorder.map_delta * g;
        for (std::size_t idx = 0; idx < dets.size() * logs.size(); ++idx) {
            const double d = dets[idx % dets.size()], l = logs[idx / dets.size()];
            const auto base = JCHParams::uniform(space.lattice, c.model.omega, d * g, g, std::pow(10.0, l) * g);
            const auto st = run_ensemble(base, space, spec, opt);
            out.row(d, l, c.disorder.map_delta, st.avg_entanglement, st.ent_of_avg_state, st.mean_n1);
        }
        return;
    }

    const auto base = JCHParams::uniform(space.lattice, c.model.omega, c.model.detuning * g, g, c.model.hopping * g);
    auto summary = ctx.csv("summary.csv", {"delta_over_g", "avg_entanglement", "ent_of_avg_state", "mean_n1", "var_n1", "mean_z",
                                           "failures", "degenerate"});
    auto hn = ctx.csv("hist_n1.csv", {"delta_over_g", "bin_center", "probability"});
    auto he = ctx.csv("hist_site_site.csv", {"delta_over_g", "bin_center", "probability"});
    auto hz = ctx.csv("hist_z.csv", {"delta_over_g", "bin_center", "probability"});
    auto hv = ctx.csv("hist_var_n1.csv", {"delta_over_g", "bin_center", "probability"});
    for (double delta : c.disorder.resolved_deltas()) {
        DisorderSpec spec = base_spec;
        spec.delta = delta * g;
        const auto st = run_ensemble(base, space, spec, opt);
        summary.row(delta, st.avg_entanglement, st.ent_of_avg_state, st.mean_n1, st.var_of_n1, st.mean_z, st.failures,
                    st.degenerate);
        write_histogram_rows(hn, delta, st.n1);
        write_histogram_rows(he, delta, st.site_site);
        write_histogram_rows(hz, delta, st.z_atoms);
        write_histogram_rows(hv, delta, st.var_n1);
    }
}

// --------------------------------- smft ---------------------------------------

inline SMFTModel smft_model(const ExperimentConfig& c) {
    SMFTModel m;
    m.omega_c = c.model.omega;
    m.g = c.model.g;
    m.detuning = c.smft.detuning * c.model.g;
    m.hopping = c.smft.hopping * c.model.g;
    m.mu_over_g = c.smft.mu_over_g;
    m.target = parse_disorder_target(c.smft.target);
    m.delta = c.smft.delta * c.model.g;
    return m;
}

struct SMFTDistributions {
    Histogram alpha, n, z, in_site;
};

inline SMFTDistributions smft_histograms(const SMFTResult& r, const SMFTConfig& n, int bins) {
    Histogram a(0.0, n.alpha_max, bins);
    const RVector m = r.p_alpha.masses();
    for (int k = 0; k < r.p_alpha.size(); ++k) a.add(r.p_alpha.x(k), m(k));
    a.normalize();
    return {a, r.histogram(&NodeObservables::n, 0.0, double(n.n_max + 1), bins),
            r.histogram(&NodeObservables::z_atom, 0.0, 1.0, bins), r.histogram(&NodeObservables::in_site, 0.0, 0.5, bins)};
}

inline json smft_summary(const SMFTResult& r) {
    return {{"mean_alpha", r.mean_alpha},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"oscillating", r.oscillating},
            {"final_tv", r.tv_history.empty() ? 0.0 : r.tv_history.back()},
            {"ent_of_avg_state", r.ent_of_avg_state},
            {"mean_in_site", r.mean_in_site},
            {"mean_n", r.mean_n},
            {"mean_z", r.mean_z},
            {"number_variance", r.number_variance},
            {"mean_local_variance", r.mean_local_variance},
            {"overflow_mass", r.overflow_mass}};
}

inline void run_smft_solve(RunContext& ctx) {
    const auto& c = ctx.config();
    SMFTConfig numerics = c.smft.numerics;
    numerics.workers = c.workers;
    SMFTSolver solver(smft_model(c), numerics);
    const auto r = solver.solve();

    auto pa = ctx.csv("p_alpha.csv", {"alpha", "density"});
    for (int k = 0; k < r.p_alpha.size(); ++k) pa.row(r.p_alpha.x(k), r.p_alpha.density()(k));
    auto tv = ctx.csv("tv_history.csv", {"iteration", "tv"});
    for (std::size_t i = 0; i < r.tv_history.size(); ++i) tv.row(i + 1, r.tv_history[i]);
    const auto h = smft_histograms(r, numerics, c.smft.bins);
    auto dist = ctx.csv("distributions.csv", {"observable", "bin_center", "probability"});
    auto emit = [&](const char* name, const Histogram& hist) {
        for (int b = 0; b < hist.bins(); ++b) dist.row(name, hist.center(b), hist.probabilities()[b]);
    };
    emit("alpha", h.alpha);
    emit("n", h.n);
    emit("z", h.z);
    emit("in_site", h.in_site);
    ctx.write_json("summary.json", smft_summary(r));
}

inline void run_smft_sweep(RunContext& ctx) {
    const auto& c = ctx.config();
    if (c.smft.sweep == "map") {
        const auto mus = linspace(c.smft.mu_min, c.smft.mu_max, c.smft.grid_mu);
        const auto logs = linspace(c.smft.log10_a_min, c.smft.log10_a_max, c.smft.grid_A);
        struct Cell {
            SMFTResult r;
            std::string error;
        };
        SMFTConfig numerics = c.smft.numerics;
        numerics.workers = 1;
        const auto cells = parallel_map<Cell>(mus.size() * logs.size(), c.workers, [&](std::size_t idx) {
            ExperimentConfig local = c;
            local.smft.mu_over_g = mus[idx % mus.size()];
            local.smft.hopping = std::pow(10.0, logs[idx / mus.size()]);
            Cell cell;
            try {
                SMFTSolver s(smft_model(local), numerics);
                cell.r = s.solve();
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            return cell;
        });
        auto out = ctx.csv("smft_map.csv", {"mu_over_g", "log10_A_over_g", "mean_alpha", "ent_of_avg_state", "mean_in_site",
                                            "mean_n", "number_variance", "iterations", "converged", "error"});
        int failures = 0;
        for (std::size_t idx = 0; idx < cells.size(); ++idx) {
            const auto& r = cells[idx].r;
            if (!cells[idx].error.empty()) ++failures;
            out.row(mus[idx % mus.size()], logs[idx / mus.size()], r.mean_alpha, r.ent_of_avg_state, r.mean_in_site, r.mean_n,
                    r.number_variance, r.iterations, r.converged, cells[idx].error);
        }
        if (failures > 0) throw std::runtime_error(std::to_string(failures) + " SMFT map points failed (see smft_map.csv)");
        return;
    }

    auto summary = ctx.csv("summary.csv", {"delta_over_g", "mean_alpha", "ent_of_avg_state", "mean_in_site", "mean_n", "mean_z",
                                           "number_variance", "iterations", "converged", "oscillating"});
    auto heat = ctx.csv("heatmaps.csv", {"observable", "delta_over_g", "bin_center", "probability"});
    SMFTConfig numerics = c.smft.numerics;
    numerics.workers = c.workers;
    for (double delta : c.smft.deltas) {
        ExperimentConfig local = c;
        local.smft.delta = delta;
        SMFTSolver s(smft_model(local), numerics);
        const auto r = s.solve();
        summary.row(delta, r.mean_alpha, r.ent_of_avg_state, r.mean_in_site, r.mean_n, r.mean_z, r.number_variance, r.iterations,
                    r.converged, r.oscillating);
        const auto h = smft_histograms(r, numerics, c.smft.bins);
        for (auto [name, hist] : {std::pair{"alpha", &h.alpha}, {"in_site", &h.in_site}, {"n", &h.n}, {"z", &h.z}})
            for (int b = 0; b < hist->bins(); ++b) heat.row(name, delta, hist->center(b), hist->probabilities()[b]);
    }
}

inline void run_experiment(RunContext& ctx) {
    const auto& kind = ctx.config().experiment;
    if (kind == "clean-two-site") return run_clean_two_site(ctx);
    if (kind == "mf-phase-diagram") return run_mf_phase_diagram(ctx);
    if (kind == "disorder-ensemble") return run_disorder_ensemble(ctx);
    if (kind == "smft-solve") return run_smft_solve(ctx);
    if (kind == "smft-sweep") return run_smft_sweep(ctx);
    throw ConfigError("unknown experiment '" + kind + "'");
}

}  // namespace jch::cli
