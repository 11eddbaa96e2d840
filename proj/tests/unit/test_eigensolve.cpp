#include "jch/eigensolve.hpp"
#include "jch/model.hpp"
#include "jch/quantum_info.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace jch;

namespace {

HilbertSpace two_sites(int n_max) { return {SiteBasis(n_max), LatticeSpec::chain(2)}; }

// (-1)^{photons on site 1}
QuantumState gauge_site1(const QuantumState& psi, const HilbertSpace& sp) {
    CVector v = psi.amplitudes();
    for (std::size_t i = 0; i < sp.dim(); ++i)
        if (sp.basis.photons_of(sp.local_index(i, 1)) % 2) v(i) = -v(i);
    return QuantumState(v);
}

}  // namespace

TEST(Dense, DiagonalExample) {
    SparseMat m(3, 3);
    m.insert(0, 0) = 3.0;
    m.insert(1, 1) = 1.0;
    m.insert(2, 2) = 2.0;
    const auto r = ground_state_full(SparseOperator(m));
    EXPECT_NEAR(r.energy, 1.0, 1e-14);
    EXPECT_NEAR(std::abs(r.state[1]), 1.0, 1e-14);
    EXPECT_NEAR(r.gap, 1.0, 1e-14);
    EXPECT_FALSE(r.degenerate);
}

TEST(Dense, VacuumIsLowestWithoutMu) {
    const HilbertSpace sp{SiteBasis(3), LatticeSpec::single_site(0)};
    const auto h = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.0), sp);
    const auto r = ground_state_full(h, sp);
    EXPECT_NEAR(r.energy, 0.0, 1e-13);
    EXPECT_NEAR(std::abs(r.state[sp.basis.index(0, 0)]), 1.0, 1e-13);
}

TEST(Sector, SingleSiteResonantOracle) {
    const HilbertSpace sp{SiteBasis(3), LatticeSpec::single_site(0)};
    const auto h = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.0), sp);
    const auto r = ground_state_in_sector(h, 1, sp);
    EXPECT_NEAR(r.energy, 9.0, 1e-12);
    EXPECT_LE(r.residual, 1e-9);
}

TEST(Sector, FullAndSectorAgreeInFirstLobe) {
    const auto sp = two_sites(4);
    const double mu = 10.0 - 0.5;  // (mu - omega)/g = -0.5
    const auto h = apply_chemical_potential(build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.01), sp), mu, sp);
    const auto full = ground_state_full(h, sp);
    EXPECT_NEAR(expectation(total_number_operator(sp), full.state).real(), 2.0, 1e-8);
    const auto sec = ground_state_in_sector(h, 2, sp);
    EXPECT_NEAR(sec.energy, full.energy, 1e-10);
    EXPECT_NEAR(fidelity(sec.state, full.state), 1.0, 1e-10);
}

TEST(Sector, MottStateFidelity) {
    const auto sp = two_sites(4);
    const auto h = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, -5.0, 1.0, 0.01), sp);
    const auto r = ground_state_in_sector(h, 2, sp);
    const auto lower = polariton_site_state(1, Branch::minus, -5.0, 1.0, sp.basis);
    EXPECT_GT(fidelity(r.state, tensor(lower, lower)), 0.99);
}

TEST(Sector, SuperfluidStateFidelity) {
    const auto sp = two_sites(4);
    const auto h = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 10.0, 1.0, 10.0), sp);
    const auto r = ground_state_in_sector(h, 2, sp);
    const auto& b = sp.basis;
    const auto L = static_cast<std::size_t>(b.local_dim());
    CVector sf = CVector::Zero(sp.dim());
    sf(b.index(0, 1) * L + b.index(0, 1)) = std::sqrt(0.5);
    sf(b.index(0, 2) * L + b.index(0, 0)) = -0.5;
    sf(b.index(0, 0) * L + b.index(0, 2)) = -0.5;
    const QuantumState target(sf);
    EXPECT_GT(fidelity(gauge_site1(r.state, sp), target), 0.99);
}

TEST(Sector, VariationalBound) {
    const auto sp = two_sites(3);
    const auto h = apply_chemical_potential(build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 1.0, 1.0, 0.4), sp), 9.0, sp);
    const double e_full = ground_state_full(h, sp).energy;
    for (int n = 0; n <= 8; ++n) EXPECT_GE(ground_state_in_sector(h, n, sp).energy, e_full - 1e-12);
}

TEST(Sector, RejectsNonConservingAndEmpty) {
    const HilbertSpace sp{SiteBasis(3), LatticeSpec::single_site(4)};
    const auto ops = site_operators(sp.basis);
    const auto h = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.0), sp) - 0.3 * (ops.a + ops.a_dag);
    EXPECT_THROW(ground_state_in_sector(h, 1, sp), ConservationError);
    const auto h0 = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.0), sp);
    EXPECT_THROW(ground_state_in_sector(h0, 5, sp), std::invalid_argument);
}

TEST(Lanczos, AgreesWithDense) {
    const HilbertSpace sp{SiteBasis(4), LatticeSpec::chain(3)};  // dim 1000
    auto p = JCHParams::uniform(sp.lattice, 10.0, 0.5, 1.0, 0.7);
    p.nu[2] = 9.0;
    const auto h = apply_chemical_potential(build_hamiltonian(p, sp), 9.4, sp);
    SolverOptions dense;
    dense.dense_threshold = 5000;
    SolverOptions krylov;
    krylov.dense_threshold = 0;
    const auto a = ground_state_full(h, sp, dense);
    const auto b = ground_state_full(h, sp, krylov);
    EXPECT_NEAR(a.energy, b.energy, 1e-8);
    EXPECT_LE(b.residual, 1e-9);
}

TEST(Lanczos, DeterministicAndReportsFailure) {
    const auto sp = two_sites(6);
    const auto h = apply_chemical_potential(build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.3), sp), 9.6, sp);
    SolverOptions opt;
    opt.dense_threshold = 0;
    const auto a = ground_state_full(h, opt), b = ground_state_full(h, opt);
    EXPECT_EQ((a.state.amplitudes() - b.state.amplitudes()).norm(), 0.0);

    opt.krylov_dim = 2;
    opt.max_restarts = 0;
    opt.tol = 1e-14;
    try {
        ground_state_full(h, opt);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.best_residual(), 1e-14);
    }
}

TEST(Degeneracy, FlagsDegenerateSector) {
    // two decoupled identical sites: one excitation can sit on either
    const auto sp = two_sites(2);
    const auto h = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.0), sp);
    EXPECT_TRUE(ground_state_in_sector(h, 1, sp).degenerate);
    const auto h2 = build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.1), sp);
    EXPECT_FALSE(ground_state_in_sector(h2, 1, sp).degenerate);
}

TEST(Truncation, FlagsTopPhotonWeight) {
    const HilbertSpace sp{SiteBasis(2), LatticeSpec::single_site(0)};
    const auto h = apply_chemical_potential(build_hamiltonian(JCHParams::uniform(sp.lattice, 10.0, 0.0, 1.0, 0.0), sp), 12.0, sp);
    const auto r = ground_state_full(h, sp);
    EXPECT_GT(r.truncation_weight, 1e-4);
    EXPECT_TRUE(r.truncated);
    EXPECT_LE(r.truncation_weight, 1.0);
}

TEST(Tridiagonal, MatchesDenseSolver) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int n : {1, 2, 3, 7, 21, 42}) {
        RMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = nd(rng);
        const auto a = lowest_eigenpair_dense(m);
        const auto b = lowest_eigenpair_tridiagonal(m);
        EXPECT_NEAR(a.energy, b.energy, 1e-12);
        EXPECT_NEAR(std::abs(a.vector.dot(b.vector)), 1.0, 1e-10);
        EXPECT_LE((m.cast<cplx>() * b.vector - b.energy * b.vector).norm(), 1e-10);
        if (n > 1) { EXPECT_NEAR(a.gap, b.gap, 1e-10); }
    }
}
