#include "jch/hilbert.hpp"
#include "jch/model.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace jch;

TEST(SiteBasis, DimensionsAndOrdering) {
    const SiteBasis b(3);
    EXPECT_EQ(b.local_dim(), 8);
    EXPECT_EQ(b.index(0, 2), 2);
    EXPECT_EQ(b.index(1, 0), 4);
    EXPECT_EQ(b.atom_of(5), 1);
    EXPECT_EQ(b.photons_of(5), 1);
    EXPECT_EQ(b.excitations_of(7), 4);
    EXPECT_THROW(SiteBasis(0), std::invalid_argument);
}

TEST(LatticeSpec, RejectsBadEdges) {
    EXPECT_THROW(LatticeSpec(2, {{0, 2}}, 2), std::invalid_argument);
    EXPECT_THROW(LatticeSpec(2, {{1, 1}}, 2), std::invalid_argument);
    EXPECT_THROW(LatticeSpec(3, {{0, 1}, {1, 0}}, 2), std::invalid_argument);
    EXPECT_EQ(LatticeSpec::chain(5).n_edges(), 4);
    EXPECT_EQ(LatticeSpec::chain(5, true).n_edges(), 5);
    EXPECT_EQ(LatticeSpec::plaquette().n_edges(), 4);
}

TEST(SiteOperators, LadderEntries) {
    const auto ops1 = site_operators(SiteBasis(1));
    const SiteBasis b1(1);
    for (int atom = 0; atom < 2; ++atom)
        EXPECT_DOUBLE_EQ(ops1.a.element(b1.index(atom, 0), b1.index(atom, 1)).real(), 1.0);
    EXPECT_EQ(ops1.a.nonzeros(), 2);

    const SiteBasis b2(2);
    const auto ops2 = site_operators(b2);
    EXPECT_DOUBLE_EQ(ops2.a.element(b2.index(0, 1), b2.index(0, 2)).real(), std::sqrt(2.0));
    // a^dag on the top state is truncated away
    EXPECT_EQ(ops2.a_dag.apply(QuantumState::basis_state(6, b2.index(0, 2)).amplitudes()).norm(), 0.0);

    const auto e1 = QuantumState::basis_state(6, b2.index(1, 1));
    EXPECT_NEAR(expectation(ops2.n_op, e1).real(), 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(ops2.sigma.element(b2.index(0, 0), b2.index(1, 0)).real(), 1.0);
}

TEST(Embed, IdentityAndLocalAction) {
    const HilbertSpace sp{SiteBasis(2), LatticeSpec::chain(2)};
    const auto id = SparseOperator::identity(sp.local_dim());
    for (int s = 0; s < 2; ++s)
        EXPECT_EQ((embed(id, s, sp).to_dense() - CMatrix::Identity(36, 36)).norm(), 0.0);

    const auto ops = site_operators(sp.basis);
    const auto st = tensor(QuantumState::basis_state(6, sp.basis.index(0, 1)), QuantumState::basis_state(6, sp.basis.index(0, 0)));
    EXPECT_NEAR(expectation(embed(ops.n_op, 0, sp), st).real(), 1.0, 1e-15);
    EXPECT_NEAR(expectation(embed(ops.n_op, 1, sp), st).real(), 0.0, 1e-15);
    EXPECT_THROW(embed(SparseOperator::identity(5), 0, sp), std::invalid_argument);
    EXPECT_THROW(embed(id, 2, sp), std::out_of_range);
}

TEST(Embed, ProductStateFactorizes) {
    const HilbertSpace sp{SiteBasis(2), LatticeSpec::chain(2)};
    const auto ops = site_operators(sp.basis);
    CVector u(6), v(6);
    for (int k = 0; k < 6; ++k) {
        u(k) = cplx(1.0 + k, 0.3 * k);
        v(k) = cplx(0.5 - 0.1 * k, 1.0);
    }
    const QuantumState a(u), b(v);
    const auto A = ops.a + ops.sigma_dag, B = ops.n_op;
    const cplx lhs = expectation(embed(A, 0, sp) * embed(B, 1, sp), tensor(a, b));
    const cplx rhs = expectation(A, a) * expectation(B, b);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
}

TEST(Embed, DifferentSitesCommuteExactly) {
    const HilbertSpace sp{SiteBasis(2), LatticeSpec::chain(3)};
    const auto ops = site_operators(sp.basis);
    const auto c = commutator(embed(ops.a, 0, sp), embed(ops.a_dag + ops.sigma, 2, sp));
    EXPECT_EQ(c.nonzeros(), 0);
}

TEST(Sector, CountsFromSpec) {
    EXPECT_EQ(sector_basis(0, {SiteBasis(1), LatticeSpec::chain(2)}).size(), 1u);
    EXPECT_EQ(sector_basis(2, {SiteBasis(1), LatticeSpec::chain(2)}).size(), 6u);
    const HilbertSpace one{SiteBasis(2), LatticeSpec::chain(1)};
    const auto s = sector_basis(2, one);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(std::set<int>(s.begin(), s.end()), (std::set<int>{one.basis.index(0, 2), one.basis.index(1, 1)}));
}

TEST(Sector, DerivedEnumerationOracle) {
    // brute-force count over all 16 states of two n_max=1 sites
    const SiteBasis b(1);
    int count = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) count += b.excitations_of(i) + b.excitations_of(j) == 2;
    EXPECT_EQ(count, 6);
}

TEST(Sector, PartitionsTheBasis) {
    const HilbertSpace sp{SiteBasis(2), LatticeSpec::chain(3)};
    std::set<int> seen;
    std::size_t total = 0;
    for (int n = 0; n <= 3 * 3; ++n) {
        const auto s = sector_basis(n, sp);
        total += s.size();
        for (int i : s) {
            EXPECT_EQ(sp.excitations(i), n);
            EXPECT_TRUE(seen.insert(i).second);
        }
    }
    EXPECT_EQ(total, sp.dim());
    EXPECT_THROW(sector_basis(10, sp), std::invalid_argument);
}

TEST(Conservation, TotalNumberCommutesWithH) {
    const HilbertSpace sp{SiteBasis(3), LatticeSpec::chain(3)};
    JCHParams p = JCHParams::uniform(sp.lattice, 10.0, 0.7, 1.3, 0.4);
    p.hopping[1] = -0.9;
    p.g[2] = 0.2;
    const auto h = build_hamiltonian(p, sp);
    const auto c = commutator(h, total_number_operator(sp));
    EXPECT_LE(c.max_abs_entry(), 1e-12);
}

TEST(QuantumState, NormalizesAndRejectsZero) {
    CVector v(3);
    v << 3.0, 4.0, 0.0;
    EXPECT_NEAR(QuantumState(v).amplitudes().norm(), 1.0, 1e-15);
    EXPECT_THROW(QuantumState(CVector::Zero(3)), std::invalid_argument);
}
