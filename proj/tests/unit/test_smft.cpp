#include "jch/meanfield.hpp"
#include "jch/smft.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace jch;

namespace {

AlphaDistribution gaussian_alpha(double m, double s, double max, int n) {
    RVector d(n);
    const double h = max / (n - 1);
    for (int k = 0; k < n; ++k) d(k) = std::exp(-0.5 * std::pow((k * h - m) / s, 2));
    AlphaDistribution p(h, d);
    return AlphaDistribution(h, d / p.integral());
}

RVector bimodal_masses(int n) {
    RVector m(n);
    for (int k = 0; k < n; ++k) m(k) = std::exp(-0.5 * std::pow((k - 0.2 * n) / 3.0, 2)) + 0.6 * std::exp(-0.5 * std::pow((k - 0.6 * n) / 5.0, 2));
    m(n - 1) = 0.0;
    return m / m.sum();
}

}  // namespace

TEST(GridDensity, NormalizationAndMasses) {
    const auto u = AlphaDistribution::uniform(3.0, 31);
    EXPECT_TRUE(u.is_normalized(1e-12));
    EXPECT_NEAR(u.mean(), 1.5, 1e-12);
    const auto p = AlphaDistribution::point_mass(3.0, 31, 1.234);
    EXPECT_TRUE(p.is_normalized(1e-12));
    EXPECT_NEAR(p.mean(), 1.234, 1e-12);
    const RVector m = bimodal_masses(31);
    EXPECT_LE((AlphaDistribution::from_masses(0.1, m).masses() - m).norm(), 1e-15);
    EXPECT_THROW(AlphaDistribution(0.1, RVector::Constant(4, -1.0)), std::invalid_argument);

    RVector bins = RVector::Zero(4);
    EXPECT_EQ(AlphaDistribution::deposit(bins, 1.0, 1.25, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(bins(1), 0.75);
    EXPECT_DOUBLE_EQ(bins(2), 0.25);
    EXPECT_EQ(AlphaDistribution::deposit(bins, 1.0, 7.0, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(bins(3), 0.5);
    EXPECT_THROW(tv_distance(u, AlphaDistribution::uniform(3.0, 32)), std::invalid_argument);
}

TEST(Convolution, PointMassMovesToSum) {
    const auto p = AlphaDistribution::point_mass(3.0, 61, 0.5);  // node 10
    for (int z : {1, 2, 4}) {
        const auto q = convolve_to_eta(p, z, 0.3);
        EXPECT_NEAR(q.step(), 0.3 * 0.05, 1e-15);
        EXPECT_NEAR(q.masses()(10 * z), 1.0, 1e-12);
        EXPECT_NEAR(q.mean(), z * 0.3 * 0.5, 1e-12);
    }
    const auto q0 = convolve_to_eta(p, 4, 0.0);
    EXPECT_EQ(q0.masses()(0), 1.0);
    EXPECT_NEAR(convolve_to_eta(p, 2, -0.3).mean(), 0.3, 1e-12);
}

TEST(Convolution, GaussianClosure) {
    const double m = 1.0, s = 0.2, A = 0.5;
    const auto p = gaussian_alpha(m, s, 3.0, 512);
    for (int z : {2, 4}) {
        const auto q = convolve_to_eta(p, z, A);
        const double qm = z * A * m, qs = std::sqrt(double(z)) * A * s;
        RVector ref(q.size());
        for (int k = 0; k < q.size(); ++k) ref(k) = std::exp(-0.5 * std::pow((q.x(k) - qm) / qs, 2));
        const EtaDistribution r(q.step(), ref / EtaDistribution(q.step(), ref).integral());
        EXPECT_LT(tv_distance(q, r), 1e-3) << z;
    }
}

TEST(Convolution, SpectralMatchesDirect) {
    const RVector m = bimodal_masses(64);
    for (int z : {2, 3, 4}) {
        RVector a = detail::spectral_power(m, z);
        const RVector b = direct_convolution_power(m, z);
        ASSERT_EQ(a.size(), b.size());
        EXPECT_LT(0.5 * (a - b).cwiseAbs().sum(), 1e-8) << z;
        detail::clip_and_normalize(a, "test");
        EXPECT_TRUE((a.array() >= 0.0).all());
        EXPECT_NEAR(a.sum(), 1.0, 1e-14);
    }
}

TEST(Convolution, AliasingGuardAndValidation) {
    EXPECT_THROW(convolve_to_eta(AlphaDistribution::point_mass(3.0, 31, 3.0), 4, 0.1), AliasingError);
    EXPECT_THROW(convolve_to_eta(AlphaDistribution::uniform(3.0, 31), 0, 0.1), std::invalid_argument);
    EXPECT_THROW(convolve_to_eta(AlphaDistribution(0.1, RVector::Constant(31, 1.0)), 2, 0.1), std::invalid_argument);
    RVector ring(3);
    ring << 0.5, -0.1, 0.6;
    EXPECT_THROW(detail::clip_and_normalize(ring, "test"), std::runtime_error);
}

TEST(HoppingTransform, PointMassHoppingReduces) {
    const auto p = gaussian_alpha(0.8, 0.3, 3.0, 128);
    const auto a = hopping_disorder_transform(p, {0.4, 0.0}, 4);
    const auto b = convolve_to_eta(p, 4, 0.4);
    EXPECT_EQ(a.step(), b.step());
    EXPECT_EQ(a.density(), b.density());
    // small spread: the mean follows z <A> <alpha>
    const auto c = hopping_disorder_transform(p, {0.4, 1e-4}, 4);
    EXPECT_NEAR(c.mean(), 4 * 0.4 * p.mean(), 1e-3);
}

TEST(HoppingTransform, UnitAlphaReproducesHoppingMeasure) {
    const auto p = AlphaDistribution::point_mass(3.0, 301, 1.0);
    const double mean = 0.5, s = 0.1;
    const auto q = hopping_disorder_transform(p, {mean, s}, 1);
    RVector ref(q.size());
    for (int k = 0; k < q.size(); ++k) ref(k) = std::exp(-0.5 * std::pow((q.x(k) - mean) / s, 2));
    const EtaDistribution r(q.step(), ref / EtaDistribution(q.step(), ref).integral());
    EXPECT_LT(tv_distance(q, r), 2e-3);
    EXPECT_NEAR(q.mean(), mean, 1e-4);
}

TEST(HoppingTransform, NegativeHoppingFoldsToModulus) {
    const auto p = AlphaDistribution::point_mass(3.0, 61, 1.0);
    const auto q = hopping_disorder_transform(p, {0.0, 0.2}, 1);
    // |N(0, s)| has mean s sqrt(2/pi)
    EXPECT_NEAR(q.mean(), 0.2 * std::sqrt(2.0 / std::numbers::pi), 2e-3);
    EXPECT_THROW(hopping_disorder_transform(p, {0.0, -0.2}, 1), std::invalid_argument);
}

TEST(Quadrature, GaussHermiteMoments) {
    const auto q = gauss_hermite(64);
    double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double x = q.nodes[i], w = q.weights[i];
        m0 += w;
        m2 += w * x * x;
        m4 += w * std::pow(x, 4);
        m6 += w * std::pow(x, 6);
    }
    EXPECT_NEAR(m0, 1.0, 1e-12);
    EXPECT_NEAR(m2, 1.0, 1e-12);
    EXPECT_NEAR(m4, 3.0, 1e-11);
    EXPECT_NEAR(m6, 15.0, 1e-10);
    EXPECT_THROW(gauss_hermite(0), std::invalid_argument);
}

TEST(SiteHamiltonian, ComplexFieldPhaseInvariance) {
    const SiteHamiltonian site(20);
    const SolverOptions opt;
    for (double eta : {0.01, 0.2, 0.9}) {
        const double ref = site.solve(10.0, 10.0, 1.0, 9.3, eta, false, opt).alpha;
        for (int k = 1; k < 8; ++k) {
            const cplx e = std::polar(eta, 2 * std::numbers::pi * k / 8.0);
            EXPECT_NEAR(site.solve(10.0, 10.0, 1.0, 9.3, e, false, opt).alpha, ref, 1e-10);
        }
    }
}

TEST(SiteHamiltonian, DegenerateZeroFieldUsesPositiveLimit) {
    const SiteHamiltonian site(20);
    const SolverOptions opt;
    // (mu - omega)/g = -1 at resonance: vacuum and |1-> cross
    const auto s0 = site.solve(10.0, 10.0, 1.0, 9.0, 0.0, true, opt);
    const auto s1 = site.solve(10.0, 10.0, 1.0, 9.0, SiteHamiltonian::kEtaLimit, true, opt);
    EXPECT_NEAR(s0.alpha, s1.alpha, 1e-12);
    EXPECT_NEAR(s0.n, s1.n, 1e-12);
    EXPECT_GT(s0.alpha, 0.1);
}

TEST(SiteHamiltonian, MatchesMeanFieldCluster) {
    // single-site MF with field z A alpha is the same Hamiltonian up to a constant
    ClusterSetup s;
    s.cluster = LatticeSpec::single_site(4);
    s.n_max = 20;
    auto p = s.problem(-0.9, 0.05);
    p.alpha = 0.48;
    const auto mf = ground_state_full(mf_hamiltonian(p));
    const JCHTerms terms(p.cluster);
    const SiteHamiltonian site(20);
    const auto ss = site.solve(10.0, 10.0, 1.0, p.mu, 4 * 0.05 * 0.48, true, {});
    EXPECT_NEAR(std::abs(expectation(terms.a(0), mf.state)), ss.alpha, 1e-10);
    EXPECT_NEAR(expectation(terms.total_number(), mf.state).real(), ss.n, 1e-10);
}

TEST(SMFTStep, StationaryAtCleanFixedPoint) {
    ClusterSetup s;
    s.cluster = LatticeSpec::single_site(4);
    s.n_max = 20;
    const double alpha = solve_self_consistent(s.problem(-0.9, 0.05)).alpha;
    ASSERT_GT(alpha, 0.1);
    SMFTModel m;
    m.hopping = 0.05;
    m.mu_over_g = -0.9;
    SMFTConfig c;
    const auto p = AlphaDistribution::point_mass(c.alpha_max, c.n_grid, alpha);
    const auto next = smft_step(p, m, c);
    EXPECT_NEAR(next.mean(), alpha, 1e-3);
    EXPECT_LT(tv_distance(p, next), 0.05);
}

TEST(SMFTStep, DeepMottCollapses) {
    SMFTModel m;
    m.hopping = 1e-4;
    m.mu_over_g = -0.5;
    SMFTConfig c;
    c.n_grid = 256;
    SMFTSolver solver(m, c);
    auto p = solver.step(solver.initial());
    EXPECT_LT(p.mean(), 0.02);
    EXPECT_GT(p.masses().head(3).sum(), 0.99);
    for (int k = 0; k < 2; ++k) p = solver.step(p);
    EXPECT_GT(p.masses()(0), 0.999);
}

TEST(SMFTSolve, ZeroDisorderMatchesMeanField) {
    ClusterSetup s;
    s.cluster = LatticeSpec::single_site(4);
    s.n_max = 20;
    const auto mf = solve_self_consistent(s.problem(-0.9, 0.1));
    SMFTModel m;
    m.hopping = 0.1;
    m.mu_over_g = -0.9;
    const auto r = smft_solve(m, SMFTConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 200);
    EXPECT_LT(std::abs(r.mean_alpha - mf.alpha), 1e-3);
    EXPECT_LT(std::abs(r.mean_n - mf.mean_filling()), 1e-3);
    EXPECT_TRUE(r.p_alpha.is_normalized());
    EXPECT_TRUE(r.avg_state.is_valid(1e-10));
    EXPECT_EQ(r.tv_history.size(), static_cast<std::size_t>(r.iterations));
}

TEST(SMFTSolve, DisorderedEnsembleIsConsistent) {
    SMFTModel m;
    m.hopping = std::pow(10.0, -1.9);
    m.mu_over_g = -1.0;
    m.target = DisorderTarget::coupling;
    m.delta = 0.2;
    SMFTConfig c;
    c.n_grid = 256;
    c.quad_nodes = 24;
    SMFTSolver solver(m, c);
    EXPECT_EQ(solver.disorder_nodes(), 24u);
    const auto r = solver.solve();
    double w = 0.0;
    for (const auto& n : r.nodes) w += n.weight;
    EXPECT_NEAR(w, 1.0, 1e-12);
    EXPECT_NEAR(r.histogram(&NodeObservables::n, 0.0, 3.0, 30).total(), 1.0, 1e-12);
    EXPECT_TRUE(r.avg_state.is_valid(1e-10));
    EXPECT_GE(r.integer_concentration(0.5), 1.0 - 1e-12);
    EXPECT_LE(r.mass_above(1.5), 1.0);
}

TEST(SMFTConfig, Validation) {
    SMFTConfig c;
    c.z = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.tol_tv = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    SMFTModel m;
    m.delta = -1.0;
    EXPECT_THROW(SMFTSolver(m, SMFTConfig{}), std::invalid_argument);
}
