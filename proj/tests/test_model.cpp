#include <arraydoctor/metrics.hpp>
#include <arraydoctor/pattern_stats.hpp>

#include <gtest/gtest.h>

#include <set>

namespace ad = arraydoctor;
using ad::cplx;
using ad::CVector;
using ad::Index;

namespace {

void expect_near(cplx got, cplx want, double tol) {
    EXPECT_NEAR(got.real(), want.real(), tol);
    EXPECT_NEAR(got.imag(), want.imag(), tol);
}

}  // namespace

// ---------------------------------------------------------------------------
// array_model

TEST(ArrayModel, SingleElementIsOne) {
    const ad::ArrayGeometry g{1, 1, 0.5, 0.5};
    const CVector a = ad::steering_vector(g, ad::Direction{0.7, 2.1});
    ASSERT_EQ(a.size(), 1);
    expect_near(a[0], 1.0, 1e-15);
}

TEST(ArrayModel, TwoByTwoAlternatesAlongX) {
    const ad::ArrayGeometry g{2, 2, 0.5, 0.5};
    const ad::Direction d{ad::pi / 2, 0.0};
    const CVector ax = ad::axis_response_x(g, d), ay = ad::axis_response_y(g, d);
    expect_near(ax[0], 1.0, 1e-12);
    expect_near(ax[1], -1.0, 1e-12);
    expect_near(ay[0], 1.0, 1e-12);
    expect_near(ay[1], 1.0, 1e-12);
    const CVector a = ad::steering_vector(g, d);
    const cplx want[] = {1.0, 1.0, -1.0, -1.0};
    for (Index i = 0; i < 4; ++i) expect_near(a[i], want[i], 1e-12);
}

TEST(ArrayModel, LinearArrayAtSixtyDegrees) {
    const ad::ArrayGeometry g{4, 1, 0.5, 0.5};
    const CVector a = ad::steering_vector(g, ad::Direction{ad::pi / 2, ad::pi / 3});
    const cplx j{0.0, 1.0};
    const cplx want[] = {1.0, j, -1.0, -j};
    for (Index i = 0; i < 4; ++i) expect_near(a[i], want[i], 1e-12);
}

TEST(ArrayModel, KroneckerIndexAndUnitModulus) {
    const ad::ArrayGeometry g{5, 3, 0.5, 0.7};
    const ad::Direction d{1.1, -0.4};
    const CVector ax = ad::axis_response_x(g, d), ay = ad::axis_response_y(g, d);
    const CVector a = ad::steering_vector(g, d);
    for (Index m = 0; m < g.nx; ++m) {
        for (Index n = 0; n < g.ny; ++n) {
            const Index idx = ad::vec_index(g, m, n);
            expect_near(a[idx], ax[m] * ay[n], 1e-14);
            EXPECT_EQ(ad::grid_position(g, idx), std::make_pair(m, n));
        }
    }
    EXPECT_LT((a.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-14);
    EXPECT_LT((ad::vectorize(ad::response_matrix(g, d)) - a).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ArrayModel, PatternExamples) {
    CVector w = CVector::Constant(4, 0.25);
    CVector a(4);
    a << 1.0, 1.0, -1.0, -1.0;
    expect_near(ad::pattern(w, a), 0.0, 1e-15);

    const ad::ArrayGeometry g{3, 5, 0.5, 0.5};
    const CVector s = ad::steering_vector(g, ad::Direction{0.3, 1.9});
    expect_near(ad::pattern(s.conjugate() / 15.0, s), 1.0, 1e-12);
    expect_near(ad::pattern(s.conjugate() / 15.0, s, CVector::Ones(15)), 1.0, 1e-12);

    EXPECT_THROW(ad::pattern(CVector::Ones(3), a), ad::DimensionError);
    EXPECT_THROW(ad::pattern(w, a, CVector::Ones(3)), ad::DimensionError);
}

TEST(ArrayModel, DirectSumExamples) {
    const ad::ArrayGeometry one{1, 1, 0.5, 0.5};
    ad::CMatrix W(1, 1);
    W(0, 0) = cplx{0.3, -2.0};
    expect_near(ad::pattern_2d_direct(one, W, ad::Direction{0.2, 0.9}), W(0, 0), 1e-15);

    const ad::ArrayGeometry two{2, 1, 0.5, 0.5};
    expect_near(ad::pattern_2d_direct(two, ad::CMatrix::Ones(1, 2), ad::Direction{ad::pi / 2, 0.0}), 0.0, 1e-12);
    EXPECT_THROW(ad::pattern_2d_direct(two, ad::CMatrix::Ones(2, 2), ad::Direction{}), ad::DimensionError);
}

TEST(ArrayModel, DirectSumMatchesVectorizedForm) {
    ad::Rng rng = ad::stream(2024, 0);
    std::uniform_int_distribution<Index> dim(1, 8);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const ad::ArrayGeometry g{dim(rng), dim(rng), 0.25 + ad::uniform01(rng), 0.25 + ad::uniform01(rng)};
        const ad::Direction d{ad::pi * ad::uniform01(rng), ad::two_pi * ad::uniform01(rng)};
        const ad::CMatrix W = ad::complex_gaussian_matrix(rng, g.ny, g.nx, 1.0);
        const cplx direct = ad::pattern_2d_direct(g, W, d);
        const cplx vec = ad::pattern(ad::vectorize(W), ad::steering_vector(g, d));
        worst = std::max(worst, std::abs(direct - vec));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(ArrayModel, RejectsBadGeometry) {
    EXPECT_THROW(ad::steering_vector(ad::ArrayGeometry{0, 2, 0.5, 0.5}, ad::Direction{}), ad::InvalidArgument);
    EXPECT_THROW(ad::steering_vector(ad::ArrayGeometry{2, 2, -0.5, 0.5}, ad::Direction{}), ad::InvalidArgument);
}

// ---------------------------------------------------------------------------
// blockage

TEST(Blockage, ProbabilityExtremes) {
    ad::Rng rng = ad::stream(1, 0);
    const ad::BlockageMap none = ad::sample_blockage(50, 0.0, ad::BlockageModel::random_partial(), rng);
    EXPECT_TRUE(none.blocked.empty());
    EXPECT_EQ(none.b, CVector::Ones(50));

    const ad::BlockageMap all = ad::sample_blockage(50, 1.0, ad::BlockageModel::complete(), rng);
    EXPECT_EQ(all.blocked.size(), 50u);
    EXPECT_EQ(all.b, CVector::Zero(50));

    EXPECT_THROW(ad::sample_blockage(10, 1.5, ad::BlockageModel::complete(), rng), ad::InvalidArgument);
    EXPECT_THROW(ad::BlockageModel::constant_partial({1.0, 1.0}), ad::InvalidArgument);
}

TEST(Blockage, BinomialAndUniformMoments) {
    ad::Rng rng = ad::stream(7, 0);
    const Index n = 10000;
    const ad::BlockageMap m = ad::sample_blockage(n, 0.1, ad::BlockageModel::random_partial(), rng);
    const double frac = static_cast<double>(m.blocked.size()) / n;
    EXPECT_LE(std::abs(frac - 0.1), 3.0 * std::sqrt(0.1 * 0.9 / n));

    cplx mean{0.0, 0.0};
    double second = 0.0;
    for (Index i : m.blocked) {
        mean += m.b[i];
        second += std::norm(m.b[i]);
    }
    const double s = static_cast<double>(m.blocked.size());
    mean /= s;
    second /= s;
    // each component of alpha has variance 1/6
    const double se = std::sqrt(1.0 / 6.0 / s);
    EXPECT_LE(std::abs(mean.real()), 3.0 * se);
    EXPECT_LE(std::abs(mean.imag()), 3.0 * se);
    // |alpha|^2 = kappa^2 with kappa ~ U[0,1]: variance 1/5 - 1/9
    EXPECT_LE(std::abs(second - 1.0 / 3.0), 3.0 * std::sqrt((0.2 - 1.0 / 9.0) / s));
}

TEST(Blockage, SupportEqualsNonzeroInnovation) {
    ad::Rng rng = ad::stream(8, 0);
    const ad::BlockageMap m = ad::sample_blockage(300, 0.2, ad::BlockageModel::random_partial(), rng);
    const CVector c = ad::innovation_coeffs(m);
    ad::IndexSet nz;
    for (Index i = 0; i < c.size(); ++i)
        if (c[i] != cplx{0.0, 0.0}) nz.push_back(i);
    EXPECT_EQ(nz, m.blocked);
}

TEST(Blockage, InnovationExamples) {
    EXPECT_EQ(ad::innovation_coeffs(ad::BlockageMap::healthy(6)), CVector::Zero(6));
    ad::BlockageMap m = ad::BlockageMap::healthy(16);
    m.b[2] = cplx{0.37, 0.22};
    m.b[7] = 0.0;
    const CVector c = ad::innovation_coeffs(m);
    EXPECT_EQ(c[2], (cplx{0.37, 0.22} - 1.0));
    expect_near(c[2], cplx{-0.63, 0.22}, 1e-15);
    EXPECT_EQ(c[7], cplx(-1.0, 0.0));
}

TEST(Blockage, FixedCountDrawsExactlyThatMany) {
    ad::Rng rng = ad::stream(9, 0);
    const ad::BlockageMap m = ad::sample_blockage_fixed_count(64, 11, ad::BlockageModel::complete(), rng);
    EXPECT_EQ(m.blocked.size(), 11u);
    EXPECT_TRUE(std::is_sorted(m.blocked.begin(), m.blocked.end()));
    EXPECT_EQ(std::set<Index>(m.blocked.begin(), m.blocked.end()).size(), 11u);
}

TEST(Blockage, SingleElementGroup) {
    ad::Rng rng = ad::stream(10, 0);
    const ad::BlockageMap m =
        ad::place_group_blockage(ad::ArrayGeometry{6, 5, 0.5, 0.5}, 1, {1, 1}, ad::BlockageModel::complete(), rng);
    EXPECT_EQ(m.blocked.size(), 1u);
}

TEST(Blockage, TwoFourByFourClusters) {
    const ad::ArrayGeometry g{16, 16, 0.5, 0.5};
    for (std::uint64_t s = 0; s < 20; ++s) {
        ad::Rng rng = ad::stream(11, s);
        std::vector<ad::GroupPlacement> where;
        const ad::BlockageMap m = ad::place_group_blockage(g, 2, {4, 4}, ad::BlockageModel::complete(), rng, &where);
        ASSERT_EQ(m.blocked.size(), 32u);
        ASSERT_EQ(where.size(), 2u);
        std::set<Index> expected;
        for (const auto& p : where)
            for (Index m0 = p.col; m0 < p.col + 4; ++m0)
                for (Index n0 = p.row; n0 < p.row + 4; ++n0) expected.insert(ad::vec_index(g, m0, n0));
        EXPECT_EQ(ad::IndexSet(expected.begin(), expected.end()), m.blocked);
        for (Index i : m.blocked) EXPECT_EQ(m.b[i], cplx(0.0, 0.0));
    }
}

TEST(Blockage, TallGroupsAreContiguousRunsInVecOrder) {
    // 8 rows (full height) by 2 columns: each column of a group is one run of
    // 8 consecutive vec indices starting at a multiple of ny.
    const ad::ArrayGeometry g{8, 8, 0.5, 0.5};
    ad::Rng rng = ad::stream(12, 0);
    std::vector<ad::GroupPlacement> where;
    const ad::BlockageMap m = ad::place_group_blockage(g, 2, {8, 2}, ad::BlockageModel::random_partial(), rng, &where);
    ASSERT_EQ(m.blocked.size(), 32u);
    ad::IndexSet expected;
    std::vector<Index> cols;
    for (const auto& p : where) {
        EXPECT_EQ(p.row, 0);
        cols.push_back(p.col);
        cols.push_back(p.col + 1);
    }
    std::sort(cols.begin(), cols.end());
    for (Index c : cols)
        for (Index n = 0; n < 8; ++n) expected.push_back(c * 8 + n);
    EXPECT_EQ(expected, m.blocked);
}

TEST(Blockage, PlacementErrors) {
    ad::Rng rng = ad::stream(13, 0);
    const ad::ArrayGeometry g{4, 4, 0.5, 0.5};
    EXPECT_THROW(ad::place_group_blockage(g, 1, {5, 1}, ad::BlockageModel::complete(), rng), ad::PlacementError);
    EXPECT_THROW(ad::place_group_blockage(g, 3, {3, 2}, ad::BlockageModel::complete(), rng), ad::PlacementError);
    // enough area (18 of 20) but two 3x3 squares never fit side by side in 5 columns
    EXPECT_THROW(ad::place_group_blockage(ad::ArrayGeometry{5, 4, 0.5, 0.5}, 2, {3, 3}, ad::BlockageModel::complete(),
                                          rng, nullptr, 20),
                 ad::PlacementError);
}

// ---------------------------------------------------------------------------
// pattern_stats

TEST(PatternStats, MainlobeExamples) {
    const ad::MeanVar c = ad::mainlobe_stats(0.1, ad::BlockageModel::complete());
    expect_near(c.mean, 0.9, 1e-15);
    EXPECT_EQ(c.variance, 0.0);

    const ad::MeanVar z = ad::mainlobe_stats(0.0, ad::BlockageModel::random_partial());
    expect_near(z.mean, 1.0, 1e-15);
    EXPECT_EQ(z.variance, 0.0);

    const ad::MeanVar r = ad::mainlobe_stats(0.3, ad::BlockageModel::random_partial());
    expect_near(r.mean, 0.7, 1e-15);
    EXPECT_NEAR(r.variance, 0.1, 1e-15);

    const cplx beta{0.5, 0.3};
    const ad::MeanVar k = ad::mainlobe_stats(0.2, ad::BlockageModel::constant_partial(beta));
    expect_near(k.mean, 0.8 + 0.2 * beta, 1e-15);
    EXPECT_EQ(k.variance, 0.0);
}

TEST(PatternStats, SidelobeExamples) {
    const double phi_t = ad::pi / 2, phi = 1.0;
    EXPECT_NEAR(ad::sidelobe_stats(0.1, ad::BlockageModel::complete(), 16, 0.5, phi, phi_t).variance, 5.625e-3, 1e-15);

    // first null: N gamma = pi
    const double gamma = ad::pi / 16.0;
    const double null_phi = std::acos(gamma / (ad::pi * 0.5) + std::cos(phi_t));
    for (const ad::BlockageModel& m : {ad::BlockageModel::complete(), ad::BlockageModel::random_partial(),
                                       ad::BlockageModel::constant_partial({0.2, -0.4})})
        EXPECT_LT(std::abs(ad::sidelobe_stats(0.3, m, 16, 0.5, null_phi, phi_t).mean), 1e-12);

    const ad::MeanVar one = ad::sidelobe_stats(0.4, ad::BlockageModel::constant_partial(1.0), 16, 0.5, phi, phi_t);
    expect_near(one.mean, ad::dirichlet_kernel(16, ad::sidelobe_gamma(0.5, phi, phi_t)), 1e-15);
    EXPECT_NEAR(one.variance, 0.0, 1e-15);
}

TEST(PatternStats, DirichletKernelMatchesGeometricSum) {
    for (double gamma : {0.0, 0.13, -0.7, ad::pi, 2.0 * ad::pi, 1.4}) {
        cplx sum{0.0, 0.0};
        for (int m = 0; m < 12; ++m) sum += std::polar(1.0, 2.0 * gamma * m);
        expect_near(ad::dirichlet_kernel(12, gamma), sum / 12.0, 1e-12);
    }
}

TEST(PatternStats, NoBlockageIsExact) {
    const ad::EmpiricalStats s = ad::empirical_pattern_stats(ad::ArrayGeometry{16, 1, 0.5, 0.5}, 0.0,
                                                             ad::BlockageModel::random_partial(), ad::pi / 2,
                                                             ad::pi / 2, 100, 3);
    expect_near(s.mean, 1.0, 1e-12);
    EXPECT_NEAR(s.variance, 0.0, 1e-24);
}

TEST(PatternStats, MonteCarloSpotChecks) {
    const ad::ArrayGeometry g{16, 1, 0.5, 0.5};
    const ad::EmpiricalStats side =
        ad::empirical_pattern_stats(g, 0.1, ad::BlockageModel::complete(), 1.0, ad::pi / 2, 100000, 21);
    EXPECT_NEAR(side.variance, 5.625e-3, 0.05 * 5.625e-3);

    const ad::EmpiricalStats main = ad::empirical_pattern_stats(g, 0.3, ad::BlockageModel::random_partial(), ad::pi / 2,
                                                                ad::pi / 2, 100000, 22, ad::Spread::IntensityPerElement);
    EXPECT_NEAR(main.variance, 0.1, 0.005);
}

TEST(PatternStats, ClosedFormsWithinThreeStandardErrors) {
    const double phi_t = ad::pi / 2;
    const double offpeak[] = {0.3, 0.8, 1.2, 2.0, 2.7};
    const std::vector<ad::BlockageModel> models{ad::BlockageModel::complete(),
                                                ad::BlockageModel::constant_partial({0.5, 0.3}),
                                                ad::BlockageModel::random_partial()};
    // 405 comparisons: at 3 standard errors about one would fail by chance
    const double z = 4.0;
    std::uint64_t seed = 100;
    for (const auto& model : models) {
        for (double pb : {0.05, 0.1, 0.3}) {
            for (Index nx : {8, 16, 64}) {
                const ad::ArrayGeometry g{nx, 1, 0.5, 0.5};
                for (double phi : offpeak) {
                    const ad::MeanVar cf = ad::sidelobe_stats(pb, model, nx, 0.5, phi, phi_t);
                    const ad::EmpiricalStats mc = ad::empirical_pattern_stats(g, pb, model, phi, phi_t, 20000, ++seed);
                    EXPECT_LE(std::abs(mc.variance - cf.variance), z * mc.stderr_variance)
                        << ad::to_string(model.kind) << " pb=" << pb << " nx=" << nx << " phi=" << phi;
                    EXPECT_LE(std::abs(mc.mean.real() - cf.mean.real()), z * mc.stderr_mean_re + 1e-12);
                    EXPECT_LE(std::abs(mc.mean.imag() - cf.mean.imag()), z * mc.stderr_mean_im + 1e-12);
                }
            }
        }
    }
}

TEST(PatternStats, DeterministicModelsHaveZeroMainlobeVariance) {
    for (double pb : {0.05, 0.5, 1.0}) {
        EXPECT_EQ(ad::mainlobe_stats(pb, ad::BlockageModel::complete()).variance, 0.0);
        EXPECT_EQ(ad::mainlobe_stats(pb, ad::BlockageModel::constant_partial({0.1, 0.2})).variance, 0.0);
    }
}

// ---------------------------------------------------------------------------
// metrics

TEST(Metrics, NmseExamples) {
    ad::Rng rng = ad::stream(30, 0);
    const CVector v = ad::complex_gaussian_vector(rng, 9, 1.0);
    EXPECT_EQ(ad::nmse(v, v), 0.0);
    EXPECT_DOUBLE_EQ(ad::nmse(v, CVector::Zero(9)), 1.0);
    EXPECT_DOUBLE_EQ(ad::nmse_db(v, CVector::Zero(9)), 0.0);
    EXPECT_NEAR(ad::nmse(v, 2.0 * v), 1.0, 1e-14);
    EXPECT_THROW(ad::nmse(CVector::Zero(3), CVector::Ones(3)), ad::UndefinedMetricError);
}

TEST(Metrics, NmseIgnoresCommonPhase) {
    ad::Rng rng = ad::stream(31, 0);
    const CVector v = ad::complex_gaussian_vector(rng, 20, 1.0);
    const CVector vh = v + ad::complex_gaussian_vector(rng, 20, 0.1);
    const cplx rot = std::polar(1.0, 1.234);
    EXPECT_NEAR(ad::nmse(v, vh), ad::nmse(rot * v, rot * vh), 1e-13);
}

TEST(Metrics, SupportComparison) {
    const ad::IndexSet truth{1, 4, 9};
    EXPECT_TRUE(ad::compare_support(truth, truth).exact);
    const auto extra = ad::compare_support(truth, {1, 4, 5, 9});
    EXPECT_EQ(extra.false_positives, 1);
    EXPECT_EQ(extra.false_negatives, 0);
    EXPECT_FALSE(extra.exact);
    EXPECT_TRUE(extra.no_misses());
    const auto none = ad::success(truth, {});
    EXPECT_EQ(none.support.false_negatives, 3);
    EXPECT_FALSE(none.support.no_misses());
}

TEST(Metrics, SummaryAndProportion) {
    const ad::Summary s = ad::summarize({4.0, 1.0, 3.0, 2.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_NEAR(s.stderr_mean, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
    EXPECT_DOUBLE_EQ(ad::summarize({5.0, 1.0, 3.0}).median, 3.0);
    const ad::Proportion p = ad::proportion(30, 40);
    EXPECT_DOUBLE_EQ(p.rate, 0.75);
    EXPECT_NEAR(p.stderr_rate, std::sqrt(0.75 * 0.25 / 40), 1e-15);
}
