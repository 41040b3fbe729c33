#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "monotone/error.hpp"
#include "monotone/measures.hpp"
#include "monotone/stats.hpp"

using namespace monotone;

TEST(Sample, DegenerateGaussianReturnsTheMean) {
    const GaussianSpec g{HVec{1.5, -2.0, 0.25}, {0.0, 0.0, 0.0}};
    for (const auto& x : sample(g, 20, 9)) EXPECT_EQ(x, g.mean);
}

TEST(Sample, RejectsNegativeScalesAndZeroCount) {
    EXPECT_THROW(sample(GaussianSpec{HVec{0.0, 0.0}, {1.0, -0.1}}, 5, 1), InvalidInput);
    EXPECT_THROW(sample(CubeSpec{HVec{0.0}, {-1.0}}, 5, 1), InvalidInput);
    EXPECT_THROW(sample(GaussianSpec::centered({1.0}), 0, 1), InvalidInput);
    EXPECT_THROW(sample(GaussianSpec{HVec{0.0, 0.0}, {1.0}}, 5, 1), InvalidInput);
}

TEST(Sample, SeededDeterminismIsBitwise) {
    const MeasureSpec specs[] = {GaussianSpec::centered(5, Spectrum::geometric(1.0, 0.5)),
                                 CubeSpec::inscribed(4, 1.0), SphericalUniformSpec::isotropic(3)};
    for (const auto& spec : specs) {
        const auto a = sample(spec, 100, 1234);
        const auto b = sample(spec, 100, 1234);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t k = 0; k < a[i].dim(); ++k) {
                EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i][k]), std::bit_cast<std::uint64_t>(b[i][k]));
            }
        }
    }
}

TEST(Sample, SphericalUniformNormIsUniform) {
    const auto draws = sample(SphericalUniformSpec::isotropic(5), 10000, 77);
    std::vector<double> norms;
    double largest = 0.0;
    for (const auto& x : draws) {
        norms.push_back(norm(x));
        largest = std::max(largest, norms.back());
    }
    EXPECT_LT(largest, 1.0);
    // ||U G / ||G|| || = U exactly, so the norms are Uniform(0, 1).
    const double ks = stats::ks_distance(norms, [](double t) { return std::clamp(t, 0.0, 1.0); });
    EXPECT_LE(ks, 0.02);
}

TEST(Sample, CubeMeanMatchesUniformMoment) {
    const CubeSpec cube{HVec{0.0, 0.0}, {1.0, 1.0}};
    const auto draws = sample(cube, 100000, 5);
    double m0 = 0.0, m1 = 0.0;
    for (const auto& x : draws) {
        m0 += x[0];
        m1 += x[1];
        ASSERT_GT(x[0], 0.0);
        ASSERT_LT(x[0], 1.0);
    }
    EXPECT_NEAR(m0 / draws.size(), 0.5, 0.01);
    EXPECT_NEAR(m1 / draws.size(), 0.5, 0.01);
}

TEST(Sample, GaussianMarginalsPassKs) {
    const GaussianSpec g{HVec{0.5, -1.0, 0.0, 2.0}, {1.0, 0.5, 0.25, 0.125}};
    const auto draws = sample(g, 10000, 2024);
    const std::vector<HVec> directions{HVec{1, 0, 0, 0}, HVec{0.3, -0.4, 0.5, 0.7}, HVec{0, 0, 0, 1}};
    for (const auto& h : directions) {
        std::vector<double> proj;
        for (const auto& x : draws) proj.push_back(inner(x, h));
        double var = 0.0;
        for (std::size_t k = 0; k < 4; ++k) var += g.stds[k] * g.stds[k] * h[k] * h[k];
        const double mu = inner(g.mean, h);
        const double sd = std::sqrt(var);
        const double ks = stats::ks_distance(proj, [&](double t) { return stats::normal_cdf((t - mu) / sd); });
        EXPECT_GT(stats::ks_pvalue(ks, proj.size()), 0.01);
    }
}

TEST(Spectrum, GeneratorsFollowTheirFormulas) {
    const auto geo = Spectrum::geometric(2.0, 0.5).generate(4);
    EXPECT_DOUBLE_EQ(geo[0], 1.0);
    EXPECT_DOUBLE_EQ(geo[3], 0.125);
    const auto pw = Spectrum::power(1.0, 2.0).generate(3);
    EXPECT_DOUBLE_EQ(pw[2], 1.0 / 9.0);
    EXPECT_THROW(Spectrum::explicit_values({1.0, 2.0}).generate(3), InvalidInput);
    EXPECT_EQ(GaussianSpec::centered(3, Spectrum::geometric(1.0, 0.5)).generator, "s_i = 1 * 0.5^i");
}

TEST(Empirical, SingleAtom) {
    const auto m = empirical({HVec{1.0, 2.0}});
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m.weight(0), 1.0);
}

TEST(Empirical, DuplicatesMerge) {
    const auto m = empirical({HVec{1.0, 2.0}, HVec{1.0, 2.0}});
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m.weight(0), 1.0);
    EXPECT_EQ(m.input_to_atom(), (std::vector<std::ptrdiff_t>{0, 0}));
}

TEST(Empirical, NearDuplicatesWithinToleranceMergeInFirstOccurrenceOrder) {
    const auto m = empirical({HVec{3.0}, HVec{1.0}, HVec{3.0 + 5e-13}, HVec{2.0}});
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m.point(0), HVec{3.0});
    EXPECT_EQ(m.point(1), HVec{1.0});
    EXPECT_EQ(m.point(2), HVec{2.0});
    EXPECT_DOUBLE_EQ(m.weight(0), 0.5);
}

TEST(Empirical, GaussianDrawsGetUniformWeights) {
    const auto m = empirical(sample(GaussianSpec::centered({1.0, 2.0, 3.0}), 500, 8));
    ASSERT_EQ(m.size(), 500u);
    double total = 0.0;
    for (double w : m.weights()) {
        EXPECT_DOUBLE_EQ(w, 1.0 / 500.0);
        total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Empirical, EmptyIsRejected) { EXPECT_THROW(empirical({}), InvalidInput); }

TEST(DiscreteMeasure, DropsZeroMassAndRenormalizes) {
    const DiscreteMeasure m({HVec{0.0}, HVec{1.0}, HVec{2.0}}, {2.0, 0.0, 6.0});
    ASSERT_EQ(m.size(), 2u);
    EXPECT_DOUBLE_EQ(m.weight(0), 0.25);
    EXPECT_DOUBLE_EQ(m.weight(1), 0.75);
    EXPECT_EQ(m.input_to_atom()[1], -1);
    EXPECT_THROW(DiscreteMeasure({HVec{0.0}}, {-1.0}), InvalidInput);
    EXPECT_THROW(DiscreteMeasure({HVec{0.0}, HVec{1.0, 2.0}}, {1.0, 1.0}), InvalidInput);
}

TEST(DiscreteMeasure, PushforwardStaysValid) {
    const auto m = empirical(sample(CubeSpec::inscribed(2, 1.0), 50, 3));
    // Collapsing map: every atom goes to one of two points, so atoms merge.
    const auto image = m.pushforward([](const HVec& x) { return HVec{x[0] > 0 ? 1.0 : -1.0, 0.0}; });
    EXPECT_LE(image.size(), 2u);
    EXPECT_NEAR(std::accumulate(image.weights().begin(), image.weights().end(), 0.0), 1.0, 1e-12);
}

TEST(Discretize, SingleAtomReference) {
    const auto ref = discretize_reference(SphericalUniformSpec::isotropic(3), 1, 5);
    ASSERT_EQ(ref.measure.size(), 1u);
    EXPECT_EQ(ref.measure.weight(0), 1.0);
    EXPECT_EQ(ref.measure.point(0), sample(SphericalUniformSpec::isotropic(3), 1, 5)[0]);
    EXPECT_LT(norm(ref.measure.point(0)), 1.0);
}

TEST(Discretize, SphericalAtomsStayInUnitBall) {
    const auto ref = discretize_reference(SphericalUniformSpec::isotropic(4), 64, 6);
    EXPECT_EQ(ref.measure.size(), 64u);
    EXPECT_EQ(ref.bound, 1.0);
    EXPECT_LT(ref.measure.max_norm(), 1.0);
}

TEST(Discretize, OneDimensionalQuantileGrid) {
    const std::size_t n = 9;
    const auto ref = discretize_reference(CubeSpec{HVec{0.0}, {1.0}}, n, 0, DiscretizationStrategy::QuantileGrid);
    ASSERT_EQ(ref.measure.size(), n);
    for (std::size_t i = 1; i <= n; ++i) EXPECT_DOUBLE_EQ(ref.measure.point(i - 1)[0], i / double(n + 1));
    EXPECT_EQ(ref.bound, 1.0);
}

TEST(Discretize, SphericalQuantileGridInOneDimension) {
    const auto ref =
        discretize_reference(SphericalUniformSpec::isotropic(1), 3, 0, DiscretizationStrategy::QuantileGrid);
    EXPECT_DOUBLE_EQ(ref.measure.point(0)[0], -0.5);
    EXPECT_DOUBLE_EQ(ref.measure.point(1)[0], 0.0);
    EXPECT_DOUBLE_EQ(ref.measure.point(2)[0], 0.5);
}

TEST(Discretize, RejectsGridAboveDimensionOneAndUnboundedReference) {
    EXPECT_THROW(discretize_reference(CubeSpec::inscribed(2, 1.0), 4, 0, DiscretizationStrategy::QuantileGrid),
                 InvalidInput);
    EXPECT_THROW(discretize_reference(GaussianSpec::centered({1.0}), 4, 0), InvalidInput);
    const auto g = discretize(GaussianSpec::centered({1.0}), 4, 0);
    EXPECT_FALSE(g.bounded_family);
}

TEST(CubeSpec, InscribedCubeTouchesTheSphere) {
    const auto cube = CubeSpec::inscribed(6, 1.0);
    EXPECT_NEAR(cube.support_bound(), 1.0, 1e-15);
    for (const auto& x : sample(cube, 200, 1)) EXPECT_LT(norm(x), 1.0);
}

TEST(CubeSpec, ScaledToRadiusKeepsTheShape) {
    const auto cube = CubeSpec::scaled_to_radius({4.0, 2.0, 1.0}, 1.0);
    EXPECT_NEAR(cube.support_bound(), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(cube.scales[0] / cube.scales[1], 2.0);
    EXPECT_DOUBLE_EQ(cube.scales[1] / cube.scales[2], 2.0);
    EXPECT_THROW(CubeSpec::scaled_to_radius({0.0, 0.0}, 1.0), InvalidInput);
}
