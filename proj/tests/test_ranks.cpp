#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "monotone/error.hpp"
#include "monotone/ranks.hpp"
#include "monotone/rng.hpp"
#include "monotone/stats.hpp"
#include "oracles.hpp"

using namespace monotone;

TEST(FitRank, OrderStatisticsGetGridRanks) {
    const std::size_t n = 25;
    const auto data = sample(GaussianSpec::centered({1.0}), n, 3);
    const auto ref = discretize_reference(CubeSpec{HVec{0.0}, {1.0}}, n, 0, DiscretizationStrategy::QuantileGrid);
    const RankMap rank = fit_rank(data, ref);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return data[a][0] < data[b][0]; });
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_DOUBLE_EQ(rank.rank_of(order[k])[0], static_cast<double>(k + 1) / static_cast<double>(n + 1));
    }
    EXPECT_EQ(rank.reference_meta.strategy, DiscretizationStrategy::QuantileGrid);
}

TEST(FitRank, DataOnTheReferenceIsFixed) {
    const auto ref = discretize_reference(SphericalUniformSpec::isotropic(3), 30, 4);
    const RankMap rank = fit_rank(ref.measure.points(), ref);
    for (std::size_t k = 0; k < 30; ++k) EXPECT_EQ(rank.assignment[k], k);
}

TEST(FitRank, MatchesBruteForceOnFunctionalData) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = sample(GaussianSpec::centered(8, Spectrum::power(1.0, 1.0)), 6, seed);
        const auto ref = discretize_reference(SphericalUniformSpec::isotropic(8), 6, seed + 10);
        const RankMap rank = fit_rank(data, ref);
        double cost = 0.0;
        for (std::size_t k = 0; k < 6; ++k) cost += oracle::sqdist(data[k], rank.ranks[k]);
        EXPECT_NEAR(cost / 6, oracle::brute_force_assignment(data, ref.measure.points()), 1e-12);
    }
}

TEST(FitRank, PushforwardIsTheReferenceAndSupportIsMonotone) {
    const auto data = sample(GaussianSpec::centered({1.0, 2.0, 0.5}), 40, 5);
    const auto ref = discretize_reference(SphericalUniformSpec::isotropic(3), 40, 6);
    const RankMap rank = fit_rank(data, ref);
    EXPECT_TRUE(pushforward_matches(rank, ref.measure));
    CertifyOptions opts;
    opts.samples = 20000;
    EXPECT_TRUE(certify(rank, opts).passed());
    RankMap broken = rank;
    broken.assignment[1] = broken.assignment[0];
    EXPECT_FALSE(pushforward_matches(broken, ref.measure));
}

TEST(FitRank, InvariantUnderIncreasingAffineMapsInOneDimension) {
    const auto data = sample(CubeSpec{HVec{0.0}, {5.0}}, 30, 8);
    std::vector<HVec> moved;
    for (const auto& x : data) moved.push_back(HVec{3.0 * x[0] - 7.0});
    const auto ref = discretize_reference(CubeSpec{HVec{0.0}, {1.0}}, 30, 0, DiscretizationStrategy::QuantileGrid);
    EXPECT_EQ(fit_rank(data, ref).assignment, fit_rank(moved, ref).assignment);
}

TEST(FitRank, RejectsSizeMismatchAndNonUniformWeights) {
    const auto data = sample(GaussianSpec::centered({1.0}), 5, 1);
    EXPECT_THROW(fit_rank(data, discretize_reference(CubeSpec{HVec{0.0}, {1.0}}, 4, 0)), InvalidInput);
    const DiscreteMeasure skewed({HVec{0.0}, HVec{1.0}, HVec{2.0}, HVec{3.0}, HVec{4.0}}, {1, 1, 1, 1, 2});
    EXPECT_THROW(fit_rank(data, skewed), InvalidInput);
}

TEST(CompactSet, MembershipAndGrid) {
    CompactSet k{1.0, {0.5, 2.0}};
    EXPECT_TRUE(k.contains(HVec{0.5, 0.5}));
    EXPECT_FALSE(k.contains(HVec{0.6, 0.0}));
    EXPECT_FALSE(k.contains(HVec{0.0, 1.1}));
    const auto grid = k.grid(2, 5);
    EXPECT_FALSE(grid.empty());
    for (const auto& p : grid) EXPECT_TRUE(k.contains(p));
    EXPECT_EQ((CompactSet{100.0, {1.0, 1.0, 1.0}}.grid(3, 4).size()), 64u);
}

TEST(Curves, ParseAndProjectRecoversCoefficients) {
    // Curves built from known cosine coefficients on a fine grid.
    const std::size_t g = 2001;
    CurveTable table;
    for (std::size_t k = 0; k < g; ++k) table.grid.push_back(2.0 + 3.0 * k / (g - 1.0));
    const std::vector<std::vector<double>> coeffs{{1.0, 0.5, -0.25, 0.0}, {0.0, -1.0, 0.0, 2.0}};
    for (const auto& c : coeffs) {
        std::vector<double> curve(g, 0.0);
        for (std::size_t k = 0; k < g; ++k) {
            const double t = k / (g - 1.0);
            for (std::size_t b = 0; b < c.size(); ++b) curve[k] += c[b] * cosine_basis(b, t);
        }
        table.curves.push_back(curve);
    }
    const auto proj = project_curves(table, 6);
    for (std::size_t r = 0; r < coeffs.size(); ++r) {
        for (std::size_t b = 0; b < 6; ++b) {
            EXPECT_NEAR(proj[r][b], b < 4 ? coeffs[r][b] : 0.0, 1e-5);
        }
    }
    const double total = [&] {
        const auto w = trapezoid_weights(table.grid);
        return std::accumulate(w.begin(), w.end(), 0.0);
    }();
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Curves, CsvParsing) {
    const auto t = parse_curve_csv("# grid then curves\n0,0.5,1\n1,2,3\n\n4,5,6\r\n");
    EXPECT_EQ(t.grid, (std::vector<double>{0.0, 0.5, 1.0}));
    ASSERT_EQ(t.curves.size(), 2u);
    EXPECT_EQ(t.curves[1], (std::vector<double>{4, 5, 6}));
    EXPECT_THROW(parse_curve_csv("0,1\n1,2,3\n"), InvalidInput);
    EXPECT_THROW(parse_curve_csv("0,1\n1,x\n"), InvalidInput);
    EXPECT_THROW(parse_curve_csv("1,0\n1,2\n"), InvalidInput);
    EXPECT_THROW(read_curve_csv("/nonexistent/curves.csv"), InvalidInput);
}

TEST(LocalGc, SelfTransportGapShrinks) {
    LocalGcConfig c{CubeSpec::inscribed(2, 1.0), CubeSpec::inscribed(2, 1.0)};
    c.n_grid = {64, 1024};
    c.reps = 3;
    c.k_set = CompactSet{0.5, {}};
    c.directions = {HVec{1.0, 0.0}, HVec{0.0, 1.0}};
    c.strategy = DiscretizationStrategy::Stratified;
    const auto r = local_gc_experiment(c);
    EXPECT_TRUE(r.closed_form);
    for (std::size_t rep = 0; rep < 3; ++rep) {
        for (std::size_t h = 0; h < 2; ++h) {
            double lo = -1, hi = -1;
            for (const auto& row : r.rows) {
                if (row.seed != rep || row.direction_index != h) continue;
                (row.n == 64 ? lo : hi) = row.gap;
            }
            EXPECT_LT(hi, lo);
        }
    }
}

TEST(LocalGc, OneDimensionalEmpiricalCdf) {
    // Ranks on the grid i/(n+1) are the rescaled empirical CDF; the gap to Phi
    // is a DKW-scale quantity.
    LocalGcConfig c{GaussianSpec::centered({1.0}), CubeSpec{HVec{0.0}, {1.0}}};
    c.n_grid = {64, 256, 1024};
    c.k_set = CompactSet{1.5, {}};
    c.directions = {HVec{1.0}};
    c.strategy = DiscretizationStrategy::QuantileGrid;
    c.seed = 12;
    const auto r = local_gc_experiment(c);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_GT(r.rows[0].gap, r.rows[1].gap);
    EXPECT_GT(r.rows[1].gap, r.rows[2].gap);
    // Oracle: recompute the last row by hand.
    const auto data = sample(GaussianSpec::centered({1.0}), 1024, derive_seed(12, 1024, 0));
    std::vector<double> xs;
    for (const auto& x : data) xs.push_back(x[0]);
    std::sort(xs.begin(), xs.end());
    double sup = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (std::abs(xs[k]) > 1.5) continue;
        sup = std::max(sup, std::abs((k + 1.0) / 1025.0 - stats::normal_cdf(xs[k])));
    }
    EXPECT_NEAR(r.rows[2].gap, sup, 1e-12);
}

TEST(LocalGc, GaussianToGaussianGapShrinks) {
    LocalGcConfig c{GaussianSpec::centered({1.0, 0.5}), GaussianSpec::centered({0.5, 1.0})};
    c.n_grid = {64, 1024};
    c.reps = 5;
    c.k_set = CompactSet{1.0, {}};
    c.directions = {HVec{1.0, 0.0}, HVec{0.0, 1.0}, HVec{std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}};
    c.strategy = DiscretizationStrategy::Stratified;
    c.seed = 40;
    const auto r = local_gc_experiment(c);
    // Single replications are noisy; the mean over replications must shrink.
    for (std::size_t h = 0; h < 3; ++h) {
        double lo = 0.0, hi = 0.0;
        for (const auto& row : r.rows) {
            if (row.direction_index != h) continue;
            (row.n == 64 ? lo : hi) += row.gap / 5.0;
        }
        EXPECT_LT(hi, lo) << "h " << h;
    }
}
