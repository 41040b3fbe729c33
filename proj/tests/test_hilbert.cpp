#include <gtest/gtest.h>

#include <cmath>

#include "monotone/error.hpp"
#include "monotone/hilbert.hpp"
#include "monotone/rng.hpp"

using namespace monotone;

namespace {

HVec random_vec(Rng& rng, std::size_t d) {
    std::vector<double> c(d);
    for (double& v : c) v = rng.normal() * std::pow(10.0, rng.uniform() * 4.0 - 2.0);
    return HVec(c);
}

// Neumaier-compensated sum of squares, independent of inner().
double compensated_square_sum(const HVec& x) {
    double sum = 0.0, carry = 0.0;
    for (double c : x.coeffs()) {
        const double term = c * c;
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            carry += (sum - t) + term;
        } else {
            carry += (term - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

}  // namespace

TEST(Inner, OrthogonalBasisVectors) { EXPECT_EQ(inner(HVec{1, 0}, HVec{0, 1}), 0.0); }

TEST(Inner, DirectArithmetic) { EXPECT_EQ(inner(HVec{1, 2}, HVec{3, 4}), 11.0); }

TEST(Inner, DimensionMismatchIsRejected) {
    EXPECT_THROW(inner(HVec{1, 2}, HVec{1, 2, 3}), InvalidInput);
}

TEST(HVec, RejectsNonFiniteAndEmpty) {
    EXPECT_THROW(HVec({1.0, std::nan("")}), InvalidInput);
    EXPECT_THROW(HVec({INFINITY}), InvalidInput);
    EXPECT_THROW(HVec(std::vector<double>{}), InvalidInput);
}

TEST(Inner, SelfInnerMatchesCompensatedNorm) {
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const HVec x = random_vec(rng, 1 + rng.below(64));
        const double oracle = compensated_square_sum(x);
        EXPECT_NEAR(inner(x, x), oracle, 1e-14 * oracle);
        EXPECT_NEAR(norm(x) * norm(x), oracle, 1e-14 * oracle);
    }
}

TEST(HilbertProperties, CauchySchwarz) {
    Rng rng(2);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 1 + rng.below(16);
        const HVec x = random_vec(rng, d);
        const HVec y = random_vec(rng, d);
        EXPECT_LE(std::abs(inner(x, y)), norm(x) * norm(y) * (1.0 + 1e-12));
    }
}

TEST(HilbertProperties, ParallelogramLaw) {
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 1 + rng.below(16);
        const HVec x = random_vec(rng, d);
        const HVec y = random_vec(rng, d);
        const double lhs = squared_norm(x + y) + squared_norm(x - y);
        const double rhs = 2.0 * squared_norm(x) + 2.0 * squared_norm(y);
        EXPECT_NEAR(lhs, rhs, 1e-10 * rhs);
    }
}

TEST(ConvergenceReport, ConstantSequenceHasZeroGaps) {
    const HVec x{0.3, -1.2, 4.0};
    const std::vector<HVec> seq(5, x);
    const std::vector<HVec> dirs{HVec{1, 0, 0}, HVec{1, 1, 1}};
    const auto report = convergence_report(seq, x, dirs);
    for (double g : report.strong_gaps) EXPECT_EQ(g, 0.0);
    for (const auto& row : report.weak_gaps) {
        for (double g : row) EXPECT_EQ(g, 0.0);
    }
}

TEST(ConvergenceReport, StrongGapsOfOneOverN) {
    const HVec x{1.0, 2.0};
    std::vector<HVec> seq;
    for (int n = 1; n <= 10; ++n) seq.push_back(x + (1.0 / n) * HVec::basis(2, 0));
    const auto report = convergence_report(seq, x, {});
    for (int n = 1; n <= 10; ++n) EXPECT_NEAR(report.strong_gaps[n - 1], 1.0 / n, 1e-15);
}

TEST(ConvergenceReport, RotatingBasisSequence) {
    const std::size_t d = 8;
    const HVec limit = HVec::basis(d, 0);
    const HVec h{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
    std::vector<HVec> seq;
    for (std::size_t n = 1; n <= 24; ++n) seq.push_back(HVec::basis(d, n % d));
    const std::vector<HVec> dirs{h};
    const auto report = convergence_report(seq, limit, dirs);
    for (std::size_t n = 1; n <= 24; ++n) {
        const std::size_t k = n % d;
        // direct evaluation: ||e_k - e_0|| and |h_k - h_0|
        const double strong = k == 0 ? 0.0 : std::sqrt(2.0);
        EXPECT_NEAR(report.strong_gaps[n - 1], strong, 1e-15);
        EXPECT_NEAR(report.weak_gaps[0][n - 1], std::abs(h[k] - h[0]), 1e-15);
        EXPECT_LE(report.weak_gaps[0][n - 1], norm(h) * report.strong_gaps[n - 1] + 1e-15);
    }
}

TEST(ConvergenceReport, EmptySequenceIsRejected) {
    EXPECT_THROW(convergence_report({}, HVec{1.0}, {}), InvalidInput);
}
