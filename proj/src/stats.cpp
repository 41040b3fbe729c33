#include "monotone/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "monotone/error.hpp"
#include "monotone/rng.hpp"

namespace monotone::stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("normal_quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw InvalidInput("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw InvalidInput("sample variance needs two values");
    const double n = static_cast<double>(xs.size());
    return variance(xs) * n / (n - 1.0);
}

double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw InvalidInput("ks_distance of empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_pvalue(double distance, std::size_t n) {
    // Kolmogorov distribution tail with the Stephens small-sample correction.
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double bootstrap_variance_se(std::span<const double> xs, std::size_t resamples, std::uint64_t seed) {
    if (xs.size() < 2 || resamples < 2) throw InvalidInput("bootstrap needs >= 2 values and resamples");
    Rng rng(seed);
    std::vector<double> draws(xs.size());
    std::vector<double> estimates;
    estimates.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (double& d : draws) d = xs[rng.below(xs.size())];
        estimates.push_back(sample_variance(draws));
    }
    return std::sqrt(sample_variance(estimates));
}

}  // namespace monotone::stats
