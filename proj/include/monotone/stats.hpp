#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace monotone::stats {

double normal_cdf(double z);
double normal_pdf(double z);
double normal_quantile(double p);

double mean(std::span<const double> xs);
/// Divides by N (population form).
double variance(std::span<const double> xs);
/// Divides by N - 1.
double sample_variance(std::span<const double> xs);

/// Kolmogorov-Smirnov distance sup_t |F_n(t) - F(t)| of the sample to a
/// continuous CDF.
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Two-sided asymptotic KS p-value for sample size n and distance D.
double ks_pvalue(double distance, std::size_t n);

/// Bootstrap standard error of the sample variance.
double bootstrap_variance_se(std::span<const double> xs, std::size_t resamples, std::uint64_t seed);

}  // namespace monotone::stats
