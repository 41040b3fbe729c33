#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monotone/hilbert.hpp"
#include "monotone/measures.hpp"
#include "monotone/ot.hpp"

namespace monotone {

/// x -> tgt_mean + r * (x - src_mean), coordinatewise. With r >= 0 this is
/// the gradient of the convex quadratic 1/2 sum_i r_i (x_i - a_i)^2 + <b, x>.
class DiagonalMap {
public:
    DiagonalMap(std::vector<double> ratios, HVec src_mean, HVec tgt_mean);
    explicit DiagonalMap(std::vector<double> ratios);

    static DiagonalMap identity(std::size_t dim);

    std::size_t dim() const noexcept { return ratios_.size(); }
    const std::vector<double>& ratios() const noexcept { return ratios_; }
    const HVec& src_mean() const noexcept { return src_mean_; }
    const HVec& tgt_mean() const noexcept { return tgt_mean_; }

    HVec apply(const HVec& x) const;
    double potential(const HVec& x) const;

private:
    std::vector<double> ratios_;
    HVec src_mean_;
    HVec tgt_mean_;
};

/// outer o inner; ratios multiply exactly.
DiagonalMap compose(const DiagonalMap& outer, const DiagonalMap& inner);

/// Monotone map between independent-coordinate Gaussians: ratios
/// tgt.stds / src.stds, with translate-map-translate for the means.
/// Throws InvalidInput if src has a zero standard deviation or the dimensions differ.
DiagonalMap gaussian_map(const GaussianSpec& src, const GaussianSpec& tgt);

/// Coordinatewise quantile map from a non-degenerate diagonal Gaussian onto a
/// cube: x_i -> a_i + l_i Phi((x_i - m_i) / s_i).
class GaussianToCubeMap {
public:
    GaussianToCubeMap(GaussianSpec src, CubeSpec tgt);

    HVec apply(const HVec& x) const;
    /// sum_i a_i x_i + l_i s_i G((x_i - m_i) / s_i) with G(z) = z Phi(z) + phi(z).
    double potential(const HVec& x) const;

private:
    GaussianSpec src_;
    CubeSpec tgt_;
};

/// Gradient of a known convex potential, type-erased for experiments.
struct ConvexMap {
    std::function<HVec(const HVec&)> gradient;
    std::function<double(const HVec&)> potential;
    std::string description;
};

ConvexMap as_convex_map(const DiagonalMap& map);
ConvexMap as_convex_map(const GaussianToCubeMap& map);
ConvexMap as_convex_map(const MaxAffinePotential& psi);

/// Closed-form monotone map pushing P to Q when one is known: Gaussian to
/// Gaussian, Gaussian to cube, cube to cube. Empty otherwise.
std::optional<ConvexMap> closed_form_map(const MeasureSpec& src, const MeasureSpec& tgt);

struct PopulationOptions {
    std::size_t reference_atoms = 2000;  // atoms of the fine reference when no closed form exists
    std::uint64_t seed = 0;
    SemiDiscreteOptions solver;
};

struct PopulationMap {
    ConvexMap map;
    bool closed_form;
};

/// Gradient of the population potential pushing P to Q: closed_form_map when
/// available, otherwise semidiscrete_solve against a seeded discretization of Q.
/// The potential is normalized to vanish at the origin.
PopulationMap population_map(const MeasureSpec& src, const MeasureSpec& tgt, const PopulationOptions& options = {});

/// Diagonal operator A e_i = base^i e_i (i is 1-based).
struct PathologicalOperator {
    double base = 4.0;
    std::size_t dim = 1;

    HVec apply(const HVec& x) const;
};

struct PushSample {
    std::vector<HVec> inputs;    // sum_i 8^-i xi_i e_i
    std::vector<HVec> outputs;   // A applied to inputs
    double max_discrepancy;      // max |(AX)_i - 2^-i xi_i|
};

/// Pushes draws of sum_i 8^-i xi_i e_i through A (base 4).
PushSample pathological_push(std::size_t dim, std::size_t n, std::uint64_t seed);
/// Same, for explicitly given standard normal coordinates.
PushSample pathological_push(std::span<const std::vector<double>> xis);

struct NullDomainRow {
    std::uint64_t seed;
    std::size_t dim;
    double partial_sum;  // S_d = sum_{i<=d} 2^i xi_i^2
};

/// Per-seed trajectories of S_d for d = 1..d_max, seeds base_seed + k.
std::vector<NullDomainRow> null_domain_diagnostic(std::size_t d_max, std::size_t seeds, std::uint64_t base_seed);

/// E[S_d] = 2^{d+1} - 2.
double null_domain_expectation(std::size_t dim);

}  // namespace monotone
