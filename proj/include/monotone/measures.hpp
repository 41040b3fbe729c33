#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "monotone/hilbert.hpp"

namespace monotone {

/// Rule generating a per-coordinate scale sequence s_1, ..., s_d (1-based i).
struct Spectrum {
    enum class Kind { Explicit, Constant, Geometric, Power };

    Kind kind = Kind::Constant;
    double scale = 1.0;             // c
    double rate = 1.0;              // r for Geometric (c r^i), p for Power (c i^{-p})
    std::vector<double> values;     // Explicit

    static Spectrum explicit_values(std::vector<double> v);
    static Spectrum constant(double c);
    static Spectrum geometric(double c, double r);
    static Spectrum power(double c, double p);

    std::vector<double> generate(std::size_t dim) const;
    /// Human-readable formula, recorded in experiment metadata.
    std::string describe() const;
};

/// Gaussian with independent coordinates: mean + sum_i stds_i xi_i e_i.
struct GaussianSpec {
    HVec mean;
    std::vector<double> stds;
    std::string generator = "explicit";

    static GaussianSpec centered(std::size_t dim, const Spectrum& spectrum);
    static GaussianSpec centered(std::vector<double> stds);

    std::size_t dim() const noexcept { return stds.size(); }
    bool non_degenerate() const;
    double trace() const;  // sum of variances
};

/// Law of shift + sum_i scales_i U_i e_i with U_i iid Uniform(0,1).
struct CubeSpec {
    HVec shift;
    std::vector<double> scales;

    /// Cube [-s_i/2, s_i/2] per coordinate.
    static CubeSpec centered(std::vector<double> scales);
    /// Centered cube whose corners lie on the sphere of the given radius.
    static CubeSpec inscribed(std::size_t dim, double radius);
    /// Centered cube with side lengths proportional to `shape` and corners on
    /// the sphere of the given radius.
    static CubeSpec scaled_to_radius(std::vector<double> shape, double radius);

    std::size_t dim() const noexcept { return scales.size(); }
    /// Largest norm attained on the closed cube.
    double support_bound() const;
};

/// Law of U G / ||G|| with U ~ Uniform(0,1) independent of the Gaussian G.
/// Samples lie in the open unit ball.
struct SphericalUniformSpec {
    GaussianSpec gaussian;

    static SphericalUniformSpec isotropic(std::size_t dim);
    std::size_t dim() const noexcept { return gaussian.dim(); }
};

using MeasureSpec = std::variant<GaussianSpec, CubeSpec, SphericalUniformSpec>;

std::size_t dim(const MeasureSpec& spec);
std::string kind_name(const MeasureSpec& spec);
/// Throws InvalidInput for negative scales, non-finite values, or mismatched dimensions.
void validate(const MeasureSpec& spec);
/// Norm bound of the support, or +inf for unbounded families.
double support_bound(const MeasureSpec& spec);

/// n draws, a pure function of (spec, n, seed).
std::vector<HVec> sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed);

/// Finitely supported probability measure. Zero-mass atoms are dropped,
/// atoms whose coordinates agree within 1e-12 are merged, and weights are
/// renormalized to sum to one. Atom order follows first occurrence.
class DiscreteMeasure {
public:
    static constexpr double kMergeTolerance = 1e-12;

    DiscreteMeasure(std::vector<HVec> points, std::vector<double> weights);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return points_.front().dim(); }
    const std::vector<HVec>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const HVec& point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// Atom index each constructor input landed in (-1 for dropped zero-mass inputs).
    const std::vector<std::ptrdiff_t>& input_to_atom() const noexcept { return input_to_atom_; }

    double max_norm() const;
    bool uniform_weights(double tol = 1e-12) const;

    template <class Map>
    DiscreteMeasure pushforward(Map&& map) const {
        std::vector<HVec> image;
        image.reserve(points_.size());
        for (const auto& p : points_) image.push_back(map(p));
        return DiscreteMeasure(std::move(image), weights_);
    }

private:
    std::vector<HVec> points_;
    std::vector<double> weights_;
    std::vector<std::ptrdiff_t> input_to_atom_;
};

/// Uniform-weight measure on the given points (duplicates merged).
DiscreteMeasure empirical(std::vector<HVec> points);

/// SeededIid: m iid draws. QuantileGrid: atoms at the quantiles i/(m+1), d = 1 only.
/// Stratified: Latin hypercube over the coordinate quantiles (Gaussian, cube),
/// or over the radius with iid directions (spherical uniform).
enum class DiscretizationStrategy { SeededIid, QuantileGrid, Stratified };

std::string to_string(DiscretizationStrategy s);
DiscretizationStrategy discretization_from_string(const std::string& s);

struct Discretization {
    DiscreteMeasure measure;
    double bound;               // every atom has norm <= bound
    bool bounded_family;        // false for Gaussian specs
    DiscretizationStrategy strategy;
    std::uint64_t seed;
};

/// m-atom uniform-weight discretization, a pure function of its arguments.
Discretization discretize(const MeasureSpec& spec, std::size_t m, std::uint64_t seed,
                          DiscretizationStrategy strategy = DiscretizationStrategy::SeededIid);

/// As discretize(), restricted to the bounded reference families (cube and
/// spherical uniform).
Discretization discretize_reference(const MeasureSpec& spec, std::size_t m, std::uint64_t seed,
                                    DiscretizationStrategy strategy = DiscretizationStrategy::SeededIid);

}  // namespace monotone
