#include "monotone/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "monotone/error.hpp"
#include "monotone/rng.hpp"
#include "monotone/stats.hpp"

namespace monotone {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------------------
// Spectrum

Spectrum Spectrum::explicit_values(std::vector<double> v) {
    Spectrum s;
    s.kind = Kind::Explicit;
    s.values = std::move(v);
    return s;
}

Spectrum Spectrum::constant(double c) {
    Spectrum s;
    s.kind = Kind::Constant;
    s.scale = c;
    return s;
}

Spectrum Spectrum::geometric(double c, double r) {
    Spectrum s;
    s.kind = Kind::Geometric;
    s.scale = c;
    s.rate = r;
    return s;
}

Spectrum Spectrum::power(double c, double p) {
    Spectrum s;
    s.kind = Kind::Power;
    s.scale = c;
    s.rate = p;
    return s;
}

std::vector<double> Spectrum::generate(std::size_t dim) const {
    std::vector<double> out(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const double i = static_cast<double>(k + 1);
        switch (kind) {
            case Kind::Explicit:
                if (values.size() != dim) {
                    throw InvalidInput("explicit spectrum has " + std::to_string(values.size()) +
                                       " values, dimension is " + std::to_string(dim));
                }
                out[k] = values[k];
                break;
            case Kind::Constant: out[k] = scale; break;
            case Kind::Geometric: out[k] = scale * std::pow(rate, i); break;
            case Kind::Power: out[k] = scale * std::pow(i, -rate); break;
        }
    }
    return out;
}

std::string Spectrum::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::Explicit: os << "explicit"; break;
        case Kind::Constant: os << "s_i = " << scale; break;
        case Kind::Geometric: os << "s_i = " << scale << " * " << rate << "^i"; break;
        case Kind::Power: os << "s_i = " << scale << " * i^-" << rate; break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Parametric families

GaussianSpec GaussianSpec::centered(std::size_t dim, const Spectrum& spectrum) {
    return GaussianSpec{HVec::zeros(dim), spectrum.generate(dim), spectrum.describe()};
}

GaussianSpec GaussianSpec::centered(std::vector<double> stds) {
    const std::size_t d = stds.size();
    return GaussianSpec{HVec::zeros(d), std::move(stds), "explicit"};
}

bool GaussianSpec::non_degenerate() const {
    return std::all_of(stds.begin(), stds.end(), [](double s) { return s > 0.0; });
}

double GaussianSpec::trace() const {
    double t = 0.0;
    for (double s : stds) t += s * s;
    return t;
}

CubeSpec CubeSpec::centered(std::vector<double> scales) {
    std::vector<double> shift(scales.size());
    for (std::size_t k = 0; k < scales.size(); ++k) shift[k] = -0.5 * scales[k];
    return CubeSpec{HVec(std::move(shift)), std::move(scales)};
}

CubeSpec CubeSpec::inscribed(std::size_t dim, double radius) {
    if (dim == 0) throw InvalidInput("cube dimension must be >= 1");
    return centered(std::vector<double>(dim, 2.0 * radius / std::sqrt(static_cast<double>(dim))));
}

CubeSpec CubeSpec::scaled_to_radius(std::vector<double> shape, double radius) {
    if (shape.empty()) throw InvalidInput("cube dimension must be >= 1");
    double half_diag = 0.0;
    for (double s : shape) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("cube shape entries must be finite and >= 0");
        half_diag += s * s / 4.0;
    }
    half_diag = std::sqrt(half_diag);
    if (half_diag == 0.0) throw InvalidInput("cube shape must not vanish");
    for (double& s : shape) s *= radius / half_diag;
    return centered(std::move(shape));
}

double CubeSpec::support_bound() const {
    double s = 0.0;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const double far = std::max(std::abs(shift[k]), std::abs(shift[k] + scales[k]));
        s += far * far;
    }
    return std::sqrt(s);
}

SphericalUniformSpec SphericalUniformSpec::isotropic(std::size_t dim) {
    return SphericalUniformSpec{GaussianSpec::centered(dim, Spectrum::constant(1.0))};
}

std::size_t dim(const MeasureSpec& spec) {
    return std::visit([](const auto& s) { return s.dim(); }, spec);
}

std::string kind_name(const MeasureSpec& spec) {
    return std::visit(overloaded{[](const GaussianSpec&) { return std::string("gaussian"); },
                                 [](const CubeSpec&) { return std::string("cube"); },
                                 [](const SphericalUniformSpec&) { return std::string("spherical_uniform"); }},
                      spec);
}

namespace {

void validate_scales(const std::vector<double>& scales, const HVec& location, const char* what) {
    if (scales.empty()) throw InvalidInput(std::string(what) + ": dimension must be >= 1");
    if (location.dim() != scales.size()) {
        throw InvalidInput(std::string(what) + ": location has dimension " + std::to_string(location.dim()) +
                           ", scales have " + std::to_string(scales.size()));
    }
    for (double s : scales) {
        if (!std::isfinite(s) || s < 0.0) throw InvalidInput(std::string(what) + ": scales must be finite and >= 0");
    }
}

}  // namespace

void validate(const MeasureSpec& spec) {
    std::visit(overloaded{[](const GaussianSpec& g) { validate_scales(g.stds, g.mean, "gaussian"); },
                          [](const CubeSpec& c) { validate_scales(c.scales, c.shift, "cube"); },
                          [](const SphericalUniformSpec& u) {
                              validate_scales(u.gaussian.stds, u.gaussian.mean, "spherical_uniform");
                              if (u.gaussian.trace() == 0.0 && squared_norm(u.gaussian.mean) == 0.0) {
                                  throw InvalidInput("spherical_uniform: G is identically zero");
                              }
                          }},
               spec);
}

double support_bound(const MeasureSpec& spec) {
    return std::visit(overloaded{[](const GaussianSpec& g) {
                                     return g.trace() == 0.0 ? norm(g.mean)
                                                             : std::numeric_limits<double>::infinity();
                                 },
                                 [](const CubeSpec& c) { return c.support_bound(); },
                                 [](const SphericalUniformSpec&) { return 1.0; }},
                      spec);
}

namespace {

HVec draw_gaussian(const GaussianSpec& g, Rng& rng) {
    std::vector<double> c(g.dim());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = g.mean[k] + g.stds[k] * rng.normal();
    return HVec(std::move(c));
}

HVec draw_cube(const CubeSpec& cube, Rng& rng) {
    std::vector<double> c(cube.dim());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = cube.shift[k] + cube.scales[k] * rng.uniform();
    return HVec(std::move(c));
}

HVec draw_spherical(const SphericalUniformSpec& u, Rng& rng) {
    for (;;) {
        HVec g = draw_gaussian(u.gaussian, rng);
        const double r = norm(g);
        const double radius = rng.uniform();
        if (r > 0.0) return (radius / r) * std::move(g);
    }
}

}  // namespace

std::vector<HVec> sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidInput("sample: n must be >= 1");
    validate(spec);
    Rng rng(seed);
    std::vector<HVec> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::visit(overloaded{[&](const GaussianSpec& g) { return draw_gaussian(g, rng); },
                                            [&](const CubeSpec& c) { return draw_cube(c, rng); },
                                            [&](const SphericalUniformSpec& u) { return draw_spherical(u, rng); }},
                                 spec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(std::vector<HVec> points, std::vector<double> weights) {
    if (points.empty()) throw InvalidInput("discrete measure needs at least one atom");
    if (points.size() != weights.size()) throw InvalidInput("points and weights differ in length");
    const std::size_t d = points.front().dim();
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].dim() != d) throw InvalidInput("atoms have different dimensions");
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) throw InvalidInput("weights must be finite and >= 0");
        total += weights[i];
    }
    if (!(total > 0.0)) throw InvalidInput("total mass must be positive");

    const std::size_t n = points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ca = points[a].coeffs();
        const auto cb = points[b].coeffs();
        if (std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end())) return true;
        if (std::lexicographical_compare(cb.begin(), cb.end(), ca.begin(), ca.end())) return false;
        return a < b;
    });

    auto close = [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < d; ++k) {
            if (std::abs(points[a][k] - points[b][k]) > kMergeTolerance) return false;
        }
        return true;
    };

    // representative[i] = smallest input index in i's duplicate group
    std::vector<std::size_t> representative(n);
    for (std::size_t g = 0; g < n;) {
        std::size_t end = g + 1;
        while (end < n && close(order[g], order[end])) ++end;
        const std::size_t rep = *std::min_element(order.begin() + g, order.begin() + end);
        for (std::size_t t = g; t < end; ++t) representative[order[t]] = rep;
        g = end;
    }

    std::vector<double> merged(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) merged[representative[i]] += weights[i];

    std::vector<std::ptrdiff_t> atom_of_rep(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (representative[i] != i || merged[i] == 0.0) continue;
        atom_of_rep[i] = static_cast<std::ptrdiff_t>(points_.size());
        points_.push_back(std::move(points[i]));
        weights_.push_back(merged[i] / total);
    }
    input_to_atom_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        input_to_atom_[i] = weights[i] == 0.0 ? -1 : atom_of_rep[representative[i]];
    }
}

double DiscreteMeasure::max_norm() const {
    double m = 0.0;
    for (const auto& p : points_) m = std::max(m, norm(p));
    return m;
}

bool DiscreteMeasure::uniform_weights(double tol) const {
    const double w = 1.0 / static_cast<double>(size());
    return std::all_of(weights_.begin(), weights_.end(), [&](double x) { return std::abs(x - w) <= tol; });
}

DiscreteMeasure empirical(std::vector<HVec> points) {
    if (points.empty()) throw InvalidInput("empirical: empty point list");
    std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
    return DiscreteMeasure(std::move(points), std::move(w));
}

// ---------------------------------------------------------------------------
// Discretization

std::string to_string(DiscretizationStrategy s) {
    switch (s) {
        case DiscretizationStrategy::SeededIid: return "seeded-iid";
        case DiscretizationStrategy::QuantileGrid: return "quantile-grid";
        case DiscretizationStrategy::Stratified: return "stratified";
    }
    return "unknown";
}

DiscretizationStrategy discretization_from_string(const std::string& s) {
    if (s == "seeded-iid" || s == "seeded_iid" || s == "iid") return DiscretizationStrategy::SeededIid;
    if (s == "quantile-grid" || s == "quantile_grid" || s == "grid") return DiscretizationStrategy::QuantileGrid;
    if (s == "stratified" || s == "latin-hypercube") return DiscretizationStrategy::Stratified;
    throw InvalidInput("unknown discretization strategy '" + s + "'");
}

namespace {

// Quantile function of the one-dimensional member of each family.
double quantile_1d(const MeasureSpec& spec, double p) {
    return std::visit(
        overloaded{[&](const GaussianSpec& g) { return g.mean[0] + g.stds[0] * stats::normal_quantile(p); },
                   [&](const CubeSpec& c) { return c.shift[0] + c.scales[0] * p; },
                   [&](const SphericalUniformSpec& u) {
                       // S U with S = sign(G): P(S = -1) = Phi(-m/s).
                       const auto& g = u.gaussian;
                       const double neg = g.stds[0] > 0.0 ? stats::normal_cdf(-g.mean[0] / g.stds[0])
                                                          : (g.mean[0] < 0.0 ? 1.0 : 0.0);
                       if (p < neg) return p / neg - 1.0;
                       return (p - neg) / (1.0 - neg);
                   }},
        spec);
}

}  // namespace

namespace {

// Level (perm[i] + U_i) / m for each of the m atoms, with a fresh permutation.
std::vector<double> stratified_levels(std::size_t m, Rng& rng) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<double> levels(m);
    for (std::size_t i = 0; i < m; ++i) levels[i] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(m);
    return levels;
}

std::vector<HVec> stratified_atoms(const MeasureSpec& spec, std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t d = dim(spec);
    std::vector<std::vector<double>> coords(m, std::vector<double>(d));
    if (const auto* s = std::get_if<SphericalUniformSpec>(&spec)) {
        const auto radii = stratified_levels(m, rng);
        for (std::size_t i = 0; i < m; ++i) {
            double nrm = 0.0;
            do {
                nrm = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    coords[i][k] = s->gaussian.mean[k] + s->gaussian.stds[k] * rng.normal();
                    nrm += coords[i][k] * coords[i][k];
                }
            } while (nrm == 0.0);
            nrm = std::sqrt(nrm);
            for (double& c : coords[i]) c *= radii[i] / nrm;
        }
    } else {
        for (std::size_t k = 0; k < d; ++k) {
            const auto levels = stratified_levels(m, rng);
            for (std::size_t i = 0; i < m; ++i) {
                if (const auto* g = std::get_if<GaussianSpec>(&spec)) {
                    coords[i][k] = g->mean[k] + g->stds[k] * stats::normal_quantile(levels[i]);
                } else {
                    const auto& c = std::get<CubeSpec>(spec);
                    coords[i][k] = c.shift[k] + c.scales[k] * levels[i];
                }
            }
        }
    }
    std::vector<HVec> atoms;
    atoms.reserve(m);
    for (auto& c : coords) atoms.emplace_back(std::move(c));
    return atoms;
}

}  // namespace

Discretization discretize(const MeasureSpec& spec, std::size_t m, std::uint64_t seed,
                          DiscretizationStrategy strategy) {
    if (m == 0) throw InvalidInput("discretize: m must be >= 1");
    validate(spec);
    std::vector<HVec> atoms;
    if (strategy == DiscretizationStrategy::QuantileGrid) {
        if (dim(spec) != 1) throw InvalidInput("quantile-grid discretization is only defined in dimension 1");
        atoms.reserve(m);
        for (std::size_t i = 1; i <= m; ++i) {
            atoms.push_back(HVec{quantile_1d(spec, static_cast<double>(i) / static_cast<double>(m + 1))});
        }
    } else if (strategy == DiscretizationStrategy::Stratified) {
        atoms = stratified_atoms(spec, m, seed);
    } else {
        atoms = sample(spec, m, seed);
    }
    DiscreteMeasure measure = empirical(std::move(atoms));
    const double family_bound = support_bound(spec);
    const bool bounded = std::isfinite(family_bound);
    const double bound = bounded ? family_bound : measure.max_norm();
    return Discretization{std::move(measure), bound, bounded, strategy, seed};
}

Discretization discretize_reference(const MeasureSpec& spec, std::size_t m, std::uint64_t seed,
                                    DiscretizationStrategy strategy) {
    if (std::holds_alternative<GaussianSpec>(spec)) {
        throw InvalidInput("reference measures must be bounded (cube or spherical_uniform)");
    }
    return discretize(spec, m, seed, strategy);
}

}  // namespace monotone
