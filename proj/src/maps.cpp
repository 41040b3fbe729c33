#include "monotone/maps.hpp"

#include <cmath>
#include <sstream>

#include "monotone/error.hpp"
#include "monotone/rng.hpp"
#include "monotone/stats.hpp"

namespace monotone {

DiagonalMap::DiagonalMap(std::vector<double> ratios, HVec src_mean, HVec tgt_mean)
    : ratios_(std::move(ratios)), src_mean_(std::move(src_mean)), tgt_mean_(std::move(tgt_mean)) {
    if (ratios_.empty()) throw InvalidInput("diagonal map needs dimension >= 1");
    if (src_mean_.dim() != ratios_.size() || tgt_mean_.dim() != ratios_.size()) {
        throw InvalidInput("diagonal map offsets have the wrong dimension");
    }
    for (double r : ratios_) {
        if (!std::isfinite(r) || r < 0.0) throw InvalidInput("diagonal map ratios must be finite and >= 0");
    }
}

DiagonalMap::DiagonalMap(std::vector<double> ratios)
    : DiagonalMap(ratios, HVec::zeros(ratios.size()), HVec::zeros(ratios.size())) {}

DiagonalMap DiagonalMap::identity(std::size_t dim) { return DiagonalMap(std::vector<double>(dim, 1.0)); }

HVec DiagonalMap::apply(const HVec& x) const {
    if (x.dim() != dim()) throw InvalidInput("diagonal map applied to a vector of the wrong dimension");
    std::vector<double> out(dim());
    for (std::size_t k = 0; k < dim(); ++k) out[k] = tgt_mean_[k] + ratios_[k] * (x[k] - src_mean_[k]);
    return HVec(std::move(out));
}

double DiagonalMap::potential(const HVec& x) const {
    if (x.dim() != dim()) throw InvalidInput("diagonal map applied to a vector of the wrong dimension");
    double v = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) {
        const double c = x[k] - src_mean_[k];
        v += 0.5 * ratios_[k] * c * c + tgt_mean_[k] * x[k];
    }
    return v;
}

DiagonalMap compose(const DiagonalMap& outer, const DiagonalMap& inner) {
    if (outer.dim() != inner.dim()) throw InvalidInput("cannot compose maps of different dimensions");
    const std::size_t d = outer.dim();
    std::vector<double> ratios(d), offset(d);
    for (std::size_t k = 0; k < d; ++k) {
        ratios[k] = outer.ratios()[k] * inner.ratios()[k];
        offset[k] = outer.tgt_mean()[k] + outer.ratios()[k] * (inner.tgt_mean()[k] - outer.src_mean()[k]);
    }
    return DiagonalMap(std::move(ratios), inner.src_mean(), HVec(std::move(offset)));
}

DiagonalMap gaussian_map(const GaussianSpec& src, const GaussianSpec& tgt) {
    validate(MeasureSpec(src));
    validate(MeasureSpec(tgt));
    if (src.dim() != tgt.dim()) throw InvalidInput("gaussian_map: dimensions differ");
    if (!src.non_degenerate()) throw InvalidInput("gaussian_map: source has a zero standard deviation");
    std::vector<double> ratios(src.dim());
    for (std::size_t k = 0; k < ratios.size(); ++k) ratios[k] = tgt.stds[k] / src.stds[k];
    return DiagonalMap(std::move(ratios), src.mean, tgt.mean);
}

GaussianToCubeMap::GaussianToCubeMap(GaussianSpec src, CubeSpec tgt) : src_(std::move(src)), tgt_(std::move(tgt)) {
    validate(MeasureSpec(src_));
    validate(MeasureSpec(tgt_));
    if (src_.dim() != tgt_.dim()) throw InvalidInput("gaussian-to-cube map: dimensions differ");
    if (!src_.non_degenerate()) throw InvalidInput("gaussian-to-cube map: source has a zero standard deviation");
}

HVec GaussianToCubeMap::apply(const HVec& x) const {
    if (x.dim() != src_.dim()) throw InvalidInput("gaussian-to-cube map: wrong dimension");
    std::vector<double> out(x.dim());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = tgt_.shift[k] + tgt_.scales[k] * stats::normal_cdf((x[k] - src_.mean[k]) / src_.stds[k]);
    }
    return HVec(std::move(out));
}

double GaussianToCubeMap::potential(const HVec& x) const {
    if (x.dim() != src_.dim()) throw InvalidInput("gaussian-to-cube map: wrong dimension");
    double v = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) {
        const double z = (x[k] - src_.mean[k]) / src_.stds[k];
        const double antiderivative = z * stats::normal_cdf(z) + stats::normal_pdf(z);
        v += tgt_.shift[k] * x[k] + tgt_.scales[k] * src_.stds[k] * antiderivative;
    }
    return v;
}

namespace {

std::string describe_vector(const char* label, const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(6);
    os << label << "=(";
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
    os << ")";
    return os.str();
}

}  // namespace

ConvexMap as_convex_map(const DiagonalMap& map) {
    return ConvexMap{[map](const HVec& x) { return map.apply(x); },
                     [map](const HVec& x) { return map.potential(x); },
                     "closed-form diagonal map " + describe_vector("ratios", map.ratios())};
}

ConvexMap as_convex_map(const GaussianToCubeMap& map) {
    return ConvexMap{[map](const HVec& x) { return map.apply(x); },
                     [map](const HVec& x) { return map.potential(x); },
                     "closed-form coordinatewise gaussian-to-cube quantile map"};
}

ConvexMap as_convex_map(const MaxAffinePotential& psi) {
    return ConvexMap{[psi](const HVec& x) { return grad(psi, x).value; },
                     [psi](const HVec& x) { return psi.value(x); },
                     "max-affine potential with " + std::to_string(psi.size()) + " pieces"};
}

std::optional<ConvexMap> closed_form_map(const MeasureSpec& src, const MeasureSpec& tgt) {
    if (dim(src) != dim(tgt)) throw InvalidInput("closed_form_map: dimensions differ");
    if (const auto* g = std::get_if<GaussianSpec>(&src)) {
        if (!g->non_degenerate()) return std::nullopt;
        if (const auto* h = std::get_if<GaussianSpec>(&tgt)) return as_convex_map(gaussian_map(*g, *h));
        if (const auto* c = std::get_if<CubeSpec>(&tgt)) return as_convex_map(GaussianToCubeMap(*g, *c));
    }
    if (const auto* a = std::get_if<CubeSpec>(&src)) {
        if (const auto* b = std::get_if<CubeSpec>(&tgt)) {
            std::vector<double> ratios(a->dim());
            for (std::size_t k = 0; k < ratios.size(); ++k) {
                if (!(a->scales[k] > 0.0)) return std::nullopt;
                ratios[k] = b->scales[k] / a->scales[k];
            }
            return as_convex_map(DiagonalMap(std::move(ratios), a->shift, b->shift));
        }
    }
    return std::nullopt;
}

PopulationMap population_map(const MeasureSpec& src, const MeasureSpec& tgt, const PopulationOptions& options) {
    if (auto closed = closed_form_map(src, tgt)) {
        const HVec origin = HVec::zeros(dim(src));
        const double offset = closed->potential(origin);
        auto potential = closed->potential;
        closed->potential = [potential, offset](const HVec& x) { return potential(x) - offset; };
        return PopulationMap{std::move(*closed), true};
    }
    const Discretization ref = discretize(tgt, options.reference_atoms, options.seed);
    SemiDiscreteOptions solver = options.solver;
    solver.anchor = HVec::zeros(dim(src));
    const SemiDiscreteResult fit = semidiscrete_solve(src, ref.measure, solver);
    ConvexMap map = as_convex_map(fit.potential);
    map.description = "semi-discrete potential against " + std::to_string(ref.measure.size()) +
                      " atoms (validation mismatch " + std::to_string(fit.mismatch) + ")";
    return PopulationMap{std::move(map), false};
}

HVec PathologicalOperator::apply(const HVec& x) const {
    if (x.dim() != dim) throw InvalidInput("operator applied to a vector of the wrong dimension");
    std::vector<double> out(dim);
    double factor = 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
        factor *= base;
        out[k] = factor * x[k];
    }
    return HVec(std::move(out));
}

PushSample pathological_push(std::span<const std::vector<double>> xis) {
    PushSample result{{}, {}, 0.0};
    if (xis.empty()) return result;
    const std::size_t d = xis.front().size();
    if (d == 0) throw InvalidInput("pathological_push: dimension must be >= 1");
    const PathologicalOperator op{4.0, d};
    for (const auto& xi : xis) {
        if (xi.size() != d) throw InvalidInput("pathological_push: ragged coordinates");
        std::vector<double> x(d);
        double eighth = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            eighth /= 8.0;
            x[k] = xi[k] * eighth;
        }
        HVec input(std::move(x));
        HVec output = op.apply(input);
        double half = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            half /= 2.0;
            result.max_discrepancy = std::max(result.max_discrepancy, std::abs(output[k] - xi[k] * half));
        }
        result.inputs.push_back(std::move(input));
        result.outputs.push_back(std::move(output));
    }
    return result;
}

PushSample pathological_push(std::size_t dim, std::size_t n, std::uint64_t seed) {
    if (dim == 0) throw InvalidInput("pathological_push: dimension must be >= 1");
    Rng rng(seed);
    std::vector<std::vector<double>> xis(n, std::vector<double>(dim));
    for (auto& xi : xis) {
        for (double& v : xi) v = rng.normal();
    }
    return pathological_push(xis);
}

std::vector<NullDomainRow> null_domain_diagnostic(std::size_t d_max, std::size_t seeds, std::uint64_t base_seed) {
    if (d_max == 0) throw InvalidInput("null_domain_diagnostic: d_max must be >= 1");
    std::vector<NullDomainRow> rows;
    rows.reserve(d_max * seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
        const std::uint64_t seed = base_seed + s;
        Rng rng(seed);
        double partial = 0.0;
        double weight = 1.0;
        for (std::size_t d = 1; d <= d_max; ++d) {
            weight *= 2.0;
            const double xi = rng.normal();
            partial += weight * xi * xi;
            rows.push_back({seed, d, partial});
        }
    }
    return rows;
}

double null_domain_expectation(std::size_t dim) { return std::ldexp(1.0, static_cast<int>(dim) + 1) - 2.0; }

}  // namespace monotone
