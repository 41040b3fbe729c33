#include <cmath>
#include <limits>

#include "monotone/error.hpp"
#include "monotone/ot.hpp"

namespace monotone {

MaxAffinePotential::MaxAffinePotential(std::vector<HVec> slopes, std::vector<double> intercepts, double constant)
    : slopes_(std::move(slopes)), intercepts_(std::move(intercepts)), constant_(constant) {
    if (slopes_.empty()) throw InvalidInput("max-affine potential needs at least one piece");
    if (slopes_.size() != intercepts_.size()) throw InvalidInput("slopes and intercepts differ in length");
    for (const auto& s : slopes_) {
        if (s.dim() != slopes_.front().dim()) throw InvalidInput("slopes have different dimensions");
    }
    for (double b : intercepts_) {
        if (!std::isfinite(b)) throw InvalidInput("intercepts must be finite");
    }
    if (!std::isfinite(constant_)) throw InvalidInput("constant must be finite");
}

double MaxAffinePotential::affine_max(const HVec& x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < slopes_.size(); ++j) best = std::max(best, inner(x, slopes_[j]) + intercepts_[j]);
    return best;
}

double MaxAffinePotential::value(const HVec& x) const { return affine_max(x) + constant_; }

std::size_t MaxAffinePotential::argmax(const HVec& x) const {
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < slopes_.size(); ++j) {
        const double v = inner(x, slopes_[j]) + intercepts_[j];
        if (v > best) {
            best = v;
            arg = j;
        }
    }
    return arg;
}

MaxAffinePotential& MaxAffinePotential::add_constant(double c) {
    constant_ += c;
    return *this;
}

MaxAffinePotential MaxAffinePotential::normalized_at(const HVec& anchor) const {
    MaxAffinePotential copy = *this;
    copy.constant_ = -affine_max(anchor);
    return copy;
}

Gradient grad(const MaxAffinePotential& psi, const HVec& x, double tie_tolerance) {
    std::vector<double> values(psi.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < psi.size(); ++j) {
        values[j] = inner(x, psi.slopes()[j]) + psi.intercepts()[j];
        best = std::max(best, values[j]);
    }
    Gradient g{HVec(), false, {}};
    for (std::size_t j = 0; j < psi.size(); ++j) {
        if (values[j] >= best - tie_tolerance) g.active.push_back(j);
    }
    g.value = psi.slopes()[g.active.front()];
    g.tie = g.active.size() > 1;
    return g;
}

std::vector<HVec> subdifferential(const MaxAffinePotential& psi, const HVec& x, double tie_tolerance) {
    std::vector<HVec> out;
    for (std::size_t j : grad(psi, x, tie_tolerance).active) out.push_back(psi.slopes()[j]);
    return out;
}

MaxAffinePotential potential_from_dual(const DualSolution& dual, const DiscreteMeasure& src,
                                       const DiscreteMeasure& tgt) {
    if (dual.u.size() != src.size() || dual.w.size() != tgt.size()) {
        throw InvalidInput("dual potentials do not match the instance");
    }
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < tgt.size(); ++j) {
            const double excess = dual.u[i] + dual.w[j] - squared_distance(src.point(i), tgt.point(j));
            if (excess > 1e-9) {
                throw InvalidInput("dual is infeasible at (" + std::to_string(i) + ", " + std::to_string(j) +
                                   "), excess " + std::to_string(excess));
            }
        }
    }
    // ||x - y||^2 - w = ||x||^2 - 2 (<x, y> + (w - ||y||^2) / 2)
    std::vector<double> intercepts(tgt.size());
    for (std::size_t j = 0; j < tgt.size(); ++j) intercepts[j] = 0.5 * (dual.w[j] - squared_norm(tgt.point(j)));
    return MaxAffinePotential(tgt.points(), std::move(intercepts));
}

std::vector<double> cell_masses(const MaxAffinePotential& psi, std::span<const HVec> points) {
    std::vector<double> mass(psi.size(), 0.0);
    if (points.empty()) return mass;
    for (const auto& x : points) mass[psi.argmax(x)] += 1.0;
    for (double& m : mass) m /= static_cast<double>(points.size());
    return mass;
}

}  // namespace monotone
