#include <algorithm>
#include <cmath>

#include "monotone/error.hpp"
#include "monotone/ot.hpp"

namespace monotone {

double CostMatrix::max_entry() const {
    double m = 0.0;
    for (double c : data) m = std::max(m, c);
    return m;
}

CostMatrix squared_distance_matrix(std::span<const HVec> xs, std::span<const HVec> ys) {
    CostMatrix c{xs.size(), ys.size(), std::vector<double>(xs.size() * ys.size())};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) c.data[i * c.cols + j] = squared_distance(xs[i], ys[j]);
    }
    return c;
}

Coupling::Coupling(DiscreteMeasure src, DiscreteMeasure tgt, std::vector<CouplingEntry> entries)
    : src_(std::move(src)), tgt_(std::move(tgt)), entries_(std::move(entries)), cost_(0.0) {
    if (src_.dim() != tgt_.dim()) throw InvalidInput("coupling marginals live in different dimensions");
    for (const auto& e : entries_) {
        if (e.i >= src_.size() || e.j >= tgt_.size()) throw InvalidInput("coupling entry index out of range");
        if (!(e.mass > 0.0) || !std::isfinite(e.mass)) throw InvalidInput("coupling masses must be positive");
        cost_ += e.mass * squared_distance(src_.point(e.i), tgt_.point(e.j));
    }
}

double Coupling::marginal_error() const {
    std::vector<double> rows(src_.size(), 0.0), cols(tgt_.size(), 0.0);
    for (const auto& e : entries_) {
        rows[e.i] += e.mass;
        cols[e.j] += e.mass;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) err = std::max(err, std::abs(rows[i] - src_.weight(i)));
    for (std::size_t j = 0; j < cols.size(); ++j) err = std::max(err, std::abs(cols[j] - tgt_.weight(j)));
    return err;
}

std::vector<std::pair<std::size_t, std::size_t>> Coupling::support() const {
    std::vector<std::pair<std::size_t, std::size_t>> s;
    s.reserve(entries_.size());
    for (const auto& e : entries_) s.emplace_back(e.i, e.j);
    std::sort(s.begin(), s.end());
    return s;
}

DualCheck check_dual(const Coupling& coupling, const DualSolution& dual) {
    const auto& src = coupling.src();
    const auto& tgt = coupling.tgt();
    if (dual.u.size() != src.size() || dual.w.size() != tgt.size()) {
        throw InvalidInput("dual potentials do not match the coupling marginals");
    }
    DualCheck check{0.0, 0.0};
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < tgt.size(); ++j) {
            const double excess = dual.u[i] + dual.w[j] - squared_distance(src.point(i), tgt.point(j));
            check.max_infeasibility = std::max(check.max_infeasibility, excess);
        }
    }
    for (const auto& e : coupling.entries()) {
        const double gap = squared_distance(src.point(e.i), tgt.point(e.j)) - dual.u[e.i] - dual.w[e.j];
        check.max_slackness = std::max(check.max_slackness, std::abs(gap));
    }
    return check;
}

}  // namespace monotone
