#include <limits>

#include "monotone/error.hpp"
#include "monotone/ot.hpp"

namespace monotone {

LinearAssignment solve_linear_assignment(const CostMatrix& cost) {
    const std::size_t n = cost.rows;
    if (n == 0 || cost.cols != n) throw InvalidInput("assignment needs a non-empty square cost matrix");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // 1-based arrays; column 0 is the virtual start of each augmenting path.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t i0 = match[col0];
            const double* crow = &cost.data[(i0 - 1) * n];
            double delta = kInf;
            std::size_t col1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = crow[j - 1] - u[i0] - v[j];
                if (reduced < minv[j]) {
                    minv[j] = reduced;
                    way[j] = col0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    LinearAssignment result;
    result.row_to_col.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) result.row_to_col[match[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) result.total_cost += cost(i, result.row_to_col[i]);
    result.row_potential.assign(u.begin() + 1, u.end());
    result.col_potential.assign(v.begin() + 1, v.end());
    return result;
}

Coupling solve_assignment(std::span<const HVec> xs, std::span<const HVec> ys) {
    if (xs.size() != ys.size()) {
        throw InvalidInput("assignment needs equal sizes, got " + std::to_string(xs.size()) + " and " +
                           std::to_string(ys.size()));
    }
    if (xs.empty()) throw InvalidInput("assignment needs at least one point");
    const std::size_t n = xs.size();
    DiscreteMeasure src = empirical(std::vector<HVec>(xs.begin(), xs.end()));
    DiscreteMeasure tgt = empirical(std::vector<HVec>(ys.begin(), ys.end()));
    if (src.size() != n || tgt.size() != n) throw InvalidInput("assignment needs distinct points within each list");

    const LinearAssignment la = solve_linear_assignment(squared_distance_matrix(xs, ys));
    std::vector<CouplingEntry> entries;
    entries.reserve(n);
    const double mass = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) entries.push_back({i, la.row_to_col[i], mass});
    return Coupling(std::move(src), std::move(tgt), std::move(entries));
}

}  // namespace monotone
