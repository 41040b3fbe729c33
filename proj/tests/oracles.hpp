#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "monotone/hilbert.hpp"

namespace oracle {

inline double sqdist(const monotone::HVec& a, const monotone::HVec& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

/// Minimum average cost over all permutations, by enumeration.
inline double brute_force_assignment(const std::vector<monotone::HVec>& xs, const std::vector<monotone::HVec>& ys,
                                     std::vector<std::size_t>* best_perm = nullptr) {
    std::vector<std::size_t> perm(xs.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) c += sqdist(xs[i], ys[perm[i]]);
        if (c < best) {
            best = c;
            if (best_perm) *best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / xs.size();
}

}  // namespace oracle
