#include <algorithm>
#include <cmath>
#include <sstream>

#include "monotone/error.hpp"
#include "monotone/ot.hpp"

namespace monotone {

namespace {

// Training batch t draws from seed + t + 1; the validation sample sits far
// away from that range.
constexpr std::uint64_t kValidationOffset = 1ull << 40;

MaxAffinePotential potential_for(const DiscreteMeasure& tgt, const std::vector<double>& w) {
    std::vector<double> intercepts(tgt.size());
    for (std::size_t j = 0; j < tgt.size(); ++j) intercepts[j] = 0.5 * (w[j] - squared_norm(tgt.point(j)));
    return MaxAffinePotential(tgt.points(), std::move(intercepts));
}

double max_mismatch(const std::vector<double>& masses, const DiscreteMeasure& tgt) {
    double worst = 0.0;
    for (std::size_t j = 0; j < tgt.size(); ++j) worst = std::max(worst, std::abs(masses[j] - tgt.weight(j)));
    return worst;
}

}  // namespace

SemiDiscreteResult semidiscrete_solve(const MeasureSpec& src, const DiscreteMeasure& tgt,
                                      const SemiDiscreteOptions& options) {
    validate(src);
    if (dim(src) != tgt.dim()) throw InvalidInput("semi-discrete source and target dimensions differ");
    if (options.batch == 0 || options.check_every == 0 || options.validation == 0) {
        throw InvalidInput("batch, check_every and validation must be positive");
    }
    if (!(options.step > 0.0) || !(options.tol > 0.0)) throw InvalidInput("step and tol must be positive");
    const HVec anchor = options.anchor.value_or(HVec::zeros(tgt.dim()));

    const std::size_t m = tgt.size();
    const std::vector<HVec> validation = sample(src, options.validation, options.seed + kValidationOffset);

    std::vector<double> w(m, 0.0);
    // Iterate sums per check window; the estimate at a check averages the
    // most recent half of the windows.
    std::vector<std::vector<double>> window_sums;
    std::vector<double> current(m, 0.0);
    std::vector<double> averaged = w;
    std::vector<double> counts(m);

    auto evaluate = [&](const std::vector<double>& weights, std::vector<double>& masses) {
        masses = cell_masses(potential_for(tgt, weights), validation);
        return max_mismatch(masses, tgt);
    };

    std::vector<double> masses;
    double mismatch = evaluate(w, masses);
    std::size_t t = 0;
    while (mismatch > options.tol) {
        if (t >= options.iters) {
            std::ostringstream os;
            os << "semi-discrete ascent did not reach tol " << options.tol << " in " << options.iters
               << " iterations (mismatch " << mismatch << ")";
            throw ConvergenceError(os.str(), mismatch);
        }
        const std::vector<HVec> batch =
            sample(src, options.batch, options.seed + static_cast<std::uint64_t>(t) + 1);
        const MaxAffinePotential psi = potential_for(tgt, w);
        std::fill(counts.begin(), counts.end(), 0.0);
        for (const auto& x : batch) counts[psi.argmax(x)] += 1.0;
        ++t;
        const double step = options.step / std::pow(static_cast<double>(t), options.step_exponent);
        for (std::size_t j = 0; j < m; ++j) {
            w[j] += step * (tgt.weight(j) - counts[j] / static_cast<double>(options.batch));
            current[j] += w[j];
        }
        if (t % options.check_every == 0) {
            window_sums.push_back(current);
            std::fill(current.begin(), current.end(), 0.0);
            const std::size_t windows = window_sums.size();
            const std::size_t first = windows / 2;
            std::fill(averaged.begin(), averaged.end(), 0.0);
            for (std::size_t k = first; k < windows; ++k) {
                for (std::size_t j = 0; j < m; ++j) averaged[j] += window_sums[k][j];
            }
            const double count = static_cast<double>((windows - first) * options.check_every);
            for (double& a : averaged) a /= count;
            mismatch = evaluate(averaged, masses);
        }
    }

    const std::vector<double>& final_w = t == 0 ? w : averaged;
    MaxAffinePotential psi = potential_for(tgt, final_w).normalized_at(anchor);
    return SemiDiscreteResult{std::move(psi), final_w, std::move(masses), mismatch, t};
}

}  // namespace monotone
