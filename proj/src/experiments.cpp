#include "monotone/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monotone/error.hpp"
#include "monotone/parallel.hpp"
#include "monotone/rng.hpp"
#include "monotone/stats.hpp"

namespace monotone {

namespace {

bool zero_spread(const MeasureSpec& spec) {
    if (const auto* g = std::get_if<GaussianSpec>(&spec)) return g->trace() == 0.0;
    if (const auto* c = std::get_if<CubeSpec>(&spec)) {
        return std::all_of(c->scales.begin(), c->scales.end(), [](double s) { return s == 0.0; });
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------

bool StabilityResult::all_directional() const {
    return !verdicts.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const StabilityVerdict& v) {
        return std::all_of(v.directional.begin(), v.directional.end(), [](bool b) { return b; });
    });
}

bool StabilityResult::all_norm() const {
    return !verdicts.empty() &&
           std::all_of(verdicts.begin(), verdicts.end(), [](const StabilityVerdict& v) { return v.norm; });
}

bool StabilityResult::all_potential() const {
    return !verdicts.empty() &&
           std::all_of(verdicts.begin(), verdicts.end(), [](const StabilityVerdict& v) { return v.potential; });
}

StabilityResult run_stability(const StabilityConfig& config, std::size_t threads) {
    validate(config.p);
    validate(config.q);
    const std::size_t d = dim(config.p);
    if (dim(config.q) != d) throw InvalidInput("stability: P and Q live in different dimensions");
    if (config.n_grid.empty() || config.reps == 0) throw InvalidInput("stability: empty n grid or zero reps");
    if (config.directions.empty()) throw InvalidInput("stability: no directions");
    for (const auto& h : config.directions) {
        if (h.dim() != d) throw InvalidInput("stability: direction of the wrong dimension");
    }
    if (support_bound(config.q) > config.bound) {
        throw InvalidInput("stability: supp(Q) exceeds the configured bound M");
    }

    const PopulationMap population = population_map(config.p, config.q, config.population);
    const std::vector<HVec> k_grid = config.k_set.grid(d, config.potential_grid);
    const HVec origin = HVec::zeros(d);
    std::vector<double> population_potential(k_grid.size());
    for (std::size_t g = 0; g < k_grid.size(); ++g) population_potential[g] = population.map.potential(k_grid[g]);

    struct Task {
        std::size_t n;
        std::size_t rep;
    };
    struct Outcome {
        GapSummary gaps;
        double potential_gap = 0.0;
        bool bound_ok = true;
    };
    std::vector<Task> tasks;
    for (std::size_t n : config.n_grid) {
        for (std::size_t r = 0; r < config.reps; ++r) tasks.push_back({n, r});
    }
    std::vector<Outcome> outcomes(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t t) {
        const auto [n, r] = tasks[t];
        const std::uint64_t rep_seed = config.seed + r;
        const DiscreteMeasure pn = discretize(config.p, n, derive_seed(rep_seed, n, 0), config.p_strategy).measure;
        const Discretization qn = discretize_reference(config.q, n, derive_seed(rep_seed, n, 1), config.strategy);
        const TransportPlan plan = solve_transport(pn, qn.measure);

        std::vector<HVec> xs, ys;
        for (const auto& e : plan.coupling.entries()) {
            xs.push_back(pn.point(e.i));
            ys.push_back(qn.measure.point(e.j));
        }
        Outcome& out = outcomes[t];
        out.gaps = sup_gaps(xs, ys, population.map, config.k_set, config.directions);
        out.bound_ok = qn.measure.max_norm() <= config.bound;

        const MaxAffinePotential psi_n = potential_from_dual(plan.dual, pn, qn.measure).normalized_at(origin);
        for (std::size_t g = 0; g < k_grid.size(); ++g) {
            out.potential_gap = std::max(out.potential_gap, std::abs(psi_n.value(k_grid[g]) - population_potential[g]));
        }
    });

    StabilityResult result;
    result.population_description = population.map.description;
    result.k_grid_points = k_grid.size();
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const Outcome& o = outcomes[t];
        for (std::size_t h = 0; h < config.directions.size(); ++h) {
            result.rows.push_back({tasks[t].n, config.seed + tasks[t].rep, h, o.gaps.directional[h], o.gaps.norm,
                                   o.potential_gap, o.gaps.points_in_k, o.bound_ok, o.gaps.points_in_k == 0});
        }
    }

    const auto [n_min, n_max] = std::minmax_element(config.n_grid.begin(), config.n_grid.end());
    auto find = [&](std::size_t n, std::size_t r) -> const Outcome& {
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            if (tasks[t].n == n && tasks[t].rep == r) return outcomes[t];
        }
        throw std::logic_error("stability: missing task");
    };
    for (std::size_t r = 0; r < config.reps; ++r) {
        const Outcome& lo = find(*n_min, r);
        const Outcome& hi = find(*n_max, r);
        const bool present = lo.gaps.points_in_k > 0 && hi.gaps.points_in_k > 0;
        StabilityVerdict v{config.seed + r, {}, present && hi.gaps.norm < lo.gaps.norm,
                           hi.potential_gap < lo.potential_gap};
        for (std::size_t h = 0; h < config.directions.size(); ++h) {
            v.directional.push_back(present && hi.gaps.directional[h] < lo.gaps.directional[h]);
        }
        result.verdicts.push_back(std::move(v));
    }
    return result;
}

// ---------------------------------------------------------------------------

double counterexample_a_t1_norm_sq(std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
        const double v = std::ldexp(1.0, static_cast<int>(i)) / static_cast<double>(i);
        s += v * v;
    }
    return s;
}

CounterexampleAResult run_counterexample_a(const CounterexampleAConfig& config) {
    const std::size_t d = config.dim;
    if (d == 0) throw InvalidInput("counterexample a: dim must be >= 1");
    if (config.n_grid.empty()) throw InvalidInput("counterexample a: empty n grid");
    HVec x = HVec::zeros(d);
    if (config.x) {
        if (config.x->dim() != d) throw InvalidInput("counterexample a: x has the wrong dimension");
        x = *config.x;
    } else {
        std::vector<double> c(d);
        for (std::size_t i = 1; i <= d; ++i) c[i - 1] = 1.0 / static_cast<double>(i);
        x = HVec(std::move(c));
    }
    const auto src = GaussianSpec::centered(d, Spectrum::geometric(1.0, 0.5));
    const HVec e_d = HVec::basis(d, d - 1);

    CounterexampleAResult result;
    for (std::size_t n : config.n_grid) {
        if (n == 0) throw InvalidInput("counterexample a: n must be >= 1");
        const double nn = static_cast<double>(n);
        const auto tgt = GaussianSpec::centered(d, Spectrum::geometric(1.0, 1.0 / (2.0 - 1.0 / nn)));
        const DiagonalMap t_n = gaussian_map(src, tgt);
        const double r_d = t_n.ratios()[d - 1];

        const HVec tx = t_n.apply(x);
        CounterexampleARow row{};
        row.n = n;
        row.fixed_gap = inner(e_d, tx - x);
        row.closed_form_gap = (std::pow(2.0 / (2.0 - 1.0 / nn), static_cast<double>(d)) - 1.0) / static_cast<double>(d);
        result.max_closed_form_error =
            std::max(result.max_closed_form_error, std::abs(row.fixed_gap - row.closed_form_gap));

        // Smallest move along e_d that pushes ||T_n(.)|| past n.
        double shift = 0.0;
        const double norm_sq = squared_norm(tx);
        if (norm_sq <= nn * nn) {
            const double a = tx[d - 1];
            shift = (std::sqrt(nn * nn - norm_sq + a * a) - a) / r_d;
        }
        HVec xm = x + shift * e_d;
        for (int guard = 0; guard < 64 && norm(t_n.apply(xm)) <= nn; ++guard) {
            shift = shift * (1.0 + 1e-12) + std::numeric_limits<double>::min();
            xm = x + shift * e_d;
        }
        const HVec txm = t_n.apply(xm);
        row.shift = shift;
        row.image_norm = norm(txm);
        row.reached = row.image_norm > nn;
        row.gap = inner(e_d, txm - xm);
        result.rows.push_back(row);
    }
    result.gap_increasing = true;
    for (std::size_t k = 1; k < result.rows.size(); ++k) {
        if (!(result.rows[k].gap > result.rows[k - 1].gap)) result.gap_increasing = false;
    }
    return result;
}

// ---------------------------------------------------------------------------

PiecewiseUniform::PiecewiseUniform(std::vector<std::pair<double, double>> intervals)
    : intervals_(std::move(intervals)) {
    for (const auto& [a, b] : intervals_) {
        if (!(b >= a)) throw InvalidInput("piecewise uniform: reversed interval");
    }
    std::erase_if(intervals_, [](const auto& iv) { return iv.second == iv.first; });
    if (intervals_.empty()) throw InvalidInput("piecewise uniform: no intervals");
    std::sort(intervals_.begin(), intervals_.end());
    for (std::size_t k = 0; k < intervals_.size(); ++k) {
        const auto [a, b] = intervals_[k];
        if (k > 0 && a < intervals_[k - 1].second) throw InvalidInput("piecewise uniform: overlapping intervals");
        total_ += b - a;
    }
}

double PiecewiseUniform::cdf(double x) const {
    double mass = 0.0;
    for (const auto& [a, b] : intervals_) mass += std::clamp(x, a, b) - a;
    return mass / total_;
}

std::pair<double, double> PiecewiseUniform::quantile_interval(double u) const {
    const double m = std::clamp(u, 0.0, 1.0) * total_;
    const double tol = 1e-12 * total_;
    double lo = upper(), hi = lower();
    double before = 0.0;
    bool found_lo = false;
    for (const auto& [a, b] : intervals_) {
        const double len = b - a;
        if (!found_lo && before + len >= m - tol) {
            lo = a + std::clamp(m - before, 0.0, len);
            found_lo = true;
        }
        if (before <= m + tol) hi = a + std::clamp(m - before, 0.0, len);
        before += len;
    }
    return {lo, std::max(lo, hi)};
}

std::pair<double, double> monotone_subdifferential(const PiecewiseUniform& src, const PiecewiseUniform& tgt,
                                                   double x) {
    if (x < src.lower()) {
        const double v = std::min(x, tgt.lower());
        return {v, v};
    }
    if (x > src.upper()) {
        const double v = std::max(x, tgt.upper());
        return {v, v};
    }
    return tgt.quantile_interval(src.cdf(x));
}

std::optional<std::pair<double, double>> printed_subdifferential(std::size_t n, double x) {
    const double inv = 1.0 / static_cast<double>(n);
    if (x < 1.0 || x > 2.0 + inv) return std::pair{x, x};
    if (x == 1.0) return std::pair{1.0, 2.0};
    if (x < 1.0 + inv) return std::pair{x + 1.0, x + 1.0};
    if (x <= 2.0) return std::pair{2.0 + inv, 2.0 + inv};
    return std::nullopt;
}

CounterexampleBResult run_counterexample_b(const CounterexampleBConfig& config) {
    if (config.n_grid.empty()) throw InvalidInput("counterexample b: empty n grid");
    const PiecewiseUniform q({{0.0, 1.0}, {2.0, 3.0}});
    CounterexampleBResult result;
    for (std::size_t n : config.n_grid) {
        if (n == 0) throw InvalidInput("counterexample b: n must be >= 1");
        const double inv = 1.0 / static_cast<double>(n);
        const PiecewiseUniform p_n({{0.0, 1.0 + inv}, {2.0 + inv, 3.0}});
        for (double probe : config.probes) {
            const auto [lo, hi] = monotone_subdifferential(p_n, q, probe);
            CounterexampleBRow row{};
            row.n = n;
            row.probe = probe;
            row.sub_lo = lo;
            row.sub_hi = hi;
            row.identity_gap = std::max(std::abs(lo - probe), std::abs(hi - probe));
            row.limit_value = monotone_subdifferential(q, q, probe).second;
            row.interior = (probe > 0.0 && probe < 1.0) || (probe > 2.0 && probe < 3.0);
            row.printed = printed_subdifferential(n, probe);
            row.matches_printed = row.printed && std::abs(row.printed->first - lo) <= 1e-12 &&
                                  std::abs(row.printed->second - hi) <= 1e-12;
            result.rows.push_back(row);
        }
        // Nondecreasing: every element of the subdifferential at a point is
        // below every element at the next grid point.
        const std::size_t g = std::max<std::size_t>(config.monotone_grid, 2);
        double prev_hi = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < g; ++k) {
            const double x = -0.5 + 4.0 * static_cast<double>(k) / static_cast<double>(g - 1);
            const auto [lo, hi] = monotone_subdifferential(p_n, q, x);
            if (lo < prev_hi - 1e-12 || hi < lo) result.monotone = false;
            prev_hi = hi;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

Sigma2Estimate sigma2_formula(const MaxAffinePotential& psi, const MeasureSpec& p, std::size_t mc_n,
                              std::uint64_t seed) {
    if (mc_n < 2) throw InvalidInput("sigma2_formula: need at least two draws");
    if (dim(p) != psi.dim()) throw InvalidInput("sigma2_formula: dimension mismatch");
    const auto xs = sample(p, mc_n, seed);
    std::vector<double> v(mc_n);
    for (std::size_t k = 0; k < mc_n; ++k) v[k] = squared_norm(xs[k]) - 2.0 * psi.affine_max(xs[k]);
    const double mu = stats::mean(v);
    double m2 = 0.0, m4 = 0.0;
    for (double t : v) {
        const double c = (t - mu) * (t - mu);
        m2 += c;
        m4 += c * c;
    }
    const double n = static_cast<double>(mc_n);
    m2 /= n;
    m4 /= n;
    return {m2, std::sqrt(std::max(0.0, m4 - m2 * m2) / n)};
}

CltReport run_clt(const CltConfig& config, std::size_t threads) {
    validate(config.p);
    validate(config.q);
    if (dim(config.p) != dim(config.q)) throw InvalidInput("clt: P and Q live in different dimensions");
    if (config.n == 0 || config.reps < 2) throw InvalidInput("clt: need n >= 1 and reps >= 2");
    if (!std::isfinite(support_bound(config.q))) throw InvalidInput("clt: Q must be boundedly supported");

    const Discretization q = discretize(config.q, config.q_atoms, derive_seed(config.seed, 0, 1));
    CltReport report;
    report.q_points = q.measure.points();
    report.q_weights = q.measure.weights();
    report.degenerate = zero_spread(config.p);

    if (!report.degenerate) {
        SemiDiscreteOptions solver = config.solver;
        solver.seed = derive_seed(config.seed, 0, 2);
        const SemiDiscreteResult fit = semidiscrete_solve(config.p, q.measure, solver);
        report.semidiscrete_mismatch = fit.mismatch;
        const Sigma2Estimate s2 = sigma2_formula(fit.potential, config.p, config.mc_n, derive_seed(config.seed, 0, 3));
        report.sigma2_formula = s2.value;
        report.sigma2_formula_se = s2.standard_error;
    }

    report.costs.assign(config.reps, 0.0);
    parallel_for(config.reps, threads, [&](std::size_t r) {
        const DiscreteMeasure pn = empirical(sample(config.p, config.n, config.seed + r));
        report.costs[r] = solve_transport(pn, q.measure).coupling.cost();
    });

    report.mean_cost = stats::mean(report.costs);
    const double root_n = std::sqrt(static_cast<double>(config.n));
    report.statistics.reserve(config.reps);
    for (double c : report.costs) report.statistics.push_back(root_n * (c - report.mean_cost));
    report.sigma2_empirical = stats::sample_variance(report.statistics);
    report.sigma2_empirical_se =
        stats::bootstrap_variance_se(report.statistics, config.bootstrap, derive_seed(config.seed, 0, 4));
    if (report.sigma2_formula > 0.0) {
        report.variance_ratio = report.sigma2_empirical / report.sigma2_formula;
        const double sd = std::sqrt(report.sigma2_formula);
        std::vector<double> z;
        z.reserve(report.statistics.size());
        for (double s : report.statistics) z.push_back(s / sd);
        report.ks_to_normal = stats::ks_distance(std::move(z), stats::normal_cdf);
    } else {
        // A constant statistic sits at 0, where the normal CDF is 1/2.
        report.ks_to_normal = stats::ks_distance(report.statistics, stats::normal_cdf);
    }
    return report;
}

}  // namespace monotone
