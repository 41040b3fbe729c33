#include "monotone/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "monotone/error.hpp"
#include "monotone/parallel.hpp"
#include "monotone/rng.hpp"

namespace monotone {

bool CompactSet::contains(const HVec& x) const {
    if (squared_norm(x) > radius * radius) return false;
    if (!box_half_widths.empty()) {
        if (box_half_widths.size() != x.dim()) throw InvalidInput("compact set box has the wrong dimension");
        for (std::size_t k = 0; k < x.dim(); ++k) {
            if (std::abs(x[k]) > box_half_widths[k]) return false;
        }
    }
    return true;
}

std::vector<HVec> CompactSet::grid(std::size_t dim, std::size_t per_axis) const {
    if (dim == 0 || per_axis == 0) throw InvalidInput("compact set grid needs dim >= 1 and per_axis >= 1");
    if (!box_half_widths.empty() && box_half_widths.size() != dim) {
        throw InvalidInput("compact set box has the wrong dimension");
    }
    std::vector<double> half(dim, radius);
    for (std::size_t k = 0; k < box_half_widths.size(); ++k) half[k] = std::min(half[k], box_half_widths[k]);

    auto level = [&](std::size_t k, std::size_t idx) {
        if (per_axis == 1) return 0.0;
        return -half[k] + 2.0 * half[k] * static_cast<double>(idx) / static_cast<double>(per_axis - 1);
    };
    std::vector<HVec> out;
    std::vector<std::size_t> idx(dim, 0);
    for (;;) {
        std::vector<double> x(dim);
        for (std::size_t k = 0; k < dim; ++k) x[k] = level(k, idx[k]);
        HVec p(std::move(x));
        if (contains(p)) out.push_back(std::move(p));
        std::size_t k = 0;
        while (k < dim && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == dim) break;
    }
    return out;
}

RankMap fit_rank(const std::vector<HVec>& data, const DiscreteMeasure& reference, ReferenceMeta meta) {
    if (data.size() != reference.size()) {
        throw InvalidInput("fit_rank: " + std::to_string(data.size()) + " data points but " +
                           std::to_string(reference.size()) + " reference atoms");
    }
    if (!reference.uniform_weights()) throw InvalidInput("fit_rank: reference weights must be uniform");
    const Coupling c = solve_assignment(data, reference.points());
    RankMap rank{data, std::vector<HVec>(data.size(), reference.point(0)), std::vector<std::size_t>(data.size()),
                 meta};
    // solve_assignment keeps input order (inputs are distinct), so atom i is data[i].
    for (const auto& e : c.entries()) {
        rank.assignment[e.i] = e.j;
        rank.ranks[e.i] = reference.point(e.j);
    }
    if (meta.bound == 0.0) rank.reference_meta.bound = reference.max_norm();
    return rank;
}

RankMap fit_rank(const std::vector<HVec>& data, const Discretization& reference) {
    return fit_rank(data, reference.measure, ReferenceMeta{reference.strategy, reference.seed, reference.bound});
}

bool pushforward_matches(const RankMap& rank, const DiscreteMeasure& reference) {
    if (rank.ranks.size() != reference.size()) return false;
    std::vector<bool> used(reference.size(), false);
    for (std::size_t k = 0; k < rank.ranks.size(); ++k) {
        const std::size_t j = rank.assignment[k];
        if (j >= reference.size() || used[j] || !(rank.ranks[k] == reference.point(j))) return false;
        used[j] = true;
    }
    return std::all_of(used.begin(), used.end(), [](bool u) { return u; });
}

MonotonicityCertificate certify(const RankMap& rank, const CertifyOptions& options) {
    return certify_cyclic_monotonicity(rank.data_points, rank.ranks, options);
}

// ---------------------------------------------------------------------------

CurveTable parse_curve_csv(const std::string& text) {
    CurveTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_grid = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidInput("curve csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
            }
        }
        if (!have_grid) {
            table.grid = std::move(row);
            have_grid = true;
            continue;
        }
        if (row.size() != table.grid.size()) {
            throw InvalidInput("curve csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(table.grid.size()) + " values");
        }
        table.curves.push_back(std::move(row));
    }
    if (table.grid.size() < 2) throw InvalidInput("curve csv: grid needs at least two points");
    for (std::size_t k = 1; k < table.grid.size(); ++k) {
        if (!(table.grid[k] > table.grid[k - 1])) throw InvalidInput("curve csv: grid must be strictly increasing");
    }
    return table;
}

CurveTable read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open curve file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_curve_csv(buf.str());
}

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    const double span = grid.back() - grid.front();
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double h = (grid[k + 1] - grid[k]) / span;
        w[k] += h / 2;
        w[k + 1] += h / 2;
    }
    return w;
}

double cosine_basis(std::size_t k, double t) {
    if (k == 0) return 1.0;
    return std::numbers::sqrt2 * std::cos(static_cast<double>(k) * std::numbers::pi * t);
}

std::vector<HVec> project_curves(const CurveTable& table, std::size_t basis_size, std::vector<double> weights) {
    if (basis_size == 0) throw InvalidInput("basis size must be >= 1");
    if (weights.empty()) weights = trapezoid_weights(table.grid);
    if (weights.size() != table.grid.size()) throw InvalidInput("quadrature weights do not match the grid");
    const double t0 = table.grid.front();
    const double span = table.grid.back() - t0;
    std::vector<std::vector<double>> basis(basis_size, std::vector<double>(table.grid.size()));
    for (std::size_t k = 0; k < basis_size; ++k) {
        for (std::size_t g = 0; g < table.grid.size(); ++g) {
            basis[k][g] = weights[g] * cosine_basis(k, (table.grid[g] - t0) / span);
        }
    }
    std::vector<HVec> out;
    out.reserve(table.curves.size());
    for (const auto& curve : table.curves) {
        std::vector<double> c(basis_size, 0.0);
        for (std::size_t k = 0; k < basis_size; ++k) {
            for (std::size_t g = 0; g < curve.size(); ++g) c[k] += basis[k][g] * curve[g];
        }
        out.emplace_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------

GapSummary sup_gaps(const std::vector<HVec>& xs, const std::vector<HVec>& ys, const ConvexMap& population,
                    const CompactSet& k_set, const std::vector<HVec>& directions) {
    GapSummary s;
    s.directional.assign(directions.size(), 0.0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!k_set.contains(xs[k])) continue;
        ++s.points_in_k;
        const HVec diff = ys[k] - population.gradient(xs[k]);
        s.norm = std::max(s.norm, norm(diff));
        for (std::size_t h = 0; h < directions.size(); ++h) {
            s.directional[h] = std::max(s.directional[h], std::abs(inner(diff, directions[h])));
        }
    }
    return s;
}

LocalGcResult local_gc_experiment(const LocalGcConfig& config, std::size_t threads) {
    validate(config.data);
    validate(config.reference);
    if (config.n_grid.empty() || config.reps == 0) throw InvalidInput("local GC: empty n grid or zero reps");
    const std::size_t d = dim(config.data);
    for (const auto& h : config.directions) {
        if (h.dim() != d) throw InvalidInput("local GC: direction of the wrong dimension");
    }
    const PopulationMap population = population_map(config.data, config.reference, config.population);

    struct Task {
        std::size_t n;
        std::size_t rep;
    };
    std::vector<Task> tasks;
    for (std::size_t n : config.n_grid) {
        for (std::size_t r = 0; r < config.reps; ++r) tasks.push_back({n, r});
    }
    std::vector<GapSummary> results(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t t) {
        const auto [n, r] = tasks[t];
        const std::uint64_t rep_seed = config.seed + r;
        const auto data = sample(config.data, n, derive_seed(rep_seed, n, 0));
        const auto ref = discretize(config.reference, n, derive_seed(rep_seed, n, 1), config.strategy);
        const RankMap rank = fit_rank(data, ref);
        results[t] = sup_gaps(rank.data_points, rank.ranks, population.map, config.k_set, config.directions);
    });

    LocalGcResult out;
    out.population_description = population.map.description;
    out.closed_form = population.closed_form;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        for (std::size_t h = 0; h < config.directions.size(); ++h) {
            out.rows.push_back({tasks[t].n, config.seed + tasks[t].rep, h, results[t].directional[h],
                                results[t].norm, results[t].points_in_k});
        }
    }
    return out;
}

}  // namespace monotone
