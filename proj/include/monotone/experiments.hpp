#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monotone/hilbert.hpp"
#include "monotone/maps.hpp"
#include "monotone/measures.hpp"
#include "monotone/ot.hpp"
#include "monotone/ranks.hpp"

namespace monotone {

// ---------------------------------------------------------------------------
// Stability of the subdifferentials and potentials

struct StabilityConfig {
    MeasureSpec p;                   // source; P_n is an n-atom discretization (iid sample by default)
    MeasureSpec q;                   // bounded reference; Q_n is an n-atom discretization
    std::vector<std::size_t> n_grid;
    std::size_t reps = 5;
    CompactSet k_set;
    std::vector<HVec> directions;
    std::uint64_t seed = 0;
    double bound = 1.0;              // common support bound M for Q and Q_n
    DiscretizationStrategy strategy = DiscretizationStrategy::SeededIid;    // for Q_n
    DiscretizationStrategy p_strategy = DiscretizationStrategy::SeededIid;  // for P_n
    std::size_t potential_grid = 5;  // grid levels per axis for the potential gap
    PopulationOptions population;
};

struct StabilityRow {
    std::size_t n;
    std::uint64_t seed;
    std::size_t direction_index;
    double gap;             // sup over support pairs in K of |<y - grad psi(x), h>|
    double norm_gap;        // sup over support pairs in K of ||y - grad psi(x)||
    double potential_gap;   // sup over the K grid of |psi_n - psi|, both vanishing at 0
    std::size_t points_in_k;
    bool bound_ok;          // every atom of Q_n has norm <= M
    bool missing;           // no support point fell in K
};

struct StabilityVerdict {
    std::uint64_t seed;
    std::vector<bool> directional;  // gap(n_max) < gap(n_min), per direction
    bool norm;
    bool potential;
};

struct StabilityResult {
    std::vector<StabilityRow> rows;
    std::vector<StabilityVerdict> verdicts;
    std::string population_description;
    std::size_t k_grid_points = 0;

    bool all_directional() const;
    bool all_norm() const;
    bool all_potential() const;
};

StabilityResult run_stability(const StabilityConfig& config, std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Unbounded targets: T_n = gaussian_map(2^-i, (2 - 1/n)^-i)

struct CounterexampleAConfig {
    std::size_t dim = 12;
    std::vector<std::size_t> n_grid{2, 4, 8, 16};
    std::optional<HVec> x;  // default sum_i (1/i) e_i
};

struct CounterexampleARow {
    std::size_t n;
    double fixed_gap;          // <e_d, T_n(x) - x>
    double closed_form_gap;    // ((2 / (2 - 1/n))^d - 1) / d
    double shift;              // ||x_m(n) - x||, x_m(n) = x + shift e_d
    double image_norm;         // ||T_n(x_m(n))|| (> n)
    double gap;                // <e_d, T_n(x_m(n)) - x_m(n)>
    bool reached;              // ||T_n(x_m(n))|| > n was attained
};

struct CounterexampleAResult {
    std::vector<CounterexampleARow> rows;
    double max_closed_form_error = 0.0;
    bool gap_increasing = false;
};

/// ||T_1(x)||^2 for x = sum_i (1/i) e_i by direct summation of (2^i / i)^2.
double counterexample_a_t1_norm_sq(std::size_t dim);

CounterexampleAResult run_counterexample_a(const CounterexampleAConfig& config);

// ---------------------------------------------------------------------------
// Boundary counterexample on the real line

/// Uniform law on a finite union of disjoint open intervals. Empty intervals
/// carry no mass and are dropped.
class PiecewiseUniform {
public:
    explicit PiecewiseUniform(std::vector<std::pair<double, double>> intervals);

    double cdf(double x) const;
    /// [inf{y : F(y) >= u}, sup{y : F(y) <= u}] for u in (0, 1).
    std::pair<double, double> quantile_interval(double u) const;
    double lower() const { return intervals_.front().first; }
    double upper() const { return intervals_.back().second; }

private:
    std::vector<std::pair<double, double>> intervals_;
    double total_ = 0.0;
};

/// Subdifferential [lo, hi] at x of the monotone map pushing src to tgt:
/// the quantile interval of tgt at level F_src(x) inside the support hull of
/// src. Outside it the map is min(x, lower of tgt) on the left and
/// max(x, upper of tgt) on the right, which is {x} when the hulls agree.
std::pair<double, double> monotone_subdifferential(const PiecewiseUniform& src, const PiecewiseUniform& tgt, double x);

/// The printed piecewise formula, reading its second case as x in (1, 1 + 1/n).
/// Empty where the printed cases do not cover x.
std::optional<std::pair<double, double>> printed_subdifferential(std::size_t n, double x);

struct CounterexampleBConfig {
    std::vector<std::size_t> n_grid{1, 2, 4, 8, 16, 32, 64};
    std::vector<double> probes{0.5, 1.0, 1.0 + 1e-9, 1.5, 2.5, 2.9};
    std::size_t monotone_grid = 1000;
};

struct CounterexampleBRow {
    std::size_t n;
    double probe;
    double sub_lo;
    double sub_hi;
    double identity_gap;    // max |y - x| over the subdifferential
    double limit_value;     // upper end of the subdifferential in the n -> infinity construction
    bool interior;          // probe in the interior of the limiting support
    std::optional<std::pair<double, double>> printed;
    bool matches_printed;
};

struct CounterexampleBResult {
    std::vector<CounterexampleBRow> rows;
    bool monotone = true;   // map nondecreasing on the check grid for every n
};

CounterexampleBResult run_counterexample_b(const CounterexampleBConfig& config);

// ---------------------------------------------------------------------------
// Central limit theorem for the empirical transport cost

struct Sigma2Estimate {
    double value;
    double standard_error;
};

/// Monte Carlo variance of ||X||^2 - 2 psi(X), X ~ P. Uses psi.affine_max(),
/// so potentials differing only in their additive constant give identical output.
Sigma2Estimate sigma2_formula(const MaxAffinePotential& psi, const MeasureSpec& p, std::size_t mc_n,
                              std::uint64_t seed);

struct CltConfig {
    MeasureSpec p;
    MeasureSpec q;               // bounded; discretized with q_atoms seeded atoms
    std::size_t q_atoms = 16;
    std::size_t n = 400;
    std::size_t reps = 1000;
    std::uint64_t seed = 0;
    std::size_t mc_n = 1000000;
    SemiDiscreteOptions solver;
    std::size_t bootstrap = 200;
};

struct CltReport {
    std::vector<double> costs;       // T_2(P_n, Q) per replication
    std::vector<double> statistics;  // sqrt(n) (cost - mean over reps)
    double mean_cost = 0.0;
    double sigma2_formula = 0.0;
    double sigma2_formula_se = 0.0;
    double sigma2_empirical = 0.0;
    double sigma2_empirical_se = 0.0;  // bootstrap
    double variance_ratio = 0.0;       // empirical / formula
    double ks_to_normal = 1.0;
    bool degenerate = false;
    double semidiscrete_mismatch = 0.0;
    std::vector<HVec> q_points;
    std::vector<double> q_weights;
};

CltReport run_clt(const CltConfig& config, std::size_t threads = 1);

}  // namespace monotone
