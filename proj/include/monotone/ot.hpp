#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "monotone/hilbert.hpp"
#include "monotone/measures.hpp"

namespace monotone {

/// Dense row-major matrix of squared distances ||x_i - y_j||^2.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double max_entry() const;
};

CostMatrix squared_distance_matrix(std::span<const HVec> xs, std::span<const HVec> ys);

struct CouplingEntry {
    std::size_t i;  // source atom
    std::size_t j;  // target atom
    double mass;

    friend bool operator==(const CouplingEntry&, const CouplingEntry&) = default;
};

/// Sparse transport plan between two discrete measures for the cost ||x - y||^2.
class Coupling {
public:
    Coupling(DiscreteMeasure src, DiscreteMeasure tgt, std::vector<CouplingEntry> entries);

    const DiscreteMeasure& src() const noexcept { return src_; }
    const DiscreteMeasure& tgt() const noexcept { return tgt_; }
    const std::vector<CouplingEntry>& entries() const noexcept { return entries_; }
    /// sum of mass * ||x_i - y_j||^2
    double cost() const noexcept { return cost_; }

    /// Largest deviation of a row or column sum from its marginal weight.
    double marginal_error() const;
    /// Support pairs (i, j), sorted.
    std::vector<std::pair<std::size_t, std::size_t>> support() const;

private:
    DiscreteMeasure src_;
    DiscreteMeasure tgt_;
    std::vector<CouplingEntry> entries_;
    double cost_;
};

/// Kantorovich dual potentials: u_i + w_j <= ||x_i - y_j||^2.
struct DualSolution {
    std::vector<double> u;
    std::vector<double> w;
};

struct DualCheck {
    double max_infeasibility;  // max over (i, j) of u_i + w_j - c_ij, clipped at 0
    double max_slackness;      // max over support pairs of |c_ij - u_i - w_j|
};

DualCheck check_dual(const Coupling& coupling, const DualSolution& dual);

/// Square linear assignment with row/column potentials.
struct LinearAssignment {
    std::vector<std::size_t> row_to_col;
    double total_cost = 0.0;
    std::vector<double> row_potential;
    std::vector<double> col_potential;
};

/// Shortest-augmenting-path Hungarian method, O(n^3). Ties go to the lowest
/// column index.
LinearAssignment solve_linear_assignment(const CostMatrix& cost);

/// Optimal permutation coupling (mass 1/n per pair) between two equal-size
/// point lists. Points within each list must be distinct.
Coupling solve_assignment(std::span<const HVec> xs, std::span<const HVec> ys);

struct TransportOptions {
    std::size_t max_pivots = 0;  // 0: 50 * (n + m) * (n + m) + 10000
};

struct TransportPlan {
    Coupling coupling;
    DualSolution dual;
    std::size_t pivots = 0;
};

/// Exact transportation simplex (network simplex on the complete bipartite
/// graph with a strongly feasible spanning tree). Throws SolverError carrying
/// the instance when the pivot budget runs out.
TransportPlan solve_transport(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                              const TransportOptions& options = {});

// ---------------------------------------------------------------------------
// Cyclical monotonicity

enum class CertificationMode { Exhaustive, Sampled };

struct CertifyOptions {
    std::size_t max_cycle_len = 5;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t budget = 100000;   // exhaustive when the cycle count fits
    double tolerance = 1e-9;
};

struct MonotonicityCertificate {
    CertificationMode mode;
    double max_violation;                        // largest cyclic sum seen
    std::optional<std::vector<std::size_t>> witness;  // pair indices of the worst positive cycle
    std::uint64_t cycles_checked;

    bool passed() const noexcept { return !witness.has_value(); }
};

/// Number of cycles of length 2..max_len over `pairs` distinct pairs
/// (sum of C(pairs, k) (k-1)!), saturating at UINT64_MAX.
std::uint64_t cycle_count(std::size_t pairs, std::size_t max_len);

/// Evaluates sum_k <x_k, y_{k+1} - y_k> (y_{K+1} = y_1) over cycles drawn from
/// the pairs (xs[p], ys[p]).
MonotonicityCertificate certify_cyclic_monotonicity(std::span<const HVec> xs, std::span<const HVec> ys,
                                                    const CertifyOptions& options = {});

/// Certification of the support of a coupling; witness indices refer to
/// coupling.entries().
MonotonicityCertificate certify_cyclic_monotonicity(const Coupling& coupling,
                                                    const CertifyOptions& options = {});

/// Moves the largest admissible mass around the cycle, replacing (x_k, y_k)
/// with (x_k, y_{k+1}). Lowers the cost by 2 * mass * cyclic sum.
Coupling apply_cycle_swap(const Coupling& coupling, std::span<const std::size_t> cycle);

// ---------------------------------------------------------------------------
// Potentials

/// psi(x) = max_j { <x, y_j> + b_j } + constant. The constant is kept apart
/// from the intercepts so that normalizations never perturb them.
class MaxAffinePotential {
public:
    MaxAffinePotential(std::vector<HVec> slopes, std::vector<double> intercepts, double constant = 0.0);

    std::size_t size() const noexcept { return slopes_.size(); }
    std::size_t dim() const noexcept { return slopes_.front().dim(); }
    const std::vector<HVec>& slopes() const noexcept { return slopes_; }
    const std::vector<double>& intercepts() const noexcept { return intercepts_; }
    double constant() const noexcept { return constant_; }

    double value(const HVec& x) const;
    /// max_j { <x, y_j> + b_j }, i.e. value() without the additive constant.
    double affine_max(const HVec& x) const;
    /// Lowest index attaining the maximum.
    std::size_t argmax(const HVec& x) const;

    /// Same as adding c to every intercept.
    MaxAffinePotential& add_constant(double c);
    /// Copy shifted so that value(anchor) == 0.
    MaxAffinePotential normalized_at(const HVec& anchor) const;

private:
    std::vector<HVec> slopes_;
    std::vector<double> intercepts_;
    double constant_;
};

struct Gradient {
    HVec value;                        // slope of the lowest attaining piece
    bool tie;                          // another piece within the tolerance
    std::vector<std::size_t> active;   // indices of all attaining pieces
};

Gradient grad(const MaxAffinePotential& psi, const HVec& x, double tie_tolerance = 1e-9);

/// Extreme points of the subdifferential at x (slopes of attaining pieces).
std::vector<HVec> subdifferential(const MaxAffinePotential& psi, const HVec& x, double tie_tolerance = 1e-9);

/// psi with slopes y_j and intercepts (w_j - ||y_j||^2) / 2. Throws
/// InvalidInput when the dual violates u_i + w_j <= ||x_i - y_j||^2 by more
/// than 1e-9.
MaxAffinePotential potential_from_dual(const DualSolution& dual, const DiscreteMeasure& src,
                                       const DiscreteMeasure& tgt);

// ---------------------------------------------------------------------------
// Semi-discrete transport

struct SemiDiscreteOptions {
    std::size_t batch = 1000;
    std::size_t iters = 20000;
    double step = 1.0;             // step_t = step / t^step_exponent
    double step_exponent = 0.5;
    std::uint64_t seed = 0;
    double tol = 0.005;
    std::size_t validation = 100000;
    std::size_t check_every = 250;
    std::optional<HVec> anchor;    // default: origin
};

struct SemiDiscreteResult {
    MaxAffinePotential potential;  // normalized at the anchor
    std::vector<double> dual_weights;
    std::vector<double> cell_masses;  // validation estimate
    double mismatch;
    std::size_t iterations;
};

/// Averaged stochastic ascent on the semi-discrete Kantorovich dual
/// w -> E_P[min_j (||X - y_j||^2 - w_j)] + sum_j q_j w_j. Stops once the
/// Laguerre cell masses match the target weights within tol on a fresh
/// validation sample; throws ConvergenceError otherwise.
SemiDiscreteResult semidiscrete_solve(const MeasureSpec& src, const DiscreteMeasure& tgt,
                                      const SemiDiscreteOptions& options = {});

/// Fraction of points whose argmax piece is j.
std::vector<double> cell_masses(const MaxAffinePotential& psi, std::span<const HVec> points);

}  // namespace monotone
