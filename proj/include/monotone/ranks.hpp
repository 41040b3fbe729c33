#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monotone/hilbert.hpp"
#include "monotone/maps.hpp"
#include "monotone/measures.hpp"
#include "monotone/ot.hpp"

namespace monotone {

/// Compact regularity set: centered ball in coefficient space, optionally
/// intersected with the box |x_i| <= box_half_widths[i].
struct CompactSet {
    double radius = 1.0;
    std::vector<double> box_half_widths;

    bool contains(const HVec& x) const;
    /// Points of a regular grid with `per_axis` levels on each box side that
    /// fall inside the ball. Without a box the side is [-radius, radius].
    std::vector<HVec> grid(std::size_t dim, std::size_t per_axis) const;
};

struct ReferenceMeta {
    DiscretizationStrategy strategy = DiscretizationStrategy::SeededIid;
    std::uint64_t seed = 0;
    double bound = 0.0;
};

/// Empirical center-outward rank function: data point k is sent to reference
/// atom assignment[k].
struct RankMap {
    std::vector<HVec> data_points;
    std::vector<HVec> ranks;
    std::vector<std::size_t> assignment;
    ReferenceMeta reference_meta;

    const HVec& rank_of(std::size_t k) const { return ranks[k]; }
};

/// Optimal assignment of the data onto a uniform-weight reference of the
/// same size. Throws InvalidInput on size mismatch or non-uniform weights.
RankMap fit_rank(const std::vector<HVec>& data, const DiscreteMeasure& reference, ReferenceMeta meta = {});
RankMap fit_rank(const std::vector<HVec>& data, const Discretization& reference);

/// True when the ranks are exactly the reference atoms, each used once.
bool pushforward_matches(const RankMap& rank, const DiscreteMeasure& reference);

MonotonicityCertificate certify(const RankMap& rank, const CertifyOptions& options = {});

// ---------------------------------------------------------------------------
// Functional data

struct CurveTable {
    std::vector<double> grid;                 // strictly increasing sample locations
    std::vector<std::vector<double>> curves;  // one row per curve, aligned with grid
};

/// First row: grid locations. Each further row: one curve. Comma-separated,
/// blank lines and lines starting with '#' are skipped.
CurveTable read_curve_csv(const std::string& path);
CurveTable parse_curve_csv(const std::string& text);

/// Trapezoid weights on the grid rescaled to [0, 1].
std::vector<double> trapezoid_weights(const std::vector<double>& grid);

/// Coefficients on the orthonormal cosine basis of L2[0, 1]
/// (e_1 = 1, e_k = sqrt(2) cos((k - 1) pi t)) after rescaling the grid to [0, 1].
/// Empty `weights` means trapezoid weights.
std::vector<HVec> project_curves(const CurveTable& table, std::size_t basis_size,
                                 std::vector<double> weights = {});

/// Value of the k-th (0-based) cosine basis function at t in [0, 1].
double cosine_basis(std::size_t k, double t);

// ---------------------------------------------------------------------------
// Local Glivenko-Cantelli experiment

struct GapSummary {
    std::vector<double> directional;  // per direction: sup |<y - grad psi(x), h>|
    double norm = 0.0;                // sup ||y - grad psi(x)||
    std::size_t points_in_k = 0;
};

/// Sups over pairs (xs[k], ys[k]) with xs[k] in K. All zeros with
/// points_in_k = 0 when K holds none of the points.
GapSummary sup_gaps(const std::vector<HVec>& xs, const std::vector<HVec>& ys, const ConvexMap& population,
                    const CompactSet& k_set, const std::vector<HVec>& directions);

struct LocalGcConfig {
    MeasureSpec data;
    MeasureSpec reference;
    std::vector<std::size_t> n_grid;
    std::size_t reps = 1;
    CompactSet k_set;
    std::vector<HVec> directions;
    std::uint64_t seed = 0;
    DiscretizationStrategy strategy = DiscretizationStrategy::SeededIid;
    PopulationOptions population;
};

struct LocalGcRow {
    std::size_t n;
    std::uint64_t seed;
    std::size_t direction_index;
    double gap;
    double norm_gap;
    std::size_t points_in_k;
};

struct LocalGcResult {
    std::vector<LocalGcRow> rows;
    std::string population_description;
    bool closed_form = false;
};

/// For each n and replication r (seed + r): samples n data points, fits the
/// rank map onto an n-atom discretization of the reference and reports the
/// directional and norm sups over data points in K.
LocalGcResult local_gc_experiment(const LocalGcConfig& config, std::size_t threads = 1);

}  // namespace monotone
