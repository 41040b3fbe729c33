#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "monotone/error.hpp"
#include "monotone/ot.hpp"

namespace monotone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDropMass = 1e-14;

std::string dump_instance(const DiscreteMeasure& src, const DiscreteMeasure& tgt) {
    std::ostringstream os;
    os.precision(17);
    auto dump = [&](const DiscreteMeasure& m) {
        os << "{\"points\":[";
        for (std::size_t i = 0; i < m.size(); ++i) {
            os << (i ? "," : "") << "[";
            for (std::size_t k = 0; k < m.dim(); ++k) os << (k ? "," : "") << m.point(i)[k];
            os << "]";
        }
        os << "],\"weights\":[";
        for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m.weight(i);
        os << "]}";
    };
    os << "{\"src\":";
    dump(src);
    os << ",\"tgt\":";
    dump(tgt);
    os << "}";
    return os.str();
}

// Network simplex on the transportation graph: sources 0..n-1, sinks
// n..n+m-1, and an artificial root n+m joined to every node. Real arc
// a = i*m + j runs from source i to sink j; artificial arc real_count + v
// joins node v to the root (v -> root for sources, root -> v for sinks).
// Every arc is uncapacitated, so entering arcs always sit at flow zero.
class TransportSimplex {
public:
    TransportSimplex(const CostMatrix& cost, const std::vector<double>& supply, const std::vector<double>& demand)
        : cost_(cost), n_(cost.rows), m_(cost.cols), nodes_(n_ + m_ + 1), root_(n_ + m_),
          real_arcs_(n_ * m_) {
        const double max_cost = cost.max_entry();
        // Any artificial route source -> root -> sink costs 2 * art > max_cost,
        // which is enough for the artificial flow to vanish at the optimum.
        art_cost_ = max_cost > 0.0 ? max_cost : 1.0;
        epsilon_ = 1e-12 * art_cost_;

        flow_.assign(real_arcs_ + nodes_ - 1, 0.0);
        parent_.assign(nodes_, root_);
        pred_.assign(nodes_, 0);
        up_.assign(nodes_, 0);
        depth_.assign(nodes_, 1);
        pi_.assign(nodes_, 0.0);
        depth_[root_] = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            pred_[i] = real_arcs_ + i;
            up_[i] = 1;
            flow_[pred_[i]] = supply[i];
            pi_[i] = -art_cost_;
        }
        for (std::size_t j = 0; j < m_; ++j) {
            const std::size_t v = n_ + j;
            pred_[v] = real_arcs_ + v;
            up_[v] = 0;
            flow_[pred_[v]] = demand[j];
            pi_[v] = art_cost_;
        }
        block_size_ = std::max<std::size_t>(
            10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
    }

    // Returns the number of pivots, or throws when the budget is exhausted.
    std::size_t run(std::size_t max_pivots) {
        std::size_t pivots = 0;
        for (;;) {
            const std::optional<std::size_t> entering = find_entering();
            if (!entering) return pivots;
            if (++pivots > max_pivots) throw std::runtime_error("pivot budget exhausted");
            pivot(*entering);
        }
    }

    double flow(std::size_t arc) const { return flow_[arc]; }
    double potential(std::size_t node) const { return pi_[node]; }
    bool in_tree_real(std::size_t node, std::size_t& arc) const {
        if (node == root_ || pred_[node] >= real_arcs_) return false;
        arc = pred_[node];
        return true;
    }

private:
    std::size_t arc_source(std::size_t a) const {
        if (a < real_arcs_) return a / m_;
        const std::size_t v = a - real_arcs_;
        return v < n_ ? v : root_;
    }
    std::size_t arc_target(std::size_t a) const {
        if (a < real_arcs_) return n_ + a % m_;
        const std::size_t v = a - real_arcs_;
        return v < n_ ? root_ : v;
    }
    double arc_cost(std::size_t a) const { return a < real_arcs_ ? cost_.data[a] : art_cost_; }
    double reduced_cost(std::size_t a) const {
        return arc_cost(a) + pi_[arc_source(a)] - pi_[arc_target(a)];
    }

    // Block search pricing; within a block the lowest-index minimum wins.
    std::optional<std::size_t> find_entering() {
        std::size_t scanned = 0;
        std::size_t best = 0;
        double best_rc = -epsilon_;
        bool found = false;
        std::size_t in_block = 0;
        std::size_t a = next_arc_;
        while (scanned < real_arcs_) {
            const std::size_t i = a / m_;
            const std::size_t j = a % m_;
            const double rc = cost_.data[a] + pi_[i] - pi_[n_ + j];
            if (rc < best_rc) {
                best_rc = rc;
                best = a;
                found = true;
            }
            ++scanned;
            if (++a == real_arcs_) a = 0;
            if (++in_block == block_size_) {
                if (found) break;
                in_block = 0;
            }
        }
        next_arc_ = a;
        if (!found) return std::nullopt;
        return best;
    }

    void pivot(std::size_t entering) {
        const std::size_t first = arc_source(entering);
        const std::size_t second = arc_target(entering);

        std::size_t u = first, v = second;
        while (u != v) {
            if (depth_[u] >= depth_[v]) {
                u = parent_[u];
            } else {
                v = parent_[v];
            }
        }
        const std::size_t join = u;

        // Strongly feasible leaving rule: strict on the first path, non-strict
        // on the second, so the last blocking arc in cycle order leaves.
        double delta = kInf;
        std::size_t out_node = 0;
        bool out_on_first = true;
        for (std::size_t w = first; w != join; w = parent_[w]) {
            const double d = up_[w] ? flow_[pred_[w]] : kInf;
            if (d < delta) {
                delta = d;
                out_node = w;
                out_on_first = true;
            }
        }
        for (std::size_t w = second; w != join; w = parent_[w]) {
            const double d = up_[w] ? kInf : flow_[pred_[w]];
            if (d <= delta) {
                delta = d;
                out_node = w;
                out_on_first = false;
            }
        }
        if (!std::isfinite(delta)) throw std::runtime_error("unbounded cycle in transport simplex");

        if (delta > 0.0) {
            flow_[entering] += delta;
            for (std::size_t w = first; w != join; w = parent_[w]) {
                if (up_[w]) {
                    flow_[pred_[w]] -= delta;
                } else {
                    flow_[pred_[w]] += delta;
                }
            }
            for (std::size_t w = second; w != join; w = parent_[w]) {
                if (up_[w]) {
                    flow_[pred_[w]] += delta;
                } else {
                    flow_[pred_[w]] -= delta;
                }
            }
        }

        // Re-hang the subtree cut off at out_node from the entering arc: the
        // path from the entering endpoint inside that subtree up to out_node
        // is reversed.
        const std::size_t inner = out_on_first ? first : second;
        const std::size_t outer = out_on_first ? second : first;
        std::size_t node = inner;
        std::size_t new_parent = outer;
        std::size_t new_pred = entering;
        bool new_up = arc_source(entering) == inner;
        for (;;) {
            const std::size_t old_parent = parent_[node];
            const std::size_t old_pred = pred_[node];
            const bool old_up = up_[node];
            parent_[node] = new_parent;
            pred_[node] = new_pred;
            up_[node] = new_up;
            if (node == out_node) break;
            new_parent = node;
            new_pred = old_pred;
            new_up = !old_up;
            node = old_parent;
        }

        refresh_subtree(inner);
    }

    // Recomputes depth and potential below `top` after re-hanging.
    void refresh_subtree(std::size_t top) {
        rebuild_children();
        stack_.clear();
        stack_.push_back(top);
        while (!stack_.empty()) {
            const std::size_t v = stack_.back();
            stack_.pop_back();
            const std::size_t p = parent_[v];
            depth_[v] = depth_[p] + 1;
            const double c = arc_cost(pred_[v]);
            // reduced cost zero on tree arcs: c + pi[src] - pi[dst] = 0
            pi_[v] = up_[v] ? pi_[p] - c : pi_[p] + c;
            for (std::size_t k = child_start_[v]; k < child_start_[v + 1]; ++k) stack_.push_back(child_list_[k]);
        }
    }

    void rebuild_children() {
        child_start_.assign(nodes_ + 1, 0);
        for (std::size_t v = 0; v < nodes_; ++v) {
            if (v != root_) ++child_start_[parent_[v] + 1];
        }
        for (std::size_t v = 0; v < nodes_; ++v) child_start_[v + 1] += child_start_[v];
        child_list_.resize(nodes_);
        fill_.assign(child_start_.begin(), child_start_.end() - 1);
        for (std::size_t v = 0; v < nodes_; ++v) {
            if (v != root_) child_list_[fill_[parent_[v]]++] = v;
        }
    }

    const CostMatrix& cost_;
    std::size_t n_, m_, nodes_, root_, real_arcs_;
    double art_cost_ = 1.0;
    double epsilon_ = 0.0;
    std::vector<double> flow_;
    std::vector<std::size_t> parent_, pred_, depth_;
    std::vector<char> up_;
    std::vector<double> pi_;
    std::size_t block_size_ = 10;
    std::size_t next_arc_ = 0;
    std::vector<std::size_t> child_start_, child_list_, fill_, stack_;
};

}  // namespace

TransportPlan solve_transport(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                              const TransportOptions& options) {
    if (src.dim() != tgt.dim()) throw InvalidInput("transport marginals live in different dimensions");
    const std::size_t n = src.size();
    const std::size_t m = tgt.size();
    const CostMatrix cost = squared_distance_matrix(src.points(), tgt.points());

    const std::size_t nodes = n + m;
    const std::size_t budget = options.max_pivots ? options.max_pivots : 50 * nodes * nodes + 10000;
    TransportSimplex simplex(cost, src.weights(), tgt.weights());
    std::size_t pivots = 0;
    try {
        pivots = simplex.run(budget);
    } catch (const std::runtime_error& e) {
        throw SolverError(std::string("transport simplex failed: ") + e.what(), dump_instance(src, tgt));
    }

    std::vector<CouplingEntry> entries;
    for (std::size_t v = 0; v < n + m; ++v) {
        std::size_t arc = 0;
        if (!simplex.in_tree_real(v, arc)) continue;
        const double mass = simplex.flow(arc);
        if (mass > kDropMass) entries.push_back({arc / m, arc % m, mass});
    }
    std::sort(entries.begin(), entries.end(),
              [](const CouplingEntry& a, const CouplingEntry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });

    // Tree potentials use c + pi_i - pi_j >= 0, i.e. u = -pi on sources and
    // w = pi on sinks. One round of c-transforms tightens both sides without
    // leaving the optimal face.
    DualSolution dual;
    dual.u.resize(n);
    dual.w.resize(m);
    for (std::size_t i = 0; i < n; ++i) dual.u[i] = -simplex.potential(i);
    for (std::size_t j = 0; j < m; ++j) dual.w[j] = simplex.potential(n + j);
    for (std::size_t j = 0; j < m; ++j) {
        double best = kInf;
        for (std::size_t i = 0; i < n; ++i) best = std::min(best, cost(i, j) - dual.u[i]);
        dual.w[j] = best;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double best = kInf;
        for (std::size_t j = 0; j < m; ++j) best = std::min(best, cost(i, j) - dual.w[j]);
        dual.u[i] = best;
    }

    return TransportPlan{Coupling(src, tgt, std::move(entries)), std::move(dual), pivots};
}

}  // namespace monotone
