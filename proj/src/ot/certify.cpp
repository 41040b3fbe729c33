#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "monotone/error.hpp"
#include "monotone/ot.hpp"
#include "monotone/rng.hpp"

namespace monotone {

__extension__ using u128 = unsigned __int128;

std::uint64_t cycle_count(std::size_t pairs, std::size_t max_len) {
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    u128 total = 0;
    u128 falling = pairs;  // p (p-1) ... (p-k+1)
    for (std::size_t k = 2; k <= std::min(max_len, pairs); ++k) {
        falling *= pairs - k + 1;
        total += falling / k;
        if (total > kMax || falling > (static_cast<u128>(kMax) << 8)) return kMax;
    }
    return static_cast<std::uint64_t>(total);
}

namespace {

class CycleSearch {
public:
    CycleSearch(std::span<const HVec> xs, std::span<const HVec> ys) : p_(xs.size()), gram_(p_ * p_) {
        for (std::size_t a = 0; a < p_; ++a) {
            for (std::size_t b = 0; b < p_; ++b) gram_[a * p_ + b] = inner(xs[a], ys[b]);
        }
    }

    // Cyclic sum of sum_k <x_k, y_{k+1} - y_k>.
    double cyclic_sum(std::span<const std::size_t> cycle) const {
        double s = 0.0;
        for (std::size_t t = 0; t < cycle.size(); ++t) {
            const std::size_t a = cycle[t];
            const std::size_t b = cycle[(t + 1) % cycle.size()];
            s += g(a, b) - g(a, a);
        }
        return s;
    }

    void exhaustive(std::size_t max_len) {
        path_.clear();
        used_.assign(p_, 0);
        for (std::size_t start = 0; start + 1 < p_; ++start) {
            path_.assign(1, start);
            used_[start] = 1;
            extend(start, 0.0, max_len);
            used_[start] = 0;
        }
    }

    void sampled(std::size_t max_len, std::uint64_t samples, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<std::size_t> pool(p_);
        const std::size_t longest = std::min(max_len, p_);
        for (std::uint64_t s = 0; s < samples; ++s) {
            const std::size_t k = 2 + static_cast<std::size_t>(rng.below(longest - 1));
            std::iota(pool.begin(), pool.end(), 0);
            for (std::size_t t = 0; t < k; ++t) {
                std::swap(pool[t], pool[t + rng.below(p_ - t)]);
            }
            record(std::span<const std::size_t>(pool.data(), k), cyclic_sum(std::span(pool.data(), k)));
        }
    }

    double best() const { return best_; }
    const std::vector<std::size_t>& best_cycle() const { return best_cycle_; }
    std::uint64_t checked() const { return checked_; }

private:
    double g(std::size_t a, std::size_t b) const { return gram_[a * p_ + b]; }

    // Canonical rotation: the first element is the smallest.
    void extend(std::size_t start, double partial, std::size_t max_len) {
        const std::size_t last = path_.back();
        for (std::size_t next = start + 1; next < p_; ++next) {
            if (used_[next]) continue;
            const double step = partial + g(last, next) - g(last, last);
            path_.push_back(next);
            used_[next] = 1;
            record(path_, step + g(next, start) - g(next, next));
            if (path_.size() < max_len) extend(start, step, max_len);
            used_[next] = 0;
            path_.pop_back();
        }
    }

    void record(std::span<const std::size_t> cycle, double sum) {
        ++checked_;
        if (sum > best_) {
            best_ = sum;
            best_cycle_.assign(cycle.begin(), cycle.end());
        }
    }

    std::size_t p_;
    std::vector<double> gram_;
    std::vector<std::size_t> path_;
    std::vector<char> used_;
    double best_ = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_cycle_;
    std::uint64_t checked_ = 0;
};

}  // namespace

MonotonicityCertificate certify_cyclic_monotonicity(std::span<const HVec> xs, std::span<const HVec> ys,
                                                    const CertifyOptions& options) {
    if (xs.size() != ys.size()) throw InvalidInput("certification needs as many x as y points");
    if (options.max_cycle_len < 2) throw InvalidInput("max_cycle_len must be >= 2");
    const std::size_t p = xs.size();
    if (p < 2) return {CertificationMode::Exhaustive, 0.0, std::nullopt, 0};

    CycleSearch search(xs, ys);
    const std::uint64_t total = cycle_count(p, options.max_cycle_len);
    MonotonicityCertificate cert{CertificationMode::Exhaustive, 0.0, std::nullopt, 0};
    if (total <= options.budget) {
        search.exhaustive(options.max_cycle_len);
    } else {
        cert.mode = CertificationMode::Sampled;
        search.sampled(options.max_cycle_len, options.samples, options.seed);
    }
    cert.cycles_checked = search.checked();
    cert.max_violation = search.checked() ? search.best() : 0.0;
    if (cert.max_violation > options.tolerance) cert.witness = search.best_cycle();
    return cert;
}

MonotonicityCertificate certify_cyclic_monotonicity(const Coupling& coupling, const CertifyOptions& options) {
    std::vector<HVec> xs, ys;
    xs.reserve(coupling.entries().size());
    ys.reserve(coupling.entries().size());
    for (const auto& e : coupling.entries()) {
        xs.push_back(coupling.src().point(e.i));
        ys.push_back(coupling.tgt().point(e.j));
    }
    return certify_cyclic_monotonicity(xs, ys, options);
}

Coupling apply_cycle_swap(const Coupling& coupling, std::span<const std::size_t> cycle) {
    const auto& entries = coupling.entries();
    if (cycle.size() < 2) throw InvalidInput("a cycle needs at least two pairs");
    double moved = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < cycle.size(); ++t) {
        if (cycle[t] >= entries.size()) throw InvalidInput("cycle refers to a missing coupling entry");
        if (std::count(cycle.begin(), cycle.end(), cycle[t]) != 1) throw InvalidInput("cycle repeats a pair");
        moved = std::min(moved, entries[cycle[t]].mass);
    }

    std::map<std::pair<std::size_t, std::size_t>, double> mass;
    for (const auto& e : entries) mass[{e.i, e.j}] += e.mass;
    for (std::size_t t = 0; t < cycle.size(); ++t) {
        const auto& here = entries[cycle[t]];
        const auto& next = entries[cycle[(t + 1) % cycle.size()]];
        mass[{here.i, here.j}] -= moved;
        mass[{here.i, next.j}] += moved;
    }
    std::vector<CouplingEntry> out;
    for (const auto& [key, value] : mass) {
        if (value > 1e-15) out.push_back({key.first, key.second, value});
    }
    return Coupling(coupling.src(), coupling.tgt(), std::move(out));
}

}  // namespace monotone
