#include "monotone/hilbert.hpp"

#include <cmath>
#include <string>

#include "monotone/error.hpp"

namespace monotone {

namespace {

void check_finite(const std::vector<double>& c) {
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (!std::isfinite(c[k])) {
            throw InvalidInput("HVec coefficient " + std::to_string(k) + " is not finite");
        }
    }
}

void check_same_dim(const HVec& x, const HVec& y) {
    if (x.dim() != y.dim()) {
        throw InvalidInput("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                           std::to_string(y.dim()));
    }
}

}  // namespace

HVec::HVec(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw InvalidInput("HVec needs dimension >= 1");
    check_finite(coeffs_);
}

HVec::HVec(std::initializer_list<double> coeffs) : HVec(std::vector<double>(coeffs)) {}

HVec HVec::zeros(std::size_t dim) { return HVec(std::vector<double>(dim, 0.0)); }

HVec HVec::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw InvalidInput("basis index out of range");
    std::vector<double> c(dim, 0.0);
    c[index] = 1.0;
    return HVec(std::move(c));
}

HVec& HVec::operator+=(const HVec& other) {
    check_same_dim(*this, other);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    return *this;
}

HVec& HVec::operator-=(const HVec& other) {
    check_same_dim(*this, other);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
    return *this;
}

HVec& HVec::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

HVec operator+(HVec a, const HVec& b) { return a += b; }
HVec operator-(HVec a, const HVec& b) { return a -= b; }
HVec operator*(double s, HVec a) { return a *= s; }

double inner(const HVec& x, const HVec& y) {
    check_same_dim(x, y);
    double s = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) s += x[k] * y[k];
    return s;
}

double squared_norm(const HVec& x) { return inner(x, x); }

double norm(const HVec& x) { return std::sqrt(squared_norm(x)); }

double squared_distance(const HVec& x, const HVec& y) {
    check_same_dim(x, y);
    double s = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

ConvergenceReport convergence_report(std::span<const HVec> seq, const HVec& limit,
                                     std::span<const HVec> directions) {
    if (seq.empty()) throw InvalidInput("convergence_report: empty sequence");
    for (const auto& h : directions) check_same_dim(h, limit);

    ConvergenceReport report;
    report.strong_gaps.reserve(seq.size());
    report.weak_gaps.assign(directions.size(), {});
    for (const HVec& x : seq) {
        const HVec diff = x - limit;
        report.strong_gaps.push_back(norm(diff));
        for (std::size_t h = 0; h < directions.size(); ++h) {
            report.weak_gaps[h].push_back(std::abs(inner(diff, directions[h])));
        }
    }
    return report;
}

}  // namespace monotone
