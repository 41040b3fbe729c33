#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace monotone {

/// Element of a separable Hilbert space, stored as its first d coefficients in
/// a fixed orthonormal basis. Coordinate k (0-based) is the coefficient of
/// basis vector e_{k+1}. All coefficients are finite.
class HVec {
public:
    HVec() = default;
    explicit HVec(std::vector<double> coeffs);
    HVec(std::initializer_list<double> coeffs);

    static HVec zeros(std::size_t dim);
    /// Basis vector e_{index+1} in dimension dim.
    static HVec basis(std::size_t dim, std::size_t index);

    std::size_t dim() const noexcept { return coeffs_.size(); }
    double operator[](std::size_t k) const { return coeffs_[k]; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    HVec& operator+=(const HVec& other);
    HVec& operator-=(const HVec& other);
    HVec& operator*=(double s);

    friend bool operator==(const HVec&, const HVec&) = default;

private:
    std::vector<double> coeffs_;
};

HVec operator+(HVec a, const HVec& b);
HVec operator-(HVec a, const HVec& b);
HVec operator*(double s, HVec a);

/// Sum of coefficient products. Throws InvalidInput on dimension mismatch.
double inner(const HVec& x, const HVec& y);
double squared_norm(const HVec& x);
double norm(const HVec& x);
/// ||x - y||^2 computed coordinatewise (no cancellation from the expansion).
double squared_distance(const HVec& x, const HVec& y);

/// Strong and weak distances of a sequence to a candidate limit.
struct ConvergenceReport {
    std::vector<double> strong_gaps;               // ||x_n - x||
    std::vector<std::vector<double>> weak_gaps;    // [direction][n] |<x_n - x, h>|
};

ConvergenceReport convergence_report(std::span<const HVec> seq, const HVec& limit,
                                     std::span<const HVec> directions);

}  // namespace monotone
