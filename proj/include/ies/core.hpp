#ifndef IES_CORE_HPP
#define IES_CORE_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ies {

/// A point or a mutation on the integer lattice.
using IntegerVector = std::vector<std::int64_t>;

/// A distribution parameter is outside its domain (e.g. p outside (0,1)).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Vector or matrix sizes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An input violates a documented precondition (non-PSD matrix, too few samples, ...).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Round to nearest integer, halves away from zero.
inline std::int64_t round_half_away(double x) noexcept { return std::llround(x); }

inline std::int64_t l1_norm(std::span<const std::int64_t> z) noexcept
{
    std::int64_t sum = 0;
    for (auto v : z) {
        sum += v < 0 ? -v : v;
    }
    return sum;
}

inline double l2_norm(std::span<const std::int64_t> z) noexcept
{
    double sum = 0.0;
    for (auto v : z) {
        sum += static_cast<double>(v) * static_cast<double>(v);
    }
    return std::sqrt(sum);
}

/// Per-coordinate target mean l1 step sizes. All entries strictly positive.
class StepSizeVector {
public:
    StepSizeVector() = default;

    explicit StepSizeVector(std::vector<double> s) : s_(std::move(s))
    {
        if (s_.empty()) {
            throw DimensionError("step-size vector must have at least one entry");
        }
        for (double v : s_) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw DomainError("step sizes must be positive and finite, got " + std::to_string(v));
            }
        }
    }

    StepSizeVector(std::initializer_list<double> s) : StepSizeVector(std::vector<double>(s)) {}

    static StepSizeVector uniform(std::size_t n, double s) { return StepSizeVector(std::vector<double>(n, s)); }

    std::size_t size() const noexcept { return s_.size(); }
    double operator[](std::size_t i) const noexcept { return s_[i]; }
    std::span<const double> values() const noexcept { return s_; }

private:
    std::vector<double> s_;
};

} // namespace ies

#endif // IES_CORE_HPP
