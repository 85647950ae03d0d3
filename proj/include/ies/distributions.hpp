#ifndef IES_DISTRIBUTIONS_HPP
#define IES_DISTRIBUTIONS_HPP

// Single-variable symmetric integer mutation distributions.
//
//   DU  discrete uniform on {-N..N}
//   SB  Bin(N, 1/2) - N/2, N even
//   TN  round(N(0, sigma^2)), halves away from zero
//   DG  g1 - g2 with g1, g2 ~ Geometric(p) on {0, 1, ...}
//
// All four are parameterized through the per-coordinate mean l1 step
// s = E|z| by param_from_step / step_from_param.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "ies/core.hpp"
#include "ies/random.hpp"

namespace ies {

enum class DistributionKind { DU, SB, TN, DG };

inline std::string_view to_string(DistributionKind kind) noexcept
{
    switch (kind) {
    case DistributionKind::DU: return "du";
    case DistributionKind::SB: return "sb";
    case DistributionKind::TN: return "tn";
    case DistributionKind::DG: return "dg";
    }
    return "?";
}

inline std::optional<DistributionKind> parse_distribution_kind(std::string_view name) noexcept
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "du") return DistributionKind::DU;
    if (lower == "sb") return DistributionKind::SB;
    if (lower == "tn") return DistributionKind::TN;
    if (lower == "dg") return DistributionKind::DG;
    return std::nullopt;
}

/// Default excluded tail mass for infinite-support sums.
inline constexpr double default_tail_eps = 1e-12;

struct DistParam {
    DistributionKind kind;
    /// N for DU/SB, sigma for TN, p for DG.
    double value;

    /// Throws DomainError when value is outside the kind's domain.
    void validate() const
    {
        switch (kind) {
        case DistributionKind::DU:
            if (!(value >= 0.0) || value != std::floor(value) || value > 1e15) {
                throw DomainError("DU requires a non-negative integer N, got " + std::to_string(value));
            }
            return;
        case DistributionKind::SB:
            if (!(value >= 0.0) || value != std::floor(value) || std::fmod(value, 2.0) != 0.0 || value > 1e15) {
                throw DomainError("SB requires a non-negative even integer N, got " + std::to_string(value));
            }
            return;
        case DistributionKind::TN:
            if (!(value > 0.0) || !std::isfinite(value)) {
                throw DomainError("TN requires sigma > 0, got " + std::to_string(value));
            }
            return;
        case DistributionKind::DG:
            if (!(value > 0.0 && value < 1.0)) {
                throw DomainError("DG requires 0 < p < 1, got " + std::to_string(value));
            }
            return;
        }
        throw DomainError("unknown distribution kind");
    }

    std::int64_t n() const noexcept { return static_cast<std::int64_t>(value); }

    static DistParam du(std::int64_t n) { return make(DistributionKind::DU, static_cast<double>(n)); }
    static DistParam sb(std::int64_t n) { return make(DistributionKind::SB, static_cast<double>(n)); }
    static DistParam tn(double sigma) { return make(DistributionKind::TN, sigma); }
    static DistParam dg(double p) { return make(DistributionKind::DG, p); }

    static DistParam make(DistributionKind kind, double value)
    {
        DistParam param{kind, value};
        param.validate();
        return param;
    }
};

namespace detail {

inline double tn_cell_mass(double sigma, std::int64_t k) noexcept
{
    // Work on |k| with erfc so that far-tail cells do not cancel to zero.
    const double a = static_cast<double>(k < 0 ? -k : k);
    const double scale = 1.0 / (std::numbers::sqrt2 * sigma);
    if (a == 0.0) {
        return std::erf(0.5 * scale);
    }
    return 0.5 * (std::erfc((a - 0.5) * scale) - std::erfc((a + 0.5) * scale));
}

inline double sb_mass(std::int64_t n, std::int64_t k) noexcept
{
    const std::int64_t half = n / 2;
    k = k < 0 ? -k : k; // exact symmetry
    if (k > half) {
        return 0.0;
    }
    const double nd = static_cast<double>(n);
    const double j = static_cast<double>(k + half);
    const double log_mass = std::lgamma(nd + 1.0) - std::lgamma(j + 1.0) - std::lgamma(nd - j + 1.0) -
                            nd * std::numbers::ln2;
    return std::exp(log_mass);
}

/// Geometric draw from a uniform u in [0,1), given log(1 - p) < 0.
inline std::int64_t geometric_from_log_q(double u, double log_q) noexcept
{
    const double g = std::floor(std::log1p(-u) / log_q);
    constexpr double cap = 0x1.0p62;
    return g >= cap ? static_cast<std::int64_t>(cap) : static_cast<std::int64_t>(g);
}

/// log(1 - p) for the DG parameter calibrated to step s, without forming p.
inline double dg_log_q_from_step(double s) noexcept { return std::log(s / (std::sqrt(1.0 + s * s) + 1.0)); }

} // namespace detail

/// Pr{z = k}. Symmetric in k for every kind.
inline double pmf_exact(const DistParam& param, std::int64_t k)
{
    param.validate();
    const std::int64_t a = k < 0 ? -k : k;
    switch (param.kind) {
    case DistributionKind::DU:
        return a <= param.n() ? 1.0 / (2.0 * param.value + 1.0) : 0.0;
    case DistributionKind::SB:
        return detail::sb_mass(param.n(), k);
    case DistributionKind::TN:
        return detail::tn_cell_mass(param.value, k);
    case DistributionKind::DG: {
        const double p = param.value;
        return p / (2.0 - p) * std::pow(1.0 - p, static_cast<double>(a));
    }
    }
    return 0.0;
}

/// First-order (mean value) approximation of the TN pmf. Not normalized in general.
inline double tn_pmf_approx(double sigma, std::int64_t k)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("TN requires sigma > 0, got " + std::to_string(sigma));
    }
    const double kd = static_cast<double>(k);
    return std::exp(-kd * kd / (2.0 * sigma * sigma)) / std::sqrt(std::numbers::pi);
}

/// Distribution parameter whose per-coordinate mean |z| is (approximately) s.
inline DistParam param_from_step(DistributionKind kind, double s)
{
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw DomainError("step size must be positive, got " + std::to_string(s));
    }
    switch (kind) {
    case DistributionKind::DU:
        return DistParam::du(static_cast<std::int64_t>(std::floor((2.0 * s - 1.0 + std::sqrt(1.0 + s * s)) / 2.0)));
    case DistributionKind::SB:
        // Mean absolute deviation of Bin(N, 1/2) is ~ sqrt(N / (2 pi)); nearest even N.
        return DistParam::sb(2 * static_cast<std::int64_t>(std::round(std::numbers::pi * s * s)));
    case DistributionKind::TN:
        return DistParam::tn(std::sqrt(std::numbers::pi / 2.0) * s);
    case DistributionKind::DG:
        return DistParam::dg(1.0 - s / (std::sqrt(1.0 + s * s) + 1.0));
    }
    throw DomainError("unknown distribution kind");
}

/// Per-coordinate mean |z| implied by param (exact for DU and DG).
inline double step_from_param(const DistParam& param)
{
    param.validate();
    switch (param.kind) {
    case DistributionKind::DU: {
        const double n = param.value;
        return n * (n + 1.0) / (2.0 * n + 1.0);
    }
    case DistributionKind::SB:
        return std::sqrt(param.value / (2.0 * std::numbers::pi));
    case DistributionKind::TN:
        return param.value * std::sqrt(2.0 / std::numbers::pi);
    case DistributionKind::DG: {
        const double p = param.value;
        return 2.0 * (1.0 - p) / (p * (2.0 - p));
    }
    }
    return 0.0;
}

/// floor(log(1 - u) / log(1 - p)) for a given uniform u in [0, 1).
inline std::int64_t geometric_from_uniform(double u, double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("geometric requires 0 < p < 1, got " + std::to_string(p));
    }
    if (!(u >= 0.0 && u < 1.0)) {
        throw DomainError("uniform deviate must lie in [0, 1)");
    }
    return detail::geometric_from_log_q(u, std::log1p(-p));
}

/// Pr{g = k} = p (1-p)^k on k = 0, 1, ...
inline std::int64_t sample_geometric(double p, RandomSource& rng)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("geometric requires 0 < p < 1, got " + std::to_string(p));
    }
    return detail::geometric_from_log_q(rng.uniform01(), std::log1p(-p));
}

inline std::int64_t sample(const DistParam& param, RandomSource& rng)
{
    param.validate();
    switch (param.kind) {
    case DistributionKind::DU:
        return rng.uniform_int(-param.n(), param.n());
    case DistributionKind::SB: {
        std::int64_t remaining = param.n();
        std::int64_t heads = 0;
        while (remaining >= 64) {
            heads += std::popcount(rng.next_u64());
            remaining -= 64;
        }
        if (remaining > 0) {
            heads += std::popcount(rng.next_u64() & ((std::uint64_t{1} << remaining) - 1));
        }
        return heads - param.n() / 2;
    }
    case DistributionKind::TN:
        return round_half_away(param.value * rng.normal());
    case DistributionKind::DG: {
        const double log_q = std::log1p(-param.value);
        const std::int64_t g1 = detail::geometric_from_log_q(rng.uniform01(), log_q);
        const std::int64_t g2 = detail::geometric_from_log_q(rng.uniform01(), log_q);
        return g1 - g2;
    }
    }
    return 0;
}

/// Half-width K of the symmetric window [-K, K] whose excluded mass is below tail_eps.
inline std::int64_t support_window(const DistParam& param, double tail_eps = default_tail_eps)
{
    param.validate();
    if (!(tail_eps > 0.0 && tail_eps < 1.0)) {
        throw DomainError("tail_eps must lie in (0, 1)");
    }
    switch (param.kind) {
    case DistributionKind::DU:
        return param.n();
    case DistributionKind::SB:
        return param.n() / 2;
    case DistributionKind::TN: {
        // erfc(x) <= exp(-x^2) bounds the excluded mass beyond K with x = (K + 1/2) / (sqrt2 sigma).
        const double x = std::sqrt(std::log(1.0 / tail_eps));
        return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(std::numbers::sqrt2 * param.value * x)));
    }
    case DistributionKind::DG: {
        // Excluded mass beyond K is 2 (1-p)^(K+1) / (2 - p).
        const double p = param.value;
        const double log_q = std::log1p(-p);
        const double k = (std::log(tail_eps * (2.0 - p) / 2.0) / log_q) - 1.0;
        return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(k)));
    }
    }
    return 0;
}

namespace detail {

inline double entropy_term(double q) noexcept { return q > 0.0 ? -q * std::log2(q) : 0.0; }

inline void check_tail_eps(double tail_eps)
{
    if (!(tail_eps > 0.0 && tail_eps <= 1e-9)) {
        throw DomainError("tail_eps must lie in (0, 1e-9]");
    }
}

} // namespace detail

/// Shannon entropy in bits, summed over a window covering >= 1 - tail_eps of the mass.
inline double entropy_exact(const DistParam& param, double tail_eps = default_tail_eps)
{
    param.validate();
    detail::check_tail_eps(tail_eps);
    if (param.kind == DistributionKind::DU) {
        return std::log2(2.0 * param.value + 1.0);
    }
    const std::int64_t window = support_window(param, tail_eps);
    double h = detail::entropy_term(pmf_exact(param, 0));
    for (std::int64_t k = 1; k <= window; ++k) {
        h += 2.0 * detail::entropy_term(pmf_exact(param, k));
    }
    return h;
}

/// Entropy of the TN approximate pmf over the same window as the exact TN entropy.
/// The approximate pmf is not normalized, so this is a plug-in of unnormalized weights.
inline double entropy_tn_approx(double sigma, double tail_eps = default_tail_eps)
{
    const DistParam param = DistParam::tn(sigma);
    detail::check_tail_eps(tail_eps);
    const std::int64_t window = support_window(param, tail_eps);
    double h = detail::entropy_term(tn_pmf_approx(sigma, 0));
    for (std::int64_t k = 1; k <= window; ++k) {
        h += 2.0 * detail::entropy_term(tn_pmf_approx(sigma, k));
    }
    return h;
}

/// Total probability mass inside support_window(param, tail_eps).
inline double window_mass(const DistParam& param, double tail_eps = default_tail_eps)
{
    const std::int64_t window = support_window(param, tail_eps);
    double total = pmf_exact(param, 0);
    for (std::int64_t k = 1; k <= window; ++k) {
        total += 2.0 * pmf_exact(param, k);
    }
    return total;
}

} // namespace ies

#endif // IES_DISTRIBUTIONS_HPP
