#ifndef IES_PROBLEMS_HPP
#define IES_PROBLEMS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ies/core.hpp"
#include "ies/random.hpp"

namespace ies {

enum class HessianKind { Discus, Cigar, RotatedEllipse, HadamardEllipse, Sphere };

inline std::string_view to_string(HessianKind kind) noexcept
{
    switch (kind) {
    case HessianKind::Discus: return "discus";
    case HessianKind::Cigar: return "cigar";
    case HessianKind::RotatedEllipse: return "rotated-ellipse";
    case HessianKind::HadamardEllipse: return "hadamard-ellipse";
    case HessianKind::Sphere: return "sphere";
    }
    return "?";
}

inline std::optional<HessianKind> parse_hessian_kind(std::string_view name) noexcept
{
    if (name == "discus") return HessianKind::Discus;
    if (name == "cigar") return HessianKind::Cigar;
    if (name == "rotated-ellipse" || name == "rotated") return HessianKind::RotatedEllipse;
    if (name == "hadamard-ellipse" || name == "hadamard") return HessianKind::HadamardEllipse;
    if (name == "sphere") return HessianKind::Sphere;
    return std::nullopt;
}

inline bool is_separable(HessianKind kind) noexcept
{
    return kind == HessianKind::Discus || kind == HessianKind::Cigar || kind == HessianKind::Sphere;
}

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

/// Sylvester Hadamard matrix of order n (a power of two). H H^T = n I.
inline Eigen::MatrixXi hadamard(std::size_t n)
{
    if (!is_power_of_two(n)) {
        throw DomainError("Hadamard order must be a power of two, got " + std::to_string(n));
    }
    Eigen::MatrixXi h(1, 1);
    h(0, 0) = 1;
    while (static_cast<std::size_t>(h.rows()) < n) {
        const Eigen::Index m = h.rows();
        Eigen::MatrixXi next(2 * m, 2 * m);
        next << h, h, h, -h;
        h = std::move(next);
    }
    return h;
}

/// BBOB ellipsoid spectrum c^((i-1)/(n-1)), i = 1..n.
inline Eigen::VectorXd ellipse_spectrum(std::size_t n, double c)
{
    Eigen::VectorXd d(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        d(static_cast<Eigen::Index>(i)) = std::pow(c, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return d;
}

/// Rotation by pi/4 in the plane spanned by (1,0,1,0,...) and (0,1,0,1,...).
inline Eigen::MatrixXd alternating_plane_rotation(std::size_t n)
{
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(ni);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        (i % 2 == 0 ? u : v)(i) = 1.0;
    }
    u.normalize();
    v.normalize();
    const double theta = std::numbers::pi / 4.0;
    return Eigen::MatrixXd::Identity(ni, ni) + (std::cos(theta) - 1.0) * (u * u.transpose() + v * v.transpose()) +
           std::sin(theta) * (v * u.transpose() - u * v.transpose());
}

inline Eigen::MatrixXd make_hessian(HessianKind kind, std::size_t n, double c)
{
    if (n < 2) {
        throw DomainError("Hessian dimension must be at least 2");
    }
    if (!(c >= 1.0) || !std::isfinite(c)) {
        throw DomainError("condition number must be >= 1");
    }
    const auto ni = static_cast<Eigen::Index>(n);
    switch (kind) {
    case HessianKind::Sphere:
        return Eigen::MatrixXd::Identity(ni, ni);
    case HessianKind::Discus: {
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(ni, ni);
        h(0, 0) = c;
        return h;
    }
    case HessianKind::Cigar: {
        Eigen::MatrixXd h = c * Eigen::MatrixXd::Identity(ni, ni);
        h(0, 0) = 1.0;
        return h;
    }
    case HessianKind::RotatedEllipse: {
        const Eigen::MatrixXd o = alternating_plane_rotation(n);
        Eigen::MatrixXd h = o * ellipse_spectrum(n, c).asDiagonal() * o.transpose();
        return 0.5 * (h + h.transpose());
    }
    case HessianKind::HadamardEllipse: {
        if (!is_power_of_two(n)) {
            throw DomainError("Hadamard ellipse needs a power-of-two dimension, got " + std::to_string(n));
        }
        const Eigen::MatrixXd s = hadamard(n).cast<double>() / std::sqrt(static_cast<double>(n));
        Eigen::MatrixXd h = s * ellipse_spectrum(n, c).asDiagonal() * s.transpose();
        return 0.5 * (h + h.transpose());
    }
    }
    throw DomainError("unknown Hessian kind");
}

/// f(x) = (x - xi0)^T H (x - xi0) / c. (kind, n, c, seed) determine the instance.
struct QuadraticInstance {
    HessianKind kind = HessianKind::Sphere;
    std::size_t n = 0;
    double c = 1.0;
    std::uint64_t seed = 0;
    IntegerVector xi0;
    Eigen::MatrixXd hessian;
    bool diagonal = true;

    std::string label() const
    {
        std::string out(to_string(kind));
        out += "/n=" + std::to_string(n);
        if (kind != HessianKind::Sphere) {
            out += "/c=1e" + std::to_string(static_cast<int>(std::lround(std::log10(c))));
        }
        return out;
    }
};

/// Optimum drawn uniformly from [-10, 10]^n by the instance seed.
inline IntegerVector make_optimum(std::size_t n, std::uint64_t seed)
{
    RandomSource rng(seed, 0x0F71A11EULL);
    IntegerVector xi0(n);
    for (auto& v : xi0) {
        v = rng.uniform_int(-10, 10);
    }
    return xi0;
}

inline QuadraticInstance make_instance(HessianKind kind, std::size_t n, double c, std::uint64_t seed)
{
    QuadraticInstance inst;
    inst.kind = kind;
    inst.n = n;
    inst.c = kind == HessianKind::Sphere ? 1.0 : c;
    inst.seed = seed;
    inst.xi0 = make_optimum(n, seed);
    inst.hessian = make_hessian(kind, n, inst.c);
    inst.diagonal = inst.hessian.isDiagonal(0.0);
    return inst;
}

/// Sum of (x_i - xi0_i)^2.
inline double sphere(std::span<const std::int64_t> x, std::span<const std::int64_t> xi0)
{
    if (x.size() != xi0.size()) {
        throw DimensionError("sphere: dimension mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i] - xi0[i]);
        sum += d * d;
    }
    return sum;
}

inline double evaluate(const QuadraticInstance& inst, std::span<const std::int64_t> x)
{
    if (x.size() != inst.n) {
        throw DimensionError("evaluate: expected dimension " + std::to_string(inst.n) + ", got " +
                             std::to_string(x.size()));
    }
    if (inst.kind == HessianKind::Sphere) {
        return sphere(x, inst.xi0);
    }
    std::vector<double> d(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) {
        d[i] = static_cast<double>(x[i] - inst.xi0[i]);
    }
    const auto& h = inst.hessian;
    double sum = 0.0;
    if (inst.diagonal) {
        for (std::size_t i = 0; i < inst.n; ++i) {
            sum += h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) * d[i] * d[i];
        }
    } else {
        for (std::size_t i = 0; i < inst.n; ++i) {
            if (d[i] == 0.0) continue;
            double row = 0.0;
            for (std::size_t j = 0; j < inst.n; ++j) {
                row += h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * d[j];
            }
            sum += d[i] * row;
        }
    }
    // Positive definiteness makes negative values pure rounding noise.
    return sum > 0.0 ? sum / inst.c : 0.0;
}

inline constexpr std::array<HessianKind, 4> benchmark_kinds{HessianKind::Discus, HessianKind::Cigar,
                                                            HessianKind::RotatedEllipse,
                                                            HessianKind::HadamardEllipse};

/// 4 Hessian kinds x condition numbers 1e1..1e6 = 24 instances; instance seeds base_seed + index.
inline std::vector<QuadraticInstance> benchmark_suite(std::size_t n, std::uint64_t base_seed)
{
    std::vector<QuadraticInstance> suite;
    std::uint64_t index = 0;
    for (HessianKind kind : benchmark_kinds) {
        for (int e = 1; e <= 6; ++e) {
            suite.push_back(make_instance(kind, n, std::pow(10.0, e), base_seed + index++));
        }
    }
    return suite;
}

} // namespace ies

#endif // IES_PROBLEMS_HPP
