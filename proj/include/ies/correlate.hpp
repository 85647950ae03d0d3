#ifndef IES_CORRELATE_HPP
#define IES_CORRELATE_HPP

// Correlated integer mutations by rotation.
//
// Angle j of an AngleVector belongs to the coordinate pair (i, l), i < l, in
// lexicographic order (0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1).
// Indices are 0-based. The rotation product applies the pairs in that order,
// each as a plane rotation
//
//     v_i <- cos(a) v_i - sin(a) v_l
//     v_l <- sin(a) v_i + cos(a) v_l
//
// and integer inputs are rounded once, after the whole product.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ies/core.hpp"
#include "ies/distributions.hpp"
#include "ies/random.hpp"

namespace ies {

using CovarianceMatrix = Eigen::MatrixXd;

constexpr std::size_t angle_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) noexcept
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a + std::numbers::pi, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    r -= std::numbers::pi;
    return r == -std::numbers::pi ? std::numbers::pi : r;
}

/// Coordinate pairs in rotation order.
inline std::vector<std::pair<std::size_t, std::size_t>> angle_pairs(std::size_t n)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(angle_count(n));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t l = i + 1; l < n; ++l) {
            pairs.emplace_back(i, l);
        }
    }
    return pairs;
}

class AngleVector {
public:
    AngleVector() = default;

    /// All-zero angles for dimension n.
    explicit AngleVector(std::size_t n) : n_(n), alpha_(angle_count(n), 0.0) {}

    AngleVector(std::size_t n, std::vector<double> alpha) : n_(n), alpha_(std::move(alpha))
    {
        if (alpha_.size() != angle_count(n)) {
            throw DimensionError("angle vector for n=" + std::to_string(n) + " needs " +
                                 std::to_string(angle_count(n)) + " entries, got " + std::to_string(alpha_.size()));
        }
        for (double& a : alpha_) {
            a = wrap_angle(a);
        }
    }

    std::size_t dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return alpha_.size(); }
    double operator[](std::size_t j) const noexcept { return alpha_[j]; }
    std::span<const double> values() const noexcept { return alpha_; }

    void set(std::size_t j, double a) noexcept { alpha_[j] = wrap_angle(a); }

    bool is_zero() const noexcept
    {
        for (double a : alpha_) {
            if (a != 0.0) return false;
        }
        return true;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> alpha_;
};

/// n x n plane rotation in coordinates (i, l), 0-based, i < l < n.
inline Eigen::MatrixXd rotation_matrix(std::size_t n, std::size_t i, std::size_t l, double alpha)
{
    if (!(i < l && l < n)) {
        throw DimensionError("rotation indices must satisfy i < l < n");
    }
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto ii = static_cast<Eigen::Index>(i);
    const auto ll = static_cast<Eigen::Index>(l);
    r(ii, ii) = std::cos(alpha);
    r(ll, ll) = std::cos(alpha);
    r(ii, ll) = -std::sin(alpha);
    r(ll, ii) = std::sin(alpha);
    return r;
}

/// The full rotation product for one angle vector, with sines and cosines precomputed.
class RotationProduct {
public:
    explicit RotationProduct(const AngleVector& alpha) : n_(alpha.dimension())
    {
        const auto pairs = angle_pairs(n_);
        steps_.reserve(pairs.size());
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if (alpha[j] != 0.0) {
                steps_.push_back({pairs[j].first, pairs[j].second, std::cos(alpha[j]), std::sin(alpha[j])});
            }
        }
    }

    std::size_t dimension() const noexcept { return n_; }

    void apply(std::span<double> v) const
    {
        if (v.size() != n_) {
            throw DimensionError("rotation dimension mismatch");
        }
        for (const auto& s : steps_) {
            const double a = v[s.i];
            const double b = v[s.l];
            v[s.i] = s.c * a - s.s * b;
            v[s.l] = s.s * a + s.c * b;
        }
    }

    IntegerVector apply_rounded(std::span<const std::int64_t> z) const
    {
        if (z.size() != n_) {
            throw DimensionError("rotation dimension mismatch");
        }
        if (steps_.empty()) {
            return IntegerVector(z.begin(), z.end());
        }
        std::vector<double> v(z.begin(), z.end());
        apply(v);
        IntegerVector out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            out[i] = round_half_away(v[i]);
        }
        return out;
    }

    /// Dense matrix of the product (for checks).
    Eigen::MatrixXd matrix() const
    {
        const auto n = static_cast<Eigen::Index>(n_);
        Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
        for (Eigen::Index col = 0; col < n; ++col) {
            std::vector<double> v(n_, 0.0);
            v[static_cast<std::size_t>(col)] = 1.0;
            apply(v);
            for (Eigen::Index row = 0; row < n; ++row) {
                q(row, col) = v[static_cast<std::size_t>(row)];
            }
        }
        return q;
    }

private:
    struct Step {
        std::size_t i;
        std::size_t l;
        double c;
        double s;
    };
    std::size_t n_;
    std::vector<Step> steps_;
};

/// Rotate an integer vector by the product of all pair rotations, then round once.
inline IntegerVector rotate_int(std::span<const std::int64_t> z, const AngleVector& alpha)
{
    if (alpha.dimension() != z.size()) {
        throw DimensionError("angle vector dimension " + std::to_string(alpha.dimension()) +
                             " does not match vector length " + std::to_string(z.size()));
    }
    return RotationProduct(alpha).apply_rounded(z);
}

/// One-sided geometric vector, coordinate i with p_i = param_from_step(DG, s_i).
inline IntegerVector sample_geometric_vector(const StepSizeVector& s, RandomSource& rng)
{
    IntegerVector g(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        g[i] = detail::geometric_from_log_q(rng.uniform01(), detail::dg_log_q_from_step(s[i]));
    }
    return g;
}

/// Independent per-coordinate mutation, coordinate i calibrated to mean |z_i| = s_i.
/// DG draws the whole g1 vector before the whole g2 vector.
inline IntegerVector uncorrelated_mutation(const StepSizeVector& s, DistributionKind kind, RandomSource& rng)
{
    IntegerVector z(s.size());
    switch (kind) {
    case DistributionKind::TN:
        for (std::size_t i = 0; i < s.size(); ++i) {
            z[i] = round_half_away(std::sqrt(std::numbers::pi / 2.0) * s[i] * rng.normal());
        }
        return z;
    case DistributionKind::DG: {
        const IntegerVector g1 = sample_geometric_vector(s, rng);
        const IntegerVector g2 = sample_geometric_vector(s, rng);
        for (std::size_t i = 0; i < s.size(); ++i) {
            z[i] = g1[i] - g2[i];
        }
        return z;
    }
    case DistributionKind::DU:
    case DistributionKind::SB:
        for (std::size_t i = 0; i < s.size(); ++i) {
            z[i] = sample(param_from_step(kind, s[i]), rng);
        }
        return z;
    }
    return z;
}

/// Correlated mutation (TN or DG only). Rotation and sampling share one precomputed product.
inline IntegerVector corr_mutate(const StepSizeVector& s, const RotationProduct& rotation, DistributionKind kind,
                                 RandomSource& rng)
{
    if (rotation.dimension() != s.size()) {
        throw DimensionError("step-size and angle dimensions differ");
    }
    switch (kind) {
    case DistributionKind::TN:
        return rotation.apply_rounded(uncorrelated_mutation(s, DistributionKind::TN, rng));
    case DistributionKind::DG: {
        IntegerVector z = rotation.apply_rounded(sample_geometric_vector(s, rng));
        const IntegerVector g = rotation.apply_rounded(sample_geometric_vector(s, rng));
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] -= g[i];
        }
        return z;
    }
    default:
        throw DomainError("correlated mutation is defined for TN and DG only, got " + std::string(to_string(kind)));
    }
}

inline IntegerVector corr_mutate(const StepSizeVector& s, const AngleVector& alpha, DistributionKind kind,
                                 RandomSource& rng)
{
    if (kind != DistributionKind::TN && kind != DistributionKind::DG) {
        throw DomainError("correlated mutation is defined for TN and DG only, got " + std::string(to_string(kind)));
    }
    if (alpha.dimension() != s.size()) {
        throw DimensionError("step-size and angle dimensions differ");
    }
    return corr_mutate(s, RotationProduct(alpha), kind, rng);
}

/// Rotation angle that diagonalizes the 2x2 block [[var_i, c], [c, var_j]].
inline double angle_from_covariance(double c_ij, double var_i, double var_j)
{
    if (!(var_i > 0.0) || !(var_j > 0.0)) {
        throw DomainError("variances must be positive");
    }
    if (c_ij == 0.0) {
        return 0.0;
    }
    if (var_i == var_j) {
        return std::copysign(std::numbers::pi / 4.0, c_ij);
    }
    return 0.5 * std::atan(2.0 * c_ij / (var_i - var_j));
}

/// Inverse of angle_from_covariance for |2 alpha| < pi/2.
inline double covariance_from_angle(double alpha, double var_i, double var_j) noexcept
{
    return 0.5 * (var_i - var_j) * std::tan(2.0 * alpha);
}

/// True when tan(2 alpha) is numerically unbounded.
inline bool ftn_angle_degenerate(double alpha) noexcept
{
    double twice = std::fmod(2.0 * alpha, std::numbers::pi);
    if (twice < 0.0) {
        twice += std::numbers::pi;
    }
    return std::abs(twice - std::numbers::pi / 2.0) < 1e-6;
}

/// Clip negative eigenvalues to zero and re-symmetrize.
inline CovarianceMatrix repair_psd(const CovarianceMatrix& c)
{
    const CovarianceMatrix sym = 0.5 * (c + c.transpose());
    Eigen::SelfAdjointEigenSolver<CovarianceMatrix> eig(sym);
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    CovarianceMatrix out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

/// "Forced TN" covariance from step sizes and angles, PSD-repaired.
/// std::nullopt when some angle makes tan(2 alpha) degenerate.
inline std::optional<CovarianceMatrix> build_ftn_covariance(const StepSizeVector& s, const AngleVector& alpha)
{
    const std::size_t n = s.size();
    if (alpha.dimension() != n) {
        throw DimensionError("step-size and angle dimensions differ");
    }
    CovarianceMatrix c = CovarianceMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> var(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sigma = param_from_step(DistributionKind::TN, s[i]).value;
        var[i] = sigma * sigma;
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = var[i];
    }
    const auto pairs = angle_pairs(n);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const auto [i, l] = pairs[j];
        if (ftn_angle_degenerate(alpha[j])) {
            return std::nullopt;
        }
        const double cij = covariance_from_angle(alpha[j], var[i], var[l]);
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = cij;
        c(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i)) = cij;
    }
    return repair_psd(c);
}

/// Rounded multivariate normal sampler for a PSD covariance.
class FtnSampler {
public:
    explicit FtnSampler(const CovarianceMatrix& c)
    {
        if (c.rows() != c.cols() || c.rows() == 0) {
            throw DimensionError("covariance must be square and non-empty");
        }
        const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
        if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw PreconditionError("covariance matrix is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<CovarianceMatrix> eig(c);
        if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
            throw PreconditionError("covariance matrix is not positive semidefinite");
        }
        factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(factor_.rows()); }

    /// Round the correlated deviate factor * xi for given standard normals xi.
    IntegerVector transform(const Eigen::VectorXd& xi) const
    {
        const Eigen::VectorXd y = factor_ * xi;
        IntegerVector z(static_cast<std::size_t>(y.size()));
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            z[static_cast<std::size_t>(i)] = round_half_away(y(i));
        }
        return z;
    }

    IntegerVector operator()(RandomSource& rng) const
    {
        Eigen::VectorXd xi(factor_.cols());
        for (Eigen::Index i = 0; i < xi.size(); ++i) {
            xi(i) = rng.normal();
        }
        return transform(xi);
    }

private:
    Eigen::MatrixXd factor_;
};

inline IntegerVector sample_ftn(const CovarianceMatrix& c, RandomSource& rng) { return FtnSampler(c)(rng); }

struct CorrelationMeasures {
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd abs_covariance;
};

/// Unbiased empirical covariance of z and of |z| (coordinate-wise).
inline CorrelationMeasures correlation_measures(std::span<const IntegerVector> samples)
{
    if (samples.size() < 2) {
        throw PreconditionError("correlation measures need at least 2 samples");
    }
    const std::size_t n = samples.front().size();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(ni);
    Eigen::VectorXd abs_mean = Eigen::VectorXd::Zero(ni);
    for (const auto& z : samples) {
        if (z.size() != n) {
            throw DimensionError("samples differ in dimension");
        }
        for (std::size_t i = 0; i < n; ++i) {
            mean(static_cast<Eigen::Index>(i)) += static_cast<double>(z[i]);
            abs_mean(static_cast<Eigen::Index>(i)) += static_cast<double>(z[i] < 0 ? -z[i] : z[i]);
        }
    }
    const double count = static_cast<double>(samples.size());
    mean /= count;
    abs_mean /= count;
    CorrelationMeasures out{Eigen::MatrixXd::Zero(ni, ni), Eigen::MatrixXd::Zero(ni, ni)};
    Eigen::VectorXd d(ni);
    Eigen::VectorXd a(ni);
    for (const auto& z : samples) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            d(ii) = static_cast<double>(z[i]) - mean(ii);
            a(ii) = static_cast<double>(z[i] < 0 ? -z[i] : z[i]) - abs_mean(ii);
        }
        out.covariance.noalias() += d * d.transpose();
        out.abs_covariance.noalias() += a * a.transpose();
    }
    out.covariance /= count - 1.0;
    out.abs_covariance /= count - 1.0;
    return out;
}

} // namespace ies

#endif // IES_CORRELATE_HPP
