#ifndef IES_EXPERIMENTS_HPP
#define IES_EXPERIMENTS_HPP

// Tabular data behind the calibration, histogram, rotation, entropy and
// benchmark-dominance studies. Every scan is a pure function of its grid and
// random source; each series draws from its own substream.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "ies/core.hpp"
#include "ies/correlate.hpp"
#include "ies/distributions.hpp"
#include "ies/parallel.hpp"
#include "ies/problems.hpp"
#include "ies/random.hpp"
#include "ies/stats.hpp"
#include "ies/strategies.hpp"

namespace ies {

struct ScanResult {
    std::string series;
    double x = 0.0;
    std::string statistic;
    double value = 0.0;
    double std_error = 0.0;
    bool defined = true;
};

/// Evenly spaced grid including both ends.
inline std::vector<double> linspace(double from, double to, std::size_t points)
{
    if (points == 0) return {};
    if (points == 1) return {from};
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return out;
}

inline std::vector<double> theta_grid(std::size_t points) { return linspace(0.0, std::numbers::pi / 2.0, points); }

namespace detail {

inline void require_pop(std::size_t pop, std::size_t minimum, const char* what)
{
    if (pop < minimum) {
        throw PreconditionError(std::string(what) + ": population must be at least " + std::to_string(minimum));
    }
}

inline void require_tn_or_dg(DistributionKind kind, const char* what)
{
    if (kind != DistributionKind::TN && kind != DistributionKind::DG) {
        throw DomainError(std::string(what) + ": kind must be tn or dg");
    }
}

} // namespace detail

/// Mean l1 and l2 norms of uncorrelated samples with ellipsoid steps s_i = K i, against K n (n+1) / 2.
inline std::vector<ScanResult> norm_calibration(DistributionKind kind, std::size_t n,
                                                std::span<const double> k_values, std::size_t pop,
                                                const RandomSource& rng)
{
    detail::require_tn_or_dg(kind, "norm_calibration");
    detail::require_pop(pop, 1000, "norm_calibration");
    const std::string series = "kind=" + std::string(to_string(kind)) + ",n=" + std::to_string(n);
    std::vector<ScanResult> out;
    for (std::size_t idx = 0; idx < k_values.size(); ++idx) {
        const double k = k_values[idx];
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = k * static_cast<double>(i + 1);
        }
        const StepSizeVector steps(s);
        RandomSource stream = rng.substream(idx);
        RunningStats l1_stats;
        RunningStats l2_stats;
        std::int64_t l1_total = 0;
        for (std::size_t j = 0; j < pop; ++j) {
            const IntegerVector z = uncorrelated_mutation(steps, kind, stream);
            const std::int64_t l1 = l1_norm(z);
            l1_total += l1;
            l1_stats.add(static_cast<double>(l1));
            l2_stats.add(l2_norm(z));
        }
        const double theory = 0.5 * k * static_cast<double>(n) * static_cast<double>(n + 1);
        out.push_back({series, k, "mean_l1", static_cast<double>(l1_total) / static_cast<double>(pop),
                       l1_stats.std_error()});
        out.push_back({series, k, "mean_l2", l2_stats.mean(), l2_stats.std_error()});
        out.push_back({series, k, "theory_l1", theory, 0.0});
    }
    return out;
}

/// Empirical E||z||_1 of n-dimensional TN(sigma) samples against n sqrt(2/pi) sigma.
inline std::vector<ScanResult> sigma_step_validation(std::span<const std::size_t> n_values,
                                                     std::span<const double> sigma_grid, std::size_t pop,
                                                     const RandomSource& rng)
{
    detail::require_pop(pop, 1000, "sigma_step_validation");
    std::vector<ScanResult> out;
    for (std::size_t a = 0; a < n_values.size(); ++a) {
        const std::size_t n = n_values[a];
        const std::string series = "n=" + std::to_string(n);
        for (std::size_t b = 0; b < sigma_grid.size(); ++b) {
            const double sigma = sigma_grid[b];
            const DistParam param = DistParam::tn(sigma);
            RandomSource stream = rng.substream(a * 1'000'003ULL + b);
            RunningStats stats;
            std::int64_t total = 0;
            for (std::size_t j = 0; j < pop; ++j) {
                std::int64_t l1 = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::int64_t z = sample(param, stream);
                    l1 += z < 0 ? -z : z;
                }
                total += l1;
                stats.add(static_cast<double>(l1));
            }
            const double empirical = static_cast<double>(total) / static_cast<double>(pop);
            const double predicted = static_cast<double>(n) * std::sqrt(2.0 / std::numbers::pi) * sigma;
            out.push_back({series, sigma, "empirical_S", empirical, stats.std_error()});
            out.push_back({series, sigma, "predicted_S", predicted, 0.0});
            out.push_back({series, sigma, "rel_error", (empirical - predicted) / predicted,
                           stats.std_error() / predicted});
        }
    }
    return out;
}

struct HistogramRow {
    std::int64_t k;
    double exact;
    double empirical;
    std::optional<double> approx;
};

/// Exact pmf, empirical frequency (and for TN the approximate pmf) per k.
inline std::vector<HistogramRow> pmf_histogram(DistributionKind kind, double s, std::size_t pop,
                                               const RandomSource& rng)
{
    detail::require_tn_or_dg(kind, "pmf_histogram");
    detail::require_pop(pop, 10000, "pmf_histogram");
    const DistParam param = param_from_step(kind, s);
    RandomSource stream = rng.substream(0);
    std::map<std::int64_t, std::uint64_t> counts;
    std::int64_t window = support_window(param, 1e-9);
    for (std::size_t j = 0; j < pop; ++j) {
        const std::int64_t z = sample(param, stream);
        ++counts[z];
        window = std::max(window, z < 0 ? -z : z);
    }
    std::vector<HistogramRow> rows;
    rows.reserve(static_cast<std::size_t>(2 * window + 1));
    for (std::int64_t k = -window; k <= window; ++k) {
        const auto it = counts.find(k);
        const double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(pop);
        std::optional<double> approx;
        if (kind == DistributionKind::TN) {
            approx = tn_pmf_approx(param.value, k);
        }
        rows.push_back({k, pmf_exact(param, k), freq, approx});
    }
    return rows;
}

inline double total_variation(std::span<const HistogramRow> rows)
{
    double tv = 0.0;
    double exact_mass = 0.0;
    for (const auto& r : rows) {
        tv += std::abs(r.exact - r.empirical);
        exact_mass += r.exact;
    }
    // Exact mass outside the rows has empirical frequency zero.
    tv += std::max(0.0, 1.0 - exact_mass);
    return 0.5 * tv;
}

enum class RotationKind { TN, DG, FTN };

inline std::string_view to_string(RotationKind kind) noexcept
{
    switch (kind) {
    case RotationKind::TN: return "tn";
    case RotationKind::DG: return "dg";
    case RotationKind::FTN: return "ftn";
    }
    return "?";
}

inline std::optional<RotationKind> parse_rotation_kind(std::string_view name) noexcept
{
    if (name == "tn") return RotationKind::TN;
    if (name == "dg") return RotationKind::DG;
    if (name == "ftn") return RotationKind::FTN;
    return std::nullopt;
}

struct Heatmap {
    double theta = 0.0;
    bool defined = true;
    Histogram2D counts;
};

struct RotationScan {
    std::vector<ScanResult> stats;
    std::vector<Heatmap> heatmaps;
};

/// A fixed base population for one (kind, s1, s2) series, rotated at every angle.
class RotatedPopulation2D {
public:
    RotatedPopulation2D(RotationKind kind, double s1, double s2, std::size_t pop, const RandomSource& rng)
        : kind_(kind), steps_{s1, s2}
    {
        RandomSource stream = rng.substream(0);
        base_a_.reserve(pop);
        switch (kind) {
        case RotationKind::TN:
            for (std::size_t j = 0; j < pop; ++j) {
                base_a_.push_back(uncorrelated_mutation(steps_, DistributionKind::TN, stream));
            }
            break;
        case RotationKind::DG:
            base_b_.reserve(pop);
            for (std::size_t j = 0; j < pop; ++j) {
                base_a_.push_back(sample_geometric_vector(steps_, stream));
                base_b_.push_back(sample_geometric_vector(steps_, stream));
            }
            break;
        case RotationKind::FTN:
            normals_.reserve(pop);
            for (std::size_t j = 0; j < pop; ++j) {
                Eigen::Vector2d xi(stream.normal(), stream.normal());
                normals_.push_back(xi);
            }
            break;
        }
    }

    /// Rotated samples at angle theta; std::nullopt where the FTN covariance is undefined.
    std::optional<std::vector<IntegerVector>> at(double theta) const
    {
        const AngleVector alpha(2, {theta});
        std::vector<IntegerVector> out;
        if (kind_ == RotationKind::FTN) {
            const auto cov = build_ftn_covariance(steps_, alpha);
            if (!cov) {
                return std::nullopt;
            }
            const FtnSampler sampler(*cov);
            out.reserve(normals_.size());
            for (const auto& xi : normals_) {
                out.push_back(sampler.transform(xi));
            }
            return out;
        }
        const RotationProduct rotation(alpha);
        out.reserve(base_a_.size());
        for (std::size_t j = 0; j < base_a_.size(); ++j) {
            IntegerVector z = rotation.apply_rounded(base_a_[j]);
            if (kind_ == RotationKind::DG) {
                const IntegerVector g = rotation.apply_rounded(base_b_[j]);
                z[0] -= g[0];
                z[1] -= g[1];
            }
            out.push_back(std::move(z));
        }
        return out;
    }

private:
    RotationKind kind_;
    StepSizeVector steps_;
    std::vector<IntegerVector> base_a_;
    std::vector<IntegerVector> base_b_;
    std::vector<Eigen::Vector2d> normals_;
};

struct PairStats {
    RunningStats l1;
    double cov = 0.0;
    double cov_se = 0.0;
    double abs_cov = 0.0;
    double abs_cov_se = 0.0;
};

/// Mean l1, covariance and |z|-covariance of 2D samples with standard errors.
inline PairStats pair_stats(std::span<const IntegerVector> samples)
{
    PairStats out;
    const double count = static_cast<double>(samples.size());
    double m0 = 0.0, m1 = 0.0, a0 = 0.0, a1 = 0.0;
    for (const auto& z : samples) {
        out.l1.add(static_cast<double>(l1_norm(z)));
        m0 += static_cast<double>(z[0]);
        m1 += static_cast<double>(z[1]);
        a0 += static_cast<double>(std::abs(z[0]));
        a1 += static_cast<double>(std::abs(z[1]));
    }
    m0 /= count;
    m1 /= count;
    a0 /= count;
    a1 /= count;
    RunningStats prod;
    RunningStats abs_prod;
    for (const auto& z : samples) {
        prod.add((static_cast<double>(z[0]) - m0) * (static_cast<double>(z[1]) - m1));
        abs_prod.add((static_cast<double>(std::abs(z[0])) - a0) * (static_cast<double>(std::abs(z[1])) - a1));
    }
    const double unbias = count / (count - 1.0);
    out.cov = prod.mean() * unbias;
    out.cov_se = prod.std_error() * unbias;
    out.abs_cov = abs_prod.mean() * unbias;
    out.abs_cov_se = abs_prod.std_error() * unbias;
    return out;
}

/// Mean l1 / covariance / |z|-covariance of rotated 2D populations over theta.
inline RotationScan rotation_scan(RotationKind kind, double s1, double s2, std::span<const double> thetas,
                                  std::size_t pop, const RandomSource& rng, bool with_heatmaps = false)
{
    detail::require_pop(pop, 1000, "rotation_scan");
    const std::string series = "kind=" + std::string(to_string(kind)) + ",s1=" + std::to_string(s1).substr(0, 6) +
                               ",s2=" + std::to_string(s2).substr(0, 6);
    const RotatedPopulation2D base(kind, s1, s2, pop, rng);
    RotationScan scan;
    for (double theta : thetas) {
        const auto samples = base.at(theta);
        if (!samples) {
            for (const char* stat : {"mean_l1", "cov", "abs_cov"}) {
                scan.stats.push_back({series, theta, stat, 0.0, 0.0, false});
            }
            scan.stats.push_back({series, theta, "defined", 0.0, 0.0});
            if (with_heatmaps) {
                scan.heatmaps.push_back({theta, false, {}});
            }
            continue;
        }
        const PairStats st = pair_stats(*samples);
        scan.stats.push_back({series, theta, "mean_l1", st.l1.mean(), st.l1.std_error()});
        scan.stats.push_back({series, theta, "cov", st.cov, st.cov_se});
        scan.stats.push_back({series, theta, "abs_cov", st.abs_cov, st.abs_cov_se});
        scan.stats.push_back({series, theta, "defined", 1.0, 0.0});
        if (with_heatmaps) {
            Heatmap map{theta, true, {}};
            for (const auto& z : *samples) {
                ++map.counts[{z[0], z[1]}];
            }
            scan.heatmaps.push_back(std::move(map));
        }
    }
    return scan;
}

/// Exact entropies of DU, SB, TN (exact and approximate pmf) and DG at equal mean step S.
inline std::vector<ScanResult> entropy_scan_1d(std::span<const double> s_grid)
{
    std::vector<ScanResult> out;
    for (double s : s_grid) {
        const double sigma = param_from_step(DistributionKind::TN, s).value;
        out.push_back({"1d", s, "H_DU", entropy_exact(param_from_step(DistributionKind::DU, s)), 0.0});
        out.push_back({"1d", s, "H_SB", entropy_exact(param_from_step(DistributionKind::SB, s)), 0.0});
        out.push_back({"1d", s, "H_TN", entropy_exact(DistParam::tn(sigma)), 0.0});
        out.push_back({"1d", s, "H_TN_approx", entropy_tn_approx(sigma), 0.0});
        out.push_back({"1d", s, "H_DG", entropy_exact(param_from_step(DistributionKind::DG, s)), 0.0});
    }
    return out;
}

namespace detail {

/// Plug-in entropy of 2D samples with the standard error of the -log2 f estimator.
inline ScanResult entropy_of_samples(std::string series, double x, std::span<const IntegerVector> samples)
{
    Histogram2D counts;
    for (const auto& z : samples) {
        ++counts[{z[0], z[1]}];
    }
    const double total = static_cast<double>(samples.size());
    RunningStats info;
    for (const auto& z : samples) {
        info.add(-std::log2(static_cast<double>(counts[{z[0], z[1]}]) / total));
    }
    return {std::move(series), x, "H_plugin", plugin_entropy(counts), info.std_error()};
}

} // namespace detail

/// Plug-in entropy of uncorrelated 2D samples with steps (s1, s2) over an s2 sweep.
inline std::vector<ScanResult> entropy_2d_uncorrelated(DistributionKind kind, double s1,
                                                       std::span<const double> s2_grid, std::size_t pop,
                                                       const RandomSource& rng)
{
    detail::require_tn_or_dg(kind, "entropy_2d");
    detail::require_pop(pop, 10000, "entropy_2d");
    const std::string series = "kind=" + std::string(to_string(kind)) + ",s1=" + std::to_string(s1).substr(0, 6);
    std::vector<ScanResult> out;
    for (std::size_t idx = 0; idx < s2_grid.size(); ++idx) {
        const StepSizeVector steps{s1, s2_grid[idx]};
        RandomSource stream = rng.substream(idx);
        std::vector<IntegerVector> samples;
        samples.reserve(pop);
        for (std::size_t j = 0; j < pop; ++j) {
            samples.push_back(uncorrelated_mutation(steps, kind, stream));
        }
        out.push_back(detail::entropy_of_samples(series, s2_grid[idx], samples));
    }
    return out;
}

/// Plug-in entropy of correlated (corr_mutate) 2D samples over a theta sweep.
inline std::vector<ScanResult> entropy_2d_correlated(DistributionKind kind, double s1, double s2,
                                                     std::span<const double> thetas, std::size_t pop,
                                                     const RandomSource& rng)
{
    detail::require_tn_or_dg(kind, "entropy_2d");
    detail::require_pop(pop, 10000, "entropy_2d");
    const std::string series = "kind=" + std::string(to_string(kind)) + ",s1=" + std::to_string(s1).substr(0, 6) +
                               ",s2=" + std::to_string(s2).substr(0, 6);
    const RotatedPopulation2D base(kind == DistributionKind::TN ? RotationKind::TN : RotationKind::DG, s1, s2, pop,
                                   rng);
    std::vector<ScanResult> out;
    for (double theta : thetas) {
        out.push_back(detail::entropy_of_samples(series, theta, *base.at(theta)));
    }
    return out;
}

enum class Grouping { Separable, NonSeparable, All };

inline std::string_view to_string(Grouping g) noexcept
{
    switch (g) {
    case Grouping::Separable: return "separable";
    case Grouping::NonSeparable: return "non-separable";
    case Grouping::All: return "all";
    }
    return "?";
}

inline std::optional<Grouping> parse_grouping(std::string_view name) noexcept
{
    if (name == "separable") return Grouping::Separable;
    if (name == "non-separable" || name == "nonseparable") return Grouping::NonSeparable;
    if (name == "all") return Grouping::All;
    return std::nullopt;
}

/// (kind, n, c, seed) identifies an instance.
using InstanceKey = std::tuple<int, std::size_t, double, std::uint64_t>;

inline InstanceKey instance_key(const InstanceDescriptor& d)
{
    return {static_cast<int>(d.kind), d.n, d.c, d.seed};
}

struct FinalValueSummary {
    InstanceDescriptor instance;
    EsVariant variant;
    std::size_t runs = 0;
    double mean_f = 0.0;
    double median_f = 0.0;
    double best_f = 0.0;
};

/// Mean / median / best final best-so-far value per (instance, variant), ordered by instance then variant.
inline std::vector<FinalValueSummary> summarize_final_values(std::span<const RunRecord> records)
{
    std::map<std::pair<InstanceKey, int>, std::pair<InstanceDescriptor, std::vector<double>>> groups;
    for (const auto& r : records) {
        if (!r.instance) {
            throw PreconditionError("run record without instance descriptor: " + r.run_id);
        }
        auto& slot = groups[{instance_key(*r.instance), static_cast<int>(r.variant)}];
        slot.first = *r.instance;
        slot.second.push_back(r.best_f);
    }
    std::vector<FinalValueSummary> out;
    for (auto& [key, value] : groups) {
        auto& values = value.second;
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) sum += v;
        const std::size_t m = values.size();
        const double median = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
        out.push_back({value.first, static_cast<EsVariant>(key.second), m, sum / static_cast<double>(m), median,
                       values.front()});
    }
    return out;
}

struct DominanceMatrix {
    std::vector<EsVariant> variants;
    /// fraction(a, b): share of instances where a's mean final value beats b's (ties count 1/2).
    Eigen::MatrixXd fraction;
    std::size_t instances = 0;

    double score(std::size_t a) const
    {
        const auto k = static_cast<Eigen::Index>(variants.size());
        if (k < 2) return 0.5;
        double sum = 0.0;
        for (Eigen::Index b = 0; b < k; ++b) {
            if (b != static_cast<Eigen::Index>(a)) sum += fraction(static_cast<Eigen::Index>(a), b);
        }
        return sum / static_cast<double>(k - 1);
    }

    /// Variants ordered by mean row fraction, best first.
    std::vector<EsVariant> ranking() const
    {
        std::vector<std::size_t> idx(variants.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score(a) > score(b); });
        std::vector<EsVariant> out;
        for (std::size_t i : idx) out.push_back(variants[i]);
        return out;
    }
};

inline bool in_group(HessianKind kind, Grouping g) noexcept
{
    switch (g) {
    case Grouping::Separable: return is_separable(kind);
    case Grouping::NonSeparable: return !is_separable(kind);
    case Grouping::All: return true;
    }
    return false;
}

/// Pairwise comparison of mean final values over the instances of a group.
inline DominanceMatrix pairwise_dominance(std::span<const RunRecord> records, Grouping grouping)
{
    std::vector<RunRecord> selected;
    for (const auto& r : records) {
        if (!r.instance) {
            throw PreconditionError("run record without instance descriptor: " + r.run_id);
        }
        if (in_group(r.instance->kind, grouping)) {
            selected.push_back(r);
        }
    }
    const auto summary = summarize_final_values(selected);
    std::map<int, std::map<InstanceKey, const FinalValueSummary*>> by_variant;
    for (const auto& s : summary) {
        by_variant[static_cast<int>(s.variant)][instance_key(s.instance)] = &s;
    }
    if (by_variant.size() < 2) {
        throw PreconditionError("pairwise dominance needs at least 2 variants in the group");
    }
    std::map<InstanceKey, std::size_t> coverage;
    for (const auto& [variant, per_instance] : by_variant) {
        for (const auto& [key, s] : per_instance) {
            if (s->runs < 2) {
                throw PreconditionError("insufficient runs: variant " + std::string(to_string(s->variant)) +
                                        " has " + std::to_string(s->runs) + " run(s) on an instance");
            }
            ++coverage[key];
        }
    }
    std::vector<InstanceKey> shared;
    for (const auto& [key, count] : coverage) {
        if (count != by_variant.size()) {
            throw PreconditionError("insufficient runs: not every variant was run on every instance");
        }
        shared.push_back(key);
    }
    DominanceMatrix dm;
    for (const auto& [variant, per_instance] : by_variant) {
        dm.variants.push_back(static_cast<EsVariant>(variant));
    }
    const auto k = static_cast<Eigen::Index>(dm.variants.size());
    dm.instances = shared.size();
    dm.fraction = Eigen::MatrixXd::Constant(k, k, 0.5);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            if (a == b) continue;
            const auto& ma = by_variant[static_cast<int>(dm.variants[static_cast<std::size_t>(a)])];
            const auto& mb = by_variant[static_cast<int>(dm.variants[static_cast<std::size_t>(b)])];
            double wins = 0.0;
            for (const auto& key : shared) {
                const double fa = ma.at(key)->mean_f;
                const double fb = mb.at(key)->mean_f;
                wins += fa < fb ? 1.0 : (fa == fb ? 0.5 : 0.0);
            }
            dm.fraction(a, b) = shared.empty() ? 0.5 : wins / static_cast<double>(shared.size());
        }
    }
    return dm;
}

/// All (variant, instance, seed) runs of a campaign; record order is variant-major, then instance, then seed.
inline std::vector<RunRecord> run_campaign(std::span<const EsVariant> variants,
                                           std::span<const QuadraticInstance> instances,
                                           std::span<const std::uint64_t> seeds, std::uint64_t budget,
                                           std::size_t workers, const std::function<void(EsConfig&)>& tweak = {})
{
    const std::size_t total = variants.size() * instances.size() * seeds.size();
    std::vector<RunRecord> records(total);
    parallel_for(total, workers, [&](std::size_t job) {
        const std::size_t si = job % seeds.size();
        const std::size_t ii = (job / seeds.size()) % instances.size();
        const std::size_t vi = job / (seeds.size() * instances.size());
        EsConfig cfg = EsConfig::defaults(variants[vi], instances[ii].n, budget);
        if (tweak) tweak(cfg);
        records[job] = run(variants[vi], instances[ii], cfg, seeds[si]);
    });
    return records;
}

} // namespace ies

#endif // IES_EXPERIMENTS_HPP
