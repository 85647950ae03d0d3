#ifndef IES_STRATEGIES_HPP
#define IES_STRATEGIES_HPP

// Integer evolution strategies.
//
// (1+1)-DG / (1+1)-TN: one parent, scalar step shared by all coordinates,
// 1/5th success rule over a window of W evaluations.
//
// Correlated / uncorrelated DG / TN: (mu, lambda) comma selection with
// Schwefel self-adaptation of per-coordinate steps and, for the correlated
// variants, of the rotation angles (mutation via corr_mutate).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ies/core.hpp"
#include "ies/correlate.hpp"
#include "ies/distributions.hpp"
#include "ies/problems.hpp"
#include "ies/random.hpp"

namespace ies {

enum class EsVariant { OnePlusOneDG, OnePlusOneTN, CorrelatedDG, CorrelatedTN, UncorrelatedDG, UncorrelatedTN };

inline constexpr std::array<EsVariant, 6> all_variants{EsVariant::OnePlusOneDG,   EsVariant::OnePlusOneTN,
                                                       EsVariant::CorrelatedDG,   EsVariant::CorrelatedTN,
                                                       EsVariant::UncorrelatedDG, EsVariant::UncorrelatedTN};

inline constexpr std::array<EsVariant, 4> population_variants{EsVariant::CorrelatedDG, EsVariant::CorrelatedTN,
                                                              EsVariant::UncorrelatedDG,
                                                              EsVariant::UncorrelatedTN};

inline std::string_view to_string(EsVariant v) noexcept
{
    switch (v) {
    case EsVariant::OnePlusOneDG: return "1+1-dg";
    case EsVariant::OnePlusOneTN: return "1+1-tn";
    case EsVariant::CorrelatedDG: return "corr-dg";
    case EsVariant::CorrelatedTN: return "corr-tn";
    case EsVariant::UncorrelatedDG: return "uncorr-dg";
    case EsVariant::UncorrelatedTN: return "uncorr-tn";
    }
    return "?";
}

inline std::optional<EsVariant> parse_variant(std::string_view name) noexcept
{
    for (EsVariant v : all_variants) {
        if (name == to_string(v)) return v;
    }
    return std::nullopt;
}

constexpr bool is_one_plus_one(EsVariant v) noexcept
{
    return v == EsVariant::OnePlusOneDG || v == EsVariant::OnePlusOneTN;
}

constexpr bool is_correlated(EsVariant v) noexcept
{
    return v == EsVariant::CorrelatedDG || v == EsVariant::CorrelatedTN;
}

constexpr DistributionKind mutation_kind(EsVariant v) noexcept
{
    switch (v) {
    case EsVariant::OnePlusOneDG:
    case EsVariant::CorrelatedDG:
    case EsVariant::UncorrelatedDG: return DistributionKind::DG;
    default: return DistributionKind::TN;
    }
}

struct OneFifthRule {
    /// Evaluations per adaptation window; 0 means n.
    std::size_t window = 0;
    double factor = 0.85;
};

struct EsConfig {
    EsVariant variant = EsVariant::UncorrelatedDG;
    std::size_t n = 0;
    std::size_t mu = 15;
    std::size_t lambda = 100;
    double tau_g = 0.0;
    double tau_l = 0.0;
    double beta = 0.0873;
    std::uint64_t budget = 0;
    std::int64_t init_halfwidth = 50;
    double s_init = 10.0;
    double s_floor = 1e-12;
    OneFifthRule one_fifth;

    /// tau_g = 1/sqrt(2n), tau_l = 1/sqrt(2 sqrt(n)), beta = 0.0873, (mu, lambda) = (15, 100).
    static EsConfig defaults(EsVariant variant, std::size_t n, std::uint64_t budget)
    {
        EsConfig cfg;
        cfg.variant = variant;
        cfg.n = n;
        cfg.budget = budget;
        cfg.tau_g = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
        cfg.tau_l = 1.0 / std::sqrt(2.0 * std::sqrt(static_cast<double>(n)));
        return cfg;
    }

    std::size_t window() const noexcept { return one_fifth.window == 0 ? n : one_fifth.window; }

    void validate() const
    {
        if (n == 0) throw DomainError("dimension must be positive");
        if (!(s_init > 0.0) || !(s_floor > 0.0) || s_floor > s_init) {
            throw DomainError("need 0 < s_floor <= s_init");
        }
        if (init_halfwidth < 0) throw DomainError("init box half-width must be non-negative");
        if (!is_one_plus_one(variant)) {
            if (mu == 0 || mu >= lambda) throw DomainError("comma selection needs 0 < mu < lambda");
            if (tau_g < 0.0 || tau_l < 0.0 || beta < 0.0) throw DomainError("learning rates must be non-negative");
        } else if (!(one_fifth.factor > 0.0 && one_fifth.factor < 1.0)) {
            throw DomainError("1/5th rule factor must lie in (0, 1)");
        }
    }
};

struct Individual {
    IntegerVector x;
    std::vector<double> s;
    std::optional<AngleVector> alpha;
    double f = std::numeric_limits<double>::infinity();
};

struct TracePoint {
    std::uint64_t eval;
    double best_f;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Independent streams for one run. Angle deviates have their own stream so
/// that main-stream consumption does not depend on whether angles exist.
struct EsRandom {
    RandomSource main;
    RandomSource angles;

    explicit EsRandom(std::uint64_t seed) : main(seed, 0), angles(RandomSource(seed, 0).substream(1)) {}
};

struct EsState {
    std::vector<Individual> parents;
    std::uint64_t evaluations = 0;
    IntegerVector best_x;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<TracePoint> trace;
    std::size_t window_evals = 0;
    std::size_t window_successes = 0;

    void record(const IntegerVector& x, double f)
    {
        ++evaluations;
        if (f < best_f) {
            best_f = f;
            best_x = x;
            trace.push_back({evaluations, f});
        }
    }
};

template <class F>
concept IntegerObjective = std::invocable<F&, std::span<const std::int64_t>> &&
                           std::convertible_to<std::invoke_result_t<F&, std::span<const std::int64_t>>, double>;

/// Lognormal step update (one global deviate per offspring), additive angle
/// update, then mutation of x with the new strategy parameters.
inline Individual self_adapt(const Individual& parent, const EsConfig& cfg, EsRandom& rng)
{
    Individual child;
    const std::size_t n = parent.x.size();
    const double global = rng.main.normal();
    child.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double updated = parent.s[i] * std::exp(cfg.tau_g * global + cfg.tau_l * rng.main.normal());
        // Upper clamp only guards against overflow to inf.
        child.s[i] = std::clamp(updated, cfg.s_floor, 1e12);
    }
    if (parent.alpha) {
        child.alpha = *parent.alpha;
        for (std::size_t j = 0; j < child.alpha->size(); ++j) {
            child.alpha->set(j, (*child.alpha)[j] + cfg.beta * rng.angles.normal());
        }
    }
    const StepSizeVector steps(child.s);
    const DistributionKind kind = mutation_kind(cfg.variant);
    const IntegerVector z = child.alpha ? corr_mutate(steps, *child.alpha, kind, rng.main)
                                        : uncorrelated_mutation(steps, kind, rng.main);
    child.x = parent.x;
    for (std::size_t i = 0; i < n; ++i) {
        child.x[i] += z[i];
    }
    return child;
}

template <IntegerObjective F>
void one_plus_one_step(EsState& state, F& objective, const EsConfig& cfg, EsRandom& rng)
{
    if (!is_one_plus_one(cfg.variant) || state.parents.size() != 1) {
        throw PreconditionError("one_plus_one_step needs a (1+1) variant with exactly one parent");
    }
    Individual& parent = state.parents.front();
    const StepSizeVector steps(parent.s);
    const IntegerVector z = uncorrelated_mutation(steps, mutation_kind(cfg.variant), rng.main);
    IntegerVector x = parent.x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += z[i];
    }
    const double f = objective(std::span<const std::int64_t>(x));
    state.record(x, f);
    if (f < parent.f) {
        ++state.window_successes;
    }
    if (f <= parent.f) {
        parent.x = std::move(x);
        parent.f = f;
    }
    if (++state.window_evals == cfg.window()) {
        double s = parent.s.front();
        const std::size_t five_successes = 5 * state.window_successes;
        if (five_successes > state.window_evals) {
            s /= cfg.one_fifth.factor;
        } else if (five_successes < state.window_evals) {
            s *= cfg.one_fifth.factor;
        }
        s = std::clamp(s, cfg.s_floor, 1e12);
        std::fill(parent.s.begin(), parent.s.end(), s);
        state.window_evals = 0;
        state.window_successes = 0;
    }
}

template <IntegerObjective F>
void population_step(EsState& state, F& objective, const EsConfig& cfg, EsRandom& rng)
{
    if (is_one_plus_one(cfg.variant) || state.parents.empty()) {
        throw PreconditionError("population_step needs a population variant with parents");
    }
    std::vector<Individual> offspring;
    offspring.reserve(cfg.lambda);
    const auto last = static_cast<std::int64_t>(state.parents.size()) - 1;
    for (std::size_t k = 0; k < cfg.lambda; ++k) {
        const auto& parent = state.parents[static_cast<std::size_t>(rng.main.uniform_int(0, last))];
        Individual child = self_adapt(parent, cfg, rng);
        child.f = objective(std::span<const std::int64_t>(child.x));
        state.record(child.x, child.f);
        offspring.push_back(std::move(child));
    }
    std::stable_sort(offspring.begin(), offspring.end(),
                     [](const Individual& a, const Individual& b) { return a.f < b.f; });
    offspring.resize(cfg.mu);
    state.parents = std::move(offspring);
}

/// Initial population around center: x = center + U{-h..h}^n, s = s_init, alpha = 0.
template <IntegerObjective F>
EsState initialize(F& objective, std::span<const std::int64_t> center, const EsConfig& cfg, EsRandom& rng)
{
    EsState state;
    const std::size_t count = is_one_plus_one(cfg.variant) ? 1 : cfg.mu;
    for (std::size_t k = 0; k < count; ++k) {
        Individual ind;
        ind.x.assign(center.begin(), center.end());
        for (auto& v : ind.x) {
            v += rng.main.uniform_int(-cfg.init_halfwidth, cfg.init_halfwidth);
        }
        ind.s.assign(cfg.n, cfg.s_init);
        if (is_correlated(cfg.variant)) {
            ind.alpha = AngleVector(cfg.n);
        }
        ind.f = objective(std::span<const std::int64_t>(ind.x));
        state.record(ind.x, ind.f);
        state.parents.push_back(std::move(ind));
    }
    return state;
}

struct InstanceDescriptor {
    HessianKind kind = HessianKind::Sphere;
    std::size_t n = 0;
    double c = 1.0;
    std::uint64_t seed = 0;
    IntegerVector xi0;

    static InstanceDescriptor of(const QuadraticInstance& inst)
    {
        return {inst.kind, inst.n, inst.c, inst.seed, inst.xi0};
    }
};

struct RunRecord {
    std::string run_id;
    std::uint64_t seed = 0;
    EsVariant variant = EsVariant::UncorrelatedDG;
    std::optional<InstanceDescriptor> instance;
    std::vector<TracePoint> trace;
    IntegerVector best_x;
    double best_f = std::numeric_limits<double>::infinity();
    std::uint64_t evaluations = 0;
};

/// Run until the budget is exhausted. Population variants only start a
/// generation that fits into the remaining budget; the initial population is
/// always evaluated.
template <IntegerObjective F>
RunRecord run_objective(F& objective, std::span<const std::int64_t> center, const EsConfig& cfg,
                        std::uint64_t seed)
{
    cfg.validate();
    if (center.size() != cfg.n) {
        throw DimensionError("center dimension does not match config");
    }
    EsRandom rng(seed);
    EsState state = initialize(objective, center, cfg, rng);
    if (is_one_plus_one(cfg.variant)) {
        while (state.evaluations < cfg.budget) {
            one_plus_one_step(state, objective, cfg, rng);
        }
    } else {
        while (state.evaluations + cfg.lambda <= cfg.budget) {
            population_step(state, objective, cfg, rng);
        }
    }
    if (state.trace.empty() || state.trace.back().eval != state.evaluations) {
        state.trace.push_back({state.evaluations, state.best_f});
    }
    RunRecord rec;
    rec.seed = seed;
    rec.variant = cfg.variant;
    rec.trace = std::move(state.trace);
    rec.best_x = std::move(state.best_x);
    rec.best_f = state.best_f;
    rec.evaluations = state.evaluations;
    return rec;
}

inline RunRecord run(EsVariant variant, const QuadraticInstance& inst, EsConfig cfg, std::uint64_t seed)
{
    cfg.variant = variant;
    auto objective = [&inst](std::span<const std::int64_t> x) { return evaluate(inst, x); };
    RunRecord rec = run_objective(objective, inst.xi0, cfg, seed);
    rec.instance = InstanceDescriptor::of(inst);
    rec.run_id = std::string(to_string(variant)) + "/" + inst.label() + "/iseed=" + std::to_string(inst.seed) +
                 "/seed=" + std::to_string(seed);
    return rec;
}

/// l1 distance from the best point to the instance optimum.
inline std::int64_t distance_to_optimum(const RunRecord& rec)
{
    if (!rec.instance) {
        throw PreconditionError("run record carries no instance");
    }
    std::int64_t d = 0;
    for (std::size_t i = 0; i < rec.best_x.size(); ++i) {
        const std::int64_t diff = rec.best_x[i] - rec.instance->xi0[i];
        d += diff < 0 ? -diff : diff;
    }
    return d;
}

} // namespace ies

#endif // IES_STRATEGIES_HPP
