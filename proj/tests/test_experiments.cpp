#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ies/experiments.hpp"

using namespace ies;

namespace {

const ScanResult& find(const std::vector<ScanResult>& rows, double x, const std::string& stat)
{
    for (const auto& r : rows) {
        if (r.x == x && r.statistic == stat) return r;
    }
    throw std::runtime_error("row not found: " + stat);
}

} // namespace

TEST(Grid, LinspaceAndTheta)
{
    const auto g = linspace(1.0, 2.0, 5);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g[1], 1.25);
    EXPECT_EQ(g.back(), 2.0);
    const auto t = theta_grid(3);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_DOUBLE_EQ(t.back(), std::numbers::pi / 2);
}

TEST(Calibration, TheoryAndPreconditions)
{
    const std::vector<double> ks{1.0, 2.0};
    const auto rows = norm_calibration(DistributionKind::DG, 2, ks, 20000, RandomSource(1));
    EXPECT_EQ(find(rows, 1.0, "theory_l1").value, 3.0);
    EXPECT_EQ(find(rows, 2.0, "theory_l1").value, 6.0);
    for (double k : ks) {
        const auto& m = find(rows, k, "mean_l1");
        EXPECT_NEAR(m.value, 3.0 * k, 5 * m.std_error + 0.02 * 3.0 * k);
    }
    EXPECT_THROW(norm_calibration(DistributionKind::DG, 2, ks, 999, RandomSource(1)), PreconditionError);
    EXPECT_THROW(norm_calibration(DistributionKind::SB, 2, ks, 5000, RandomSource(1)), DomainError);
}

TEST(SigmaStep, PredictionAndSmallSigma)
{
    const std::vector<std::size_t> ns{1};
    const std::vector<double> sigmas{1.2533141373155001, 0.05};
    const auto rows = sigma_step_validation(ns, sigmas, 20000, RandomSource(2));
    EXPECT_NEAR(find(rows, sigmas[0], "predicted_S").value, 1.0, 1e-12);
    EXPECT_EQ(find(rows, sigmas[1], "empirical_S").value, 0.0);
    EXPECT_EQ(find(rows, sigmas[1], "rel_error").value, -1.0);
}

TEST(SigmaStep, StandardErrorShrinksWithDimension)
{
    // The relative sampling error falls like 1/sqrt(n); the rounding bias does not.
    const std::vector<std::size_t> ns{1, 16};
    const std::vector<double> sigmas{5.0};
    const auto rows = sigma_step_validation(ns, sigmas, 10000, RandomSource(3));
    std::vector<double> se;
    for (const auto& r : rows) {
        if (r.statistic == "rel_error") se.push_back(r.std_error);
    }
    ASSERT_EQ(se.size(), 2u);
    EXPECT_NEAR(se[1] / se[0], 0.25, 0.03);
}

TEST(Histogram, DgShapeAndTotalVariation)
{
    const auto rows = pmf_histogram(DistributionKind::DG, 1.0, 100000, RandomSource(4));
    double peak = 0.0;
    for (const auto& r : rows) {
        if (r.k == 0) peak = r.exact;
        EXPECT_FALSE(r.approx.has_value());
    }
    EXPECT_NEAR(peak, std::sqrt(2.0) - 1.0, 1e-12);
    // log pmf is linear in |k| for the double geometric.
    const auto at = [&](std::int64_t k) {
        for (const auto& r : rows) {
            if (r.k == k) return r.exact;
        }
        return 0.0;
    };
    EXPECT_NEAR(std::log(at(1)) - std::log(at(0)), std::log(at(3)) - std::log(at(2)), 1e-12);
    EXPECT_NEAR(at(-2), at(2), 1e-15);
    EXPECT_LT(total_variation(rows), 0.01);

    const auto tn = pmf_histogram(DistributionKind::TN, 2.0, 100000, RandomSource(4));
    for (const auto& r : tn) EXPECT_TRUE(r.approx.has_value());
    EXPECT_LT(total_variation(tn), 0.01);
    EXPECT_THROW(pmf_histogram(DistributionKind::TN, 2.0, 9999, RandomSource(4)), PreconditionError);
}

TEST(Rotation, ZeroAngleMatchesMarginalSteps)
{
    const std::vector<double> thetas{0.0};
    for (RotationKind kind : {RotationKind::TN, RotationKind::DG, RotationKind::FTN}) {
        const auto scan = rotation_scan(kind, 1.0, 3.0, thetas, 100000, RandomSource(5));
        const auto& m = find(scan.stats, 0.0, "mean_l1");
        ASSERT_TRUE(m.defined) << to_string(kind);
        EXPECT_NEAR(m.value, 4.0, 0.03 * 4.0) << to_string(kind);
        EXPECT_NEAR(find(scan.stats, 0.0, "cov").value, 0.0, 5 * find(scan.stats, 0.0, "cov").std_error);
    }
}

TEST(Rotation, HeatmapCountsAndFtnMarker)
{
    const auto thetas = theta_grid(5);
    const std::size_t pop = 4000;
    const auto scan = rotation_scan(RotationKind::DG, 1.0, 2.0, thetas, pop, RandomSource(6), true);
    ASSERT_EQ(scan.heatmaps.size(), thetas.size());
    for (const auto& h : scan.heatmaps) {
        std::uint64_t total = 0;
        for (const auto& [bin, c] : h.counts) total += c;
        EXPECT_EQ(total, pop);
    }
    // At pi/4 with distinct variances the FTN angle is degenerate.
    const std::vector<double> ftn_thetas{0.3, std::numbers::pi / 4};
    const auto ftn = rotation_scan(RotationKind::FTN, 1.0, 2.0, ftn_thetas, pop, RandomSource(6), true);
    EXPECT_EQ(find(ftn.stats, ftn_thetas[0], "defined").value, 1.0);
    EXPECT_EQ(find(ftn.stats, ftn_thetas[1], "defined").value, 0.0);
    EXPECT_FALSE(find(ftn.stats, ftn_thetas[1], "mean_l1").defined);
    EXPECT_FALSE(ftn.heatmaps[1].defined);
}

TEST(Rotation, StandardErrorScalesWithPopulation)
{
    const std::vector<double> thetas{0.4};
    const auto a = rotation_scan(RotationKind::TN, 2.0, 2.0, thetas, 40000, RandomSource(7));
    const auto b = rotation_scan(RotationKind::TN, 2.0, 2.0, thetas, 80000, RandomSource(7));
    const double ratio = find(b.stats, 0.4, "mean_l1").std_error / find(a.stats, 0.4, "mean_l1").std_error;
    EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.05);
}

TEST(Entropy, ScanOrderAndDegenerateLimit)
{
    const std::vector<double> s{0.5, 2.0};
    const auto rows = entropy_scan_1d(s);
    ASSERT_EQ(rows.size(), 10u);
    const char* order[] = {"H_DU", "H_SB", "H_TN", "H_TN_approx", "H_DG"};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(rows[i].statistic, order[i]);
    for (const auto& r : rows) EXPECT_GE(r.value, 0.0);

    std::vector<IntegerVector> same(100, IntegerVector{0, 0});
    EXPECT_EQ(detail::entropy_of_samples("x", 0.0, same).value, 0.0);
}

TEST(Entropy, UncorrelatedPairIsAdditive)
{
    const std::vector<double> s2{2.0};
    const auto rows = entropy_2d_uncorrelated(DistributionKind::DG, 1.0, s2, 100000, RandomSource(8));
    const double h1 = entropy_exact(param_from_step(DistributionKind::DG, 1.0));
    const double h2 = entropy_exact(param_from_step(DistributionKind::DG, 2.0));
    EXPECT_NEAR(rows.front().value, h1 + h2, 0.05);
    EXPECT_THROW(entropy_2d_uncorrelated(DistributionKind::DG, 1.0, s2, 9999, RandomSource(8)), PreconditionError);
}

TEST(Entropy, CorrelatedAtZeroAngleMatchesUncorrelated)
{
    const std::vector<double> thetas{0.0};
    const auto rows = entropy_2d_correlated(DistributionKind::TN, 1.0, 2.0, thetas, 100000, RandomSource(9));
    const double sigma1 = param_from_step(DistributionKind::TN, 1.0).value;
    const double sigma2 = param_from_step(DistributionKind::TN, 2.0).value;
    const double h = entropy_exact(DistParam::tn(sigma1)) + entropy_exact(DistParam::tn(sigma2));
    EXPECT_NEAR(rows.front().value, h, 0.05);
}

namespace {

RunRecord fake_run(EsVariant v, HessianKind kind, std::uint64_t iseed, double f)
{
    RunRecord r;
    r.variant = v;
    r.instance = InstanceDescriptor{kind, 2, 10.0, iseed, {0, 0}};
    r.best_f = f;
    r.trace = {{1, f}};
    return r;
}

} // namespace

TEST(Dominance, DiagonalComplementAndRanking)
{
    std::vector<RunRecord> recs;
    for (std::uint64_t inst = 0; inst < 4; ++inst) {
        for (int rep = 0; rep < 2; ++rep) {
            recs.push_back(fake_run(EsVariant::CorrelatedDG, HessianKind::RotatedEllipse, inst, 1.0));
            recs.push_back(fake_run(EsVariant::CorrelatedTN, HessianKind::RotatedEllipse, inst, inst < 3 ? 2.0 : 0.5));
            recs.push_back(fake_run(EsVariant::UncorrelatedDG, HessianKind::RotatedEllipse, inst, 1.0));
        }
    }
    const auto dm = pairwise_dominance(recs, Grouping::NonSeparable);
    EXPECT_EQ(dm.instances, 4u);
    ASSERT_EQ(dm.variants.size(), 3u);
    for (Eigen::Index a = 0; a < 3; ++a) {
        EXPECT_EQ(dm.fraction(a, a), 0.5);
        for (Eigen::Index b = 0; b < 3; ++b) {
            if (a != b) {
                EXPECT_DOUBLE_EQ(dm.fraction(a, b) + dm.fraction(b, a), 1.0);
            }
        }
    }
    // corr-dg beats corr-tn on 3 of 4 instances and ties uncorr-dg everywhere.
    EXPECT_DOUBLE_EQ(dm.fraction(0, 1), 0.75);
    EXPECT_DOUBLE_EQ(dm.fraction(0, 2), 0.5);
    EXPECT_EQ(dm.ranking().front(), EsVariant::CorrelatedDG);
    EXPECT_THROW(pairwise_dominance(recs, Grouping::Separable), PreconditionError);
}

TEST(Dominance, SingleRunIsInsufficient)
{
    std::vector<RunRecord> recs{fake_run(EsVariant::CorrelatedDG, HessianKind::Discus, 1, 1.0),
                                fake_run(EsVariant::CorrelatedTN, HessianKind::Discus, 1, 2.0)};
    EXPECT_THROW(pairwise_dominance(recs, Grouping::All), PreconditionError);
    recs.push_back(fake_run(EsVariant::CorrelatedDG, HessianKind::Discus, 1, 1.0));
    recs.push_back(fake_run(EsVariant::CorrelatedTN, HessianKind::Discus, 1, 2.0));
    recs.push_back(fake_run(EsVariant::CorrelatedDG, HessianKind::Discus, 2, 1.0));
    recs.push_back(fake_run(EsVariant::CorrelatedDG, HessianKind::Discus, 2, 1.0));
    EXPECT_THROW(pairwise_dominance(recs, Grouping::All), PreconditionError);
}

TEST(Campaign, OrderAndDeterminismAcrossWorkers)
{
    const auto suite = benchmark_suite(4, 10);
    const std::vector<QuadraticInstance> two(suite.begin(), suite.begin() + 2);
    const std::vector<EsVariant> variants{EsVariant::OnePlusOneDG, EsVariant::UncorrelatedTN};
    const std::vector<std::uint64_t> seeds{1, 2};
    const auto a = run_campaign(variants, two, seeds, 500, 1);
    const auto b = run_campaign(variants, two, seeds, 500, 3);
    ASSERT_EQ(a.size(), 8u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].run_id, b[i].run_id);
        EXPECT_EQ(a[i].trace, b[i].trace);
    }
    EXPECT_EQ(a[0].variant, EsVariant::OnePlusOneDG);
    EXPECT_EQ(a[1].seed, 2u);
    EXPECT_EQ(a[2].instance->seed, 11u);
    EXPECT_EQ(a[4].variant, EsVariant::UncorrelatedTN);
}

TEST(Determinism, ScansRepeat)
{
    const auto thetas = theta_grid(4);
    const auto a = rotation_scan(RotationKind::DG, 1.0, 2.0, thetas, 2000, RandomSource(10));
    const auto b = rotation_scan(RotationKind::DG, 1.0, 2.0, thetas, 2000, RandomSource(10));
    ASSERT_EQ(a.stats.size(), b.stats.size());
    for (std::size_t i = 0; i < a.stats.size(); ++i) EXPECT_EQ(a.stats[i].value, b.stats[i].value);
}
