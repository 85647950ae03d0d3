#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "ies/distributions.hpp"

using namespace ies;

namespace {

// High-precision reference values (mpmath, 30 digits).
constexpr double tn1_k0 = 0.382924922548026207275409221217;
constexpr double tn1_k1 = 0.241730337457128830357801348412;
constexpr double tn1_k3 = 0.00597703624674061013062817868749;
constexpr double h_tn_sigma1 = 2.1048326541776686589729606481;
constexpr double h_tn_sigma3 = 3.6387064969018557161789186806;
constexpr double h_dg_half = 2.91829583405448951478707227728;
constexpr double h_dg_step1 = 2.5431066063272239452872247397;
constexpr double sb26_k0 = 0.15498101711273193359375;
constexpr double h_sb26 = 3.3971218785277598866341149219;
constexpr double h_tn_approx_sigma1 = 2.18792335507027968525556291688;

double tv_against_exact(const DistParam& p, std::size_t draws, std::uint64_t seed)
{
    RandomSource rng(seed);
    std::map<std::int64_t, double> freq;
    for (std::size_t i = 0; i < draws; ++i) freq[sample(p, rng)] += 1.0 / static_cast<double>(draws);
    const std::int64_t w = support_window(p);
    double tv = 0.0;
    for (std::int64_t k = -w; k <= w; ++k) tv += std::abs(freq[k] - pmf_exact(p, k));
    for (const auto& [k, f] : freq) {
        if (k < -w || k > w) tv += f;
    }
    return 0.5 * tv;
}

} // namespace

TEST(Pmf, DiscreteUniform) { EXPECT_DOUBLE_EQ(pmf_exact(DistParam::du(2), 0), 0.2); }

TEST(Pmf, DiscreteUniformOutsideSupportIsZero)
{
    EXPECT_EQ(pmf_exact(DistParam::du(2), 3), 0.0);
    EXPECT_EQ(pmf_exact(DistParam::du(0), 0), 1.0);
}

TEST(Pmf, DoubleGeometric)
{
    EXPECT_DOUBLE_EQ(pmf_exact(DistParam::dg(0.5), 0), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(pmf_exact(DistParam::dg(0.5), 1), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(pmf_exact(DistParam::dg(0.5), -1), 1.0 / 6.0);
}

TEST(Pmf, TruncatedNormalCells)
{
    EXPECT_NEAR(pmf_exact(DistParam::tn(1.0), 0), tn1_k0, 1e-15);
    EXPECT_NEAR(pmf_exact(DistParam::tn(1.0), 1), tn1_k1, 1e-15);
    EXPECT_NEAR(pmf_exact(DistParam::tn(1.0), -3), tn1_k3, 1e-16);
}

TEST(Pmf, TruncatedNormalFarTailStaysPositiveAndAccurate)
{
    // erfc on |k| keeps relative accuracy where 1 - erf would cancel.
    const double p = pmf_exact(DistParam::tn(1.0), 9);
    EXPECT_NEAR(p, 9.478485370695782093e-18, 1e-12 * 9.478485370695782093e-18);
}

TEST(Pmf, SymmetricBinomial)
{
    EXPECT_DOUBLE_EQ(pmf_exact(DistParam::sb(2), 0), 0.5);
    EXPECT_DOUBLE_EQ(pmf_exact(DistParam::sb(2), 1), 0.25);
    EXPECT_DOUBLE_EQ(pmf_exact(DistParam::sb(2), -1), 0.25);
    EXPECT_NEAR(pmf_exact(DistParam::sb(26), 0), sb26_k0, 1e-14);
    EXPECT_EQ(pmf_exact(DistParam::sb(2), 2), 0.0);
}

TEST(Pmf, ApproximateTn) { EXPECT_DOUBLE_EQ(tn_pmf_approx(1.0, 0), 1.0 / std::sqrt(std::numbers::pi)); }

TEST(Pmf, InvalidParametersRejected)
{
    EXPECT_THROW(DistParam::tn(0.0), DomainError);
    EXPECT_THROW(DistParam::tn(-1.0), DomainError);
    EXPECT_THROW(DistParam::dg(0.0), DomainError);
    EXPECT_THROW(DistParam::dg(1.0), DomainError);
    EXPECT_THROW(DistParam::sb(3), DomainError);
    EXPECT_THROW(DistParam::du(-1), DomainError);
    EXPECT_THROW(DistParam::make(DistributionKind::DU, 1.5), DomainError);
    EXPECT_THROW(tn_pmf_approx(0.0, 0), DomainError);
}

class PmfProperties : public ::testing::TestWithParam<std::pair<DistributionKind, double>> {};

TEST_P(PmfProperties, SymmetricNonNegativeAndNormalized)
{
    const auto [kind, s] = GetParam();
    const DistParam p = param_from_step(kind, s);
    const std::int64_t w = support_window(p);
    double total = 0.0;
    double mean_abs = 0.0;
    for (std::int64_t k = -w; k <= w; ++k) {
        const double q = pmf_exact(p, k);
        ASSERT_GE(q, 0.0);
        ASSERT_DOUBLE_EQ(q, pmf_exact(p, -k));
        total += q;
        mean_abs += std::abs(static_cast<double>(k)) * q;
    }
    EXPECT_NEAR(total, 1.0, 1e-11);
    EXPECT_GE(window_mass(p), 1.0 - 1e-11);
    // DU and DG are calibrated exactly by step_from_param.
    if (kind == DistributionKind::DG || kind == DistributionKind::DU) {
        EXPECT_NEAR(mean_abs, step_from_param(p), 1e-9 * (1.0 + mean_abs));
    }
}

TEST_P(PmfProperties, SamplerMatchesPmf)
{
    const auto [kind, s] = GetParam();
    EXPECT_LT(tv_against_exact(param_from_step(kind, s), 100000, 11), 0.01);
}

INSTANTIATE_TEST_SUITE_P(Grid, PmfProperties,
                         ::testing::Values(std::pair{DistributionKind::DU, 1.0}, std::pair{DistributionKind::DU, 3.0},
                                           std::pair{DistributionKind::SB, 0.7}, std::pair{DistributionKind::SB, 2.0},
                                           std::pair{DistributionKind::TN, 0.5}, std::pair{DistributionKind::TN, 2.5},
                                           std::pair{DistributionKind::DG, 0.3}, std::pair{DistributionKind::DG, 1.0},
                                           std::pair{DistributionKind::DG, 4.0}));

TEST(Calibration, ParamFromStepExamples)
{
    EXPECT_NEAR(param_from_step(DistributionKind::TN, 1.0).value, 1.25331413731550025120788264241, 1e-15);
    EXPECT_NEAR(param_from_step(DistributionKind::DG, 1.0).value, 2.0 - std::sqrt(2.0), 1e-15);
    EXPECT_EQ(param_from_step(DistributionKind::DU, 1.0).n(), 1);
    EXPECT_EQ(param_from_step(DistributionKind::SB, 2.0).n(), 26);
    EXPECT_EQ(param_from_step(DistributionKind::DU, 0.5).n(), 0);
}

TEST(Calibration, StepFromParamExamples)
{
    EXPECT_DOUBLE_EQ(step_from_param(DistParam::du(1)), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(step_from_param(DistParam::dg(0.5)), 4.0 / 3.0);
    EXPECT_NEAR(step_from_param(DistParam::sb(26)), 2.03421447256410962985046499394, 1e-14);
    EXPECT_NEAR(step_from_param(DistParam::tn(std::sqrt(std::numbers::pi / 2.0))), 1.0, 1e-15);
}

TEST(Calibration, DoubleGeometricRoundTrip)
{
    for (double s = 0.01; s < 100.0; s *= 1.37) {
        const DistParam p = param_from_step(DistributionKind::DG, s);
        EXPECT_NEAR(step_from_param(p), s, 1e-12 * s);
    }
}

TEST(Calibration, NonPositiveStepRejected)
{
    EXPECT_THROW(param_from_step(DistributionKind::TN, 0.0), DomainError);
    EXPECT_THROW(param_from_step(DistributionKind::DG, -1.0), DomainError);
    EXPECT_THROW(param_from_step(DistributionKind::DG, std::nan("")), DomainError);
}

TEST(Calibration, DgEmpiricalMeanAbsMatchesStep)
{
    RandomSource rng(5);
    const DistParam p = param_from_step(DistributionKind::DG, 2.0);
    double sum = 0.0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) sum += std::abs(static_cast<double>(sample(p, rng)));
    EXPECT_NEAR(sum / draws, 2.0, 0.03);
}

TEST(Geometric, InverseTransformExamples)
{
    EXPECT_EQ(geometric_from_uniform(0.0, 0.5), 0);
    EXPECT_EQ(geometric_from_uniform(0.75, 0.5), 2);
    EXPECT_EQ(geometric_from_uniform(0.4999, 0.5), 0);
    EXPECT_EQ(geometric_from_uniform(0.5, 0.5), 1);
    EXPECT_THROW(geometric_from_uniform(1.0, 0.5), DomainError);
    EXPECT_THROW(geometric_from_uniform(0.5, 1.0), DomainError);
}

TEST(Geometric, SamplerMean)
{
    RandomSource rng(8);
    double sum = 0.0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_geometric(0.25, rng));
    EXPECT_NEAR(sum / draws, 3.0, 0.05); // (1-p)/p
}

TEST(Window, CoversRequestedMass)
{
    for (double eps : {1e-6, 1e-9, 1e-12}) {
        for (auto p : {DistParam::tn(0.3), DistParam::tn(7.0), DistParam::dg(0.9), DistParam::dg(0.05)}) {
            EXPECT_GE(window_mass(p, eps), 1.0 - eps) << to_string(p.kind) << " " << p.value;
        }
    }
    EXPECT_EQ(support_window(DistParam::du(4)), 4);
    EXPECT_EQ(support_window(DistParam::sb(10)), 5);
}

TEST(Entropy, ClosedFormsAndReferences)
{
    EXPECT_DOUBLE_EQ(entropy_exact(DistParam::du(3)), std::log2(7.0));
    EXPECT_EQ(entropy_exact(DistParam::du(0)), 0.0);
    EXPECT_DOUBLE_EQ(entropy_exact(DistParam::sb(2)), 1.5);
    EXPECT_NEAR(entropy_exact(DistParam::sb(26)), h_sb26, 1e-12);
    EXPECT_NEAR(entropy_exact(DistParam::tn(1.0)), h_tn_sigma1, 1e-10);
    EXPECT_NEAR(entropy_exact(DistParam::tn(3.0)), h_tn_sigma3, 1e-10);
    EXPECT_NEAR(entropy_exact(DistParam::dg(0.5)), h_dg_half, 1e-10);
    EXPECT_NEAR(entropy_exact(param_from_step(DistributionKind::DG, 1.0)), h_dg_step1, 1e-10);
    EXPECT_NEAR(entropy_tn_approx(1.0), h_tn_approx_sigma1, 1e-9);
}

TEST(Entropy, TailEpsilonRange)
{
    EXPECT_THROW(entropy_exact(DistParam::tn(1.0), 1e-3), DomainError);
    EXPECT_THROW(entropy_exact(DistParam::tn(1.0), 0.0), DomainError);
    EXPECT_NO_THROW(entropy_exact(DistParam::tn(1.0), 1e-9));
}

TEST(Entropy, IncreasesWithStep)
{
    for (auto kind : {DistributionKind::SB, DistributionKind::TN, DistributionKind::DG}) {
        double prev = -1.0;
        for (double s = 0.5; s <= 10.0; s += 0.5) {
            const double h = entropy_exact(param_from_step(kind, s));
            EXPECT_GT(h, prev) << to_string(kind) << " s=" << s;
            prev = h;
        }
    }
}

TEST(Sampling, DeterministicPerSeed)
{
    for (auto kind : {DistributionKind::DU, DistributionKind::SB, DistributionKind::TN, DistributionKind::DG}) {
        const DistParam p = param_from_step(kind, 2.0);
        RandomSource a(77), b(77);
        for (int i = 0; i < 100; ++i) ASSERT_EQ(sample(p, a), sample(p, b));
    }
}

TEST(Sampling, LargeSbUsesWholeWords)
{
    RandomSource rng(4);
    const DistParam p = DistParam::sb(200);
    double sum = 0.0, sq = 0.0;
    const int draws = 50000;
    for (int i = 0; i < draws; ++i) {
        const double v = static_cast<double>(sample(p, rng));
        ASSERT_LE(std::abs(v), 100.0);
        sum += v;
        sq += v * v;
    }
    EXPECT_NEAR(sum / draws, 0.0, 0.05);
    EXPECT_NEAR(sq / draws, 50.0, 1.0); // N/4
}

TEST(Names, RoundTrip)
{
    for (auto kind : {DistributionKind::DU, DistributionKind::SB, DistributionKind::TN, DistributionKind::DG}) {
        EXPECT_EQ(parse_distribution_kind(to_string(kind)), kind);
    }
    EXPECT_FALSE(parse_distribution_kind("xx").has_value());
}
