#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "biruin/mc_engine.hpp"

using namespace biruin;

namespace {

ModelConfig busy_model() {
    ModelConfig m;
    m.u1 = 3.0;
    m.u2 = 2.0;
    m.r = 0.05;
    m.rho = -0.5;
    m.sigma1 = 0.8;
    m.sigma2 = 0.6;
    m.lambda1 = 1.0;
    m.lambda2 = 0.8;
    m.c1 = 1.0;
    m.c2 = 1.0;
    m.dist1 = ClaimDistribution::pareto(1.5, 1);
    m.dist2 = ClaimDistribution::pareto(1.5, 1);
    m.T = 1.0;
    m.h = 0.01;
    return m;
}

}  // namespace

TEST(Wilson, BoundsAndEdges) {
    const Estimate zero = wilson_estimate(0, 50);
    EXPECT_EQ(zero.p_hat, 0.0);
    EXPECT_EQ(zero.ci_lo, 0.0);
    EXPECT_GT(zero.ci_hi, 0.0);
    const Estimate all = wilson_estimate(50, 50);
    EXPECT_EQ(all.p_hat, 1.0);
    EXPECT_EQ(all.ci_hi, 1.0);
    EXPECT_LT(all.ci_lo, 1.0);
    for (std::uint64_t k = 0; k <= 37; ++k) {
        const Estimate e = wilson_estimate(k, 37);
        EXPECT_LE(0.0, e.ci_lo);
        EXPECT_LE(e.ci_lo, e.p_hat);
        EXPECT_LE(e.p_hat, e.ci_hi);
        EXPECT_LE(e.ci_hi, 1.0);
        EXPECT_EQ(e.n, 37u);
        EXPECT_EQ(e.count, k);
    }
    EXPECT_THROW(wilson_estimate(0, 0), std::invalid_argument);
    EXPECT_THROW(wilson_estimate(5, 4), std::invalid_argument);
}

TEST(Wilson, KnownInterval) {
    // 10 of 100 at z = 1.96: centre (0.1 + z^2/200) / (1 + z^2/100).
    const Estimate e = wilson_estimate(10, 100);
    const double z = 1.959963984540054, n = 100, p = 0.1;
    const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    EXPECT_NEAR(e.ci_lo, centre - half, 1e-15);
    EXPECT_NEAR(e.ci_hi, centre + half, 1e-15);
}

TEST(Wilson, CoverageOfKnownBernoulli) {
    RandomStream rng(2718);
    int covered = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::uint64_t k = 0;
        for (int i = 0; i < 1000; ++i) k += rng.uniform() < 0.1;
        const Estimate e = wilson_estimate(k, 1000);
        covered += e.ci_lo <= 0.1 && 0.1 <= e.ci_hi;
    }
    EXPECT_GE(covered, 930);
    EXPECT_LE(covered, 970);
}

TEST(EstimateRuin, ZeroCapitalIsCertainLineRuin) {
    ModelConfig m = busy_model();
    m.u1 = m.u2 = 0.0;
    m.c1 = m.c2 = 0.0;
    const EstimateSet s = estimate_ruin(m, 2000, 1, 1);
    EXPECT_EQ(s[RuinType::comp1].p_hat, 1.0);
    EXPECT_EQ(s[RuinType::comp2].p_hat, 1.0);
    EXPECT_EQ(s[RuinType::min].p_hat, 1.0);
}

TEST(EstimateRuin, HugeCapitalIsNeverRuined) {
    ModelConfig m = busy_model();
    m.u1 = m.u2 = 1e12;
    const EstimateSet s = estimate_ruin(m, 500, 1, 1);
    for (RuinType t : kRuinTypes) {
        EXPECT_EQ(s[t].p_hat, 0.0);
        EXPECT_EQ(s[t].ci_lo, 0.0);
        EXPECT_EQ(s[t].n, 500u);
    }
}

TEST(EstimateRuin, CountIdentitiesAndOrdering) {
    for (bool cs : {false, true}) {
        for (double rho : {-0.9, 0.0, 0.9}) {
            ModelConfig m = busy_model();
            m.common_shock = cs;
            m.rho = rho;
            const RuinCounts c = estimate_ruin(m, 20000, 3, 1, 4096).counts;
            EXPECT_EQ(c[RuinType::min] + c[RuinType::and_], c[RuinType::comp1] + c[RuinType::comp2]);
            EXPECT_LE(c[RuinType::max], c[RuinType::and_]);
            EXPECT_LE(c[RuinType::and_], c[RuinType::min]);
            EXPECT_LE(c[RuinType::sum], c[RuinType::min]);
            EXPECT_GT(c[RuinType::max], 0u);
        }
    }
}

TEST(EstimateRuin, IdenticalForAnyWorkerCount) {
    const ModelConfig m = busy_model();
    const EstimateSet one = estimate_ruin(m, 10000, 42, 1, 1000);
    for (unsigned w : {2u, 3u, 8u}) {
        const EstimateSet other = estimate_ruin(m, 10000, 42, w, 1000);
        EXPECT_EQ(one.counts, other.counts);
        for (RuinType t : kRuinTypes) {
            EXPECT_EQ(one[t].p_hat, other[t].p_hat);
            EXPECT_EQ(one[t].ci_lo, other[t].ci_lo);
            EXPECT_EQ(one[t].ci_hi, other[t].ci_hi);
        }
    }
}

TEST(EstimateRuin, EqualsBatchesMergedInAnyOrder) {
    const ModelConfig m = busy_model();
    const std::uint64_t n = 5500, batch = 1000;
    std::vector<RuinCounts> parts;
    for (std::uint64_t b = 0; b * batch < n; ++b)
        parts.push_back(simulate_batch(m, 9, b, std::min(batch, n - b * batch)));
    const RuinCounts engine = estimate_ruin(m, n, 9, 2, batch).counts;
    std::vector<std::size_t> order(parts.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937 shuffle(1);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(order.begin(), order.end(), shuffle);
        RuinCounts merged;
        for (std::size_t i : order) merged += parts[i];
        EXPECT_EQ(merged, engine);
    }
}

TEST(EstimateRuin, DifferentSeedsGiveDifferentStreams) {
    const ModelConfig m = busy_model();
    EXPECT_NE(estimate_ruin(m, 5000, 1, 1).counts, estimate_ruin(m, 5000, 2, 1).counts);
}

TEST(EstimateRuin, RejectsInvalidInput) {
    ModelConfig m = busy_model();
    EXPECT_THROW(estimate_ruin(m, 0, 1, 1), std::invalid_argument);
    m.rho = 2.0;
    EXPECT_THROW(estimate_ruin(m, 10, 1, 1), std::invalid_argument);
}

TEST(ConvergenceStudy, RowsRatiosAndMonotoneAsymptotics) {
    ModelConfig m = busy_model();
    m.common_shock = true;
    m.r = 0.0;
    const std::vector<std::pair<double, double>> grid = {{2, 2}, {4, 4}, {8, 8}};
    const auto rows = convergence_study(m, grid, 4000, 5, 1);
    ASSERT_EQ(rows.size(), grid.size() * kRuinTypes.size());
    for (const StudyRow& r : rows) {
        if (r.asym > 0.0) {
            ASSERT_TRUE(r.ratio.has_value());
            EXPECT_DOUBLE_EQ(*r.ratio, r.estimate.p_hat / r.asym);
            if (r.estimate.p_hat > 0.0) {
                EXPECT_TRUE(std::isfinite(*r.ratio));
                EXPECT_GT(*r.ratio, 0.0);
            }
        } else {
            EXPECT_FALSE(r.ratio.has_value());
        }
    }
    for (std::size_t t = 0; t < kRuinTypes.size(); ++t) {
        for (std::size_t g = 1; g < grid.size(); ++g) {
            const auto& lo = rows[(g - 1) * kRuinTypes.size() + t];
            const auto& hi = rows[g * kRuinTypes.size() + t];
            EXPECT_EQ(lo.ruin_type, hi.ruin_type);
            EXPECT_LT(hi.asym, lo.asym);
        }
    }
}

TEST(ConvergenceStudy, RejectsBadGrids) {
    const ModelConfig m = busy_model();
    EXPECT_THROW(convergence_study(m, {}, 10, 1, 1), std::invalid_argument);
    EXPECT_THROW(convergence_study(m, {{4, 4}, {2, 2}}, 10, 1, 1), std::invalid_argument);
}

TEST(AsymptoticFor, LineTwoUsesCommonRateUnderCommonShock) {
    ModelConfig m = busy_model();
    m.common_shock = true;
    m.r = 0.0;
    m.lambda2 = 7.0;
    EXPECT_DOUBLE_EQ(asymptotic_for(RuinType::comp2, m, 10, 10).value, m.lambda1 * m.T * m.dist2.tail(10));
    m.common_shock = false;
    EXPECT_DOUBLE_EQ(asymptotic_for(RuinType::comp2, m, 10, 10).value, 7.0 * m.T * m.dist2.tail(10));
}

TEST(DependenceProbe, SignOfDependence) {
    const std::uint64_t n = 40000, steps = 500;
    for (ProbeMode mode : {ProbeMode::sup, ProbeMode::inf, ProbeMode::discounted_sup, ProbeMode::discounted_inf}) {
        const double r = 0.5;
        for (double rho : {-0.5, 0.0, 0.5}) {
            const ProbeResult p = dependence_probe(rho, 1.0, 1.0, 1.0, n, 77, mode, r, steps, 1);
            const double prod = p.marg1.p_hat * p.marg2.p_hat;
            const double band = 3.0 * p.joint.standard_error();
            if (rho < 0) EXPECT_LE(p.joint.p_hat, prod + band);
            if (rho > 0) EXPECT_GE(p.joint.p_hat, prod - band);
            if (rho == 0) EXPECT_NEAR(p.joint.p_hat, prod, band);
        }
    }
}

TEST(DependenceProbe, MarginalMatchesReflectionPrinciple) {
    // P(sup B > 1 on [0,1]) = 2 P(B(1) > 1), up to the small grid bias.
    const ProbeResult p = dependence_probe(0.0, 1.0, 1.0, 1.0, 40000, 3, ProbeMode::sup, 0.0, 2000, 1);
    const double exact = std::erfc(1.0 / std::sqrt(2.0));
    EXPECT_NEAR(p.marg1.p_hat, exact, 4.0 * p.marg1.standard_error() + 0.02);
    EXPECT_LT(p.marg1.p_hat, exact + 3.0 * p.marg1.standard_error());
}

TEST(DependenceProbe, SweepEqualsSingleProbes) {
    const std::vector<ProbeQuery> qs = {{-0.9, ProbeMode::sup}, {0.5, ProbeMode::discounted_inf}, {0.0, ProbeMode::inf}};
    const auto sweep = dependence_sweep(qs, 1.0, 0.8, 1.2, 3000, 11, 0.5, 200, 2);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const ProbeResult one = dependence_probe(qs[i].rho, 1.0, 0.8, 1.2, 3000, 11, qs[i].mode, 0.5, 200, 1);
        EXPECT_EQ(sweep[i].joint.count, one.joint.count);
        EXPECT_EQ(sweep[i].marg1.count, one.marg1.count);
        EXPECT_EQ(sweep[i].marg2.count, one.marg2.count);
    }
}

TEST(DependenceProbe, RejectsBadInput) {
    EXPECT_THROW(dependence_probe(0.0, 1.0, 0.0, 1.0, 10, 1, ProbeMode::sup, 0.0, 10, 1), std::invalid_argument);
    EXPECT_THROW(dependence_probe(0.0, 1.0, 1.0, 1.0, 0, 1, ProbeMode::sup, 0.0, 10, 1), std::invalid_argument);
    EXPECT_THROW(dependence_probe(0.0, 1.0, 1.0, 1.0, 10, 1, ProbeMode::discounted_sup, 0.0, 10, 1),
                 std::invalid_argument);
    EXPECT_THROW(dependence_probe(1.5, 1.0, 1.0, 1.0, 10, 1, ProbeMode::sup, 0.0, 10, 1), std::invalid_argument);
}

TEST(SumReduction, Examples) {
    SumReduction s = sum_reduction_probe(1.3, 0.0, 0.4, 0.2, 2.0, 1000, 1);
    EXPECT_NEAR(s.theory_var, 1.69 * -std::expm1(-0.8) / 0.4, 1e-14);

    s = sum_reduction_probe(0.9, 0.9, -1.0, 0.1, 1.0, 1000, 2);
    EXPECT_EQ(s.theory_var, 0.0);
    EXPECT_EQ(s.sample_var, 0.0);
    EXPECT_EQ(s.z_score, 0.0);

    s = sum_reduction_probe(1.0, 1.0, -0.3, 0.0, 1.0, 100000, 3);
    EXPECT_NEAR(s.theory_var, 1.4, 1e-15);
    EXPECT_LT(std::abs(s.z_score), 3.0);
}

TEST(SumReduction, RejectsTooFewSamples) {
    EXPECT_THROW(sum_reduction_probe(1, 1, 0, 0, 1, 1, 1), std::invalid_argument);
}
