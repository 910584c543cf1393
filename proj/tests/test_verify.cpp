#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "robustpg/verify.hpp"

using namespace robustpg;

namespace {

constexpr double kE = std::numbers::e;

SolvedParams solve_mode(MeanVector m, Mode mode) {
    SolveOptions o;
    o.mode = mode;
    return solve(m, o);
}

}  // namespace

TEST(Certificate, SymHighExample) {
    const auto c = dual_certificate(solve_sym_high(0.84));
    EXPECT_NEAR(c.lambdas[0], 1.5, 1e-14);
    EXPECT_NEAR(c.lambdas[1], 1.5, 1e-14);
    EXPECT_NEAR(c.mu, -1.8, 1e-14);
    EXPECT_NEAR(c.value, 0.72, 1e-14);
}

TEST(Certificate, AreaIVExample) {
    const auto c = dual_certificate(solve(MeanVector{2 / kE, std::log(2.0) / kE}));
    EXPECT_NEAR(c.lambdas[0], 1.0, 1e-12);
    EXPECT_EQ(c.lambdas[1], 0.0);
    EXPECT_NEAR(c.mu, -1 / kE, 1e-12);
    EXPECT_NEAR(c.value, 1 / kE, 1e-12);
}

TEST(Certificate, AreaIRatio) {
    const auto p = solve(MeanVector{0.6, 0.55});
    const auto& k = p.get<AreaIConstants>();
    const auto c = dual_certificate(p);
    EXPECT_NEAR(c.lambdas[1] / c.lambdas[0], k.s1 / k.s2, 1e-12);
}

TEST(Certificate, ValueEqualsGuaranteeEverywhere) {
    std::vector<SolvedParams> ps{solve(MeanVector{0.3, 0.3}),   solve(MeanVector{0.9, 0.9}),
                                 solve(MeanVector{0.6, 0.55}),  solve(MeanVector{0.9, 0.8}),
                                 solve(MeanVector{0.8, 0.55}),  solve(MeanVector{0.6, 0.2}),
                                 solve(MeanVector{0.45, 0.6}),  solve_nagent(3, 0.9),
                                 solve_nagent(4, 0.95),         solve_mode(MeanVector{0.5, 0.9}, Mode::Excludable),
                                 solve_mode(MeanVector{0.9, 0.9}, Mode::Deterministic),
                                 solve_mode(MeanVector{0.75, 0.5}, Mode::Deterministic)};
    for (const auto& p : ps) {
        const auto c = dual_certificate(p);
        EXPECT_NEAR(c.value, revenue_guarantee(p), 1e-8) << case_name(p);
        EXPECT_TRUE(c.anchors_agree) << case_name(p);
    }
}

TEST(Certificate, DegenerateEndpoints) {
    EXPECT_THROW(dual_certificate(solve_sym_high(1.0)), DegenerateError);
    EXPECT_THROW(dual_certificate(solve_mode(MeanVector{1.0, 2 / kE}, Mode::Excludable)), DegenerateError);
    EXPECT_THROW(dual_certificate(solve_nagent(3, 1.0)), DegenerateError);
}

TEST(Feasibility, CertifiedPairAndShift) {
    const auto p = solve(MeanVector{0.5, 0.5});
    const Mechanism m(p);
    auto c = dual_certificate(p);
    EXPECT_GE(check_feasibility(c, m, GridSpec{101}), -1e-7);
    c.mu += 0.01;
    EXPECT_NEAR(check_feasibility(c, m, GridSpec{101}), -0.01, 1e-9);
}

TEST(Feasibility, StrictSlackOutsideSymLowSupport) {
    const auto p = solve_sym_low(0.5);
    const double r1 = p.get<SymLowConstants>().r1;
    const auto c = dual_certificate(p);
    const Mechanism m(p);
    const std::vector<double> v{0.1, 0.1};
    EXPECT_LT(c.at(v), m.total_payment(v));
    EXPECT_NEAR(c.at(v), c.lambdas[0] * (0.2 - r1), 1e-14);
}

TEST(Slackness, SupportOnlyFilter) {
    for (const auto& m : {MeanVector{0.84, 0.84}, MeanVector{0.5, 0.5}, MeanVector{0.8, 0.55}}) {
        const auto p = solve(m);
        const Mechanism mech(p);
        const WorstCaseDistribution d(p);
        const auto c = dual_certificate(p);
        EXPECT_LE(check_slackness(c, mech, d, GridSpec{101}), 1e-6);
        // a shifted plane is still tight off the support
        auto shifted = c;
        shifted.mu -= 0.5;
        EXPECT_GE(check_slackness(shifted, mech, d, GridSpec{101}), 0.5 - 1e-9);
    }
}

TEST(Grid, AxisContainsBreakpoints) {
    const auto p = solve(MeanVector{0.6, 0.2});
    const Mechanism m(p);
    const auto axis = grid_axis(GridSpec{11}, &m, 0);
    EXPECT_NE(std::find(axis.begin(), axis.end(), p.get<AreaIVConstants>().w1), axis.end());
    EXPECT_EQ(axis.front(), 0.0);
    EXPECT_EQ(axis.back(), 1.0);
    EXPECT_THROW(grid_axis(GridSpec{1}), DomainError);
}

TEST(Grid, MultisetCount) {
    std::size_t count = 0;
    for_each_multiset(std::vector<double>{0, 0.5, 1}, 3, [&](std::span<const double>) { ++count; });
    EXPECT_EQ(count, 10u);
}

TEST(NatureLp, SymHighWithinGridTolerance) {
    const auto p = solve_sym_high(0.84);
    const Mechanism m(p);
    const auto lp = nature_lp(m, std::vector<double>{0.84, 0.84}, GridSpec{201});
    EXPECT_NEAR(lp.value, 0.72, 5e-3);
    EXPECT_LE(lp.support.size(), 3u);
}

TEST(NatureLp, DeterministicExactOnAtoms) {
    const auto p = solve_mode(MeanVector{0.9, 0.9}, Mode::Deterministic);
    const Mechanism m(p);
    const auto lp = nature_lp(m, std::vector<double>{0.9, 0.9}, GridSpec{201});
    EXPECT_NEAR(lp.value, 2 * std::pow(1 - 2 * std::sqrt(0.05), 2), 1e-9);
    ASSERT_EQ(lp.support.size(), 3u);
    const double t = 1 - std::sqrt(0.2);
    for (const auto& s : lp.support) {
        const bool atom = (s.profile[0] == t && s.profile[1] == 1.0) || (s.profile[0] == 1.0 && s.profile[1] == t) ||
                          (s.profile[0] == 1.0 && s.profile[1] == 1.0);
        EXPECT_TRUE(atom);
    }
}

TEST(NatureLp, ThresholdIndicator) {
    // cheapest way to reach mean m with mass above 1/2: atoms at 0.45 and 1
    const PaymentFunction total = [](std::span<const double> v) { return v[0] >= 0.5 ? 1.0 : 0.0; };
    const std::vector<std::vector<double>> axes{grid_axis(GridSpec{21}), grid_axis(GridSpec{21})};
    for (const auto& m : std::vector<std::vector<double>>{{0.7, 0.6}, {0.3, 0.4}, {0.9, 0.95}}) {
        const auto lp = nature_lp(total, m, axes);
        EXPECT_NEAR(lp.value, std::max(0.0, (m[0] - 0.45) / 0.55), 1e-10);
        EXPECT_LE(lp.support.size(), 3u);
    }
}

TEST(NatureLp, LinearPaymentIsExact) {
    const PaymentFunction total = [](std::span<const double> v) { return v[0] + 2 * v[1]; };
    const std::vector<std::vector<double>> axes{grid_axis(GridSpec{11}), grid_axis(GridSpec{11})};
    const auto lp = nature_lp(total, std::vector<double>{0.33, 0.71}, axes);
    EXPECT_NEAR(lp.value, 0.33 + 2 * 0.71, 1e-12);
}

TEST(NatureLp, Infeasible) {
    const PaymentFunction zero = [](std::span<const double>) { return 0.0; };
    const std::vector<std::vector<double>> axes{{0.2, 0.5}, {0.2, 0.5}};
    EXPECT_THROW(nature_lp(zero, std::vector<double>{0.9, 0.3}, axes), NoSolutionError);
}

TEST(Simplex, SmallProblem) {
    // min x1 + 2 x2 + 3 x3, x1 + x2 + x3 = 1, x2 + 2 x3 = 1
    StandardLp lp;
    lp.rows = 2;
    lp.columns = {1, 0, 1, 1, 1, 2};
    lp.cost = {1, 2, 3};
    lp.rhs = {1, 1};
    const auto s = solve_lp(lp);
    EXPECT_NEAR(s.value, 2.0, 1e-12);
}

TEST(MonteCarlo, SymHighAndExcludable) {
    {
        const auto p = solve_sym_high(0.84);
        const auto [mean, se] = mc_revenue(Mechanism(p), WorstCaseDistribution(p), 200000, SamplerState{});
        EXPECT_NEAR(mean, 0.72, 3 * se);
    }
    {
        const auto p = solve_mode(MeanVector{2 / kE, 2 / kE}, Mode::Excludable);
        const auto [mean, se] = mc_revenue(Mechanism(p), WorstCaseDistribution(p), 200000, SamplerState{});
        EXPECT_NEAR(mean, 2 / kE, 3 * se);
    }
}

TEST(MonteCarlo, WorkerCountDoesNotChangeResult) {
    const auto p = solve(MeanVector{0.6, 0.45});
    const Mechanism m(p);
    const WorstCaseDistribution d(p);
    const auto a = monte_carlo(m, d, 100000, SamplerState{4, 0}, 1);
    const auto b = monte_carlo(m, d, 100000, SamplerState{4, 0}, 3);
    EXPECT_EQ(a.revenue, b.revenue);
    EXPECT_EQ(a.means, b.means);
}

TEST(MonteCarlo, ZeroMechanismRevenue) {
    // deterministic mechanism with unit thresholds never provides below the top
    const auto p = solve_mode(MeanVector{0.9, 0.9}, Mode::Deterministic);
    const PaymentFunction zero = [](std::span<const double>) { return 0.0; };
    const WorstCaseDistribution d(p);
    Rng rng(SamplerState{});
    std::vector<double> v(2);
    double total = 0;
    for (int k = 0; k < 1000; ++k) {
        d.sample(rng, v);
        total += zero(v);
    }
    EXPECT_EQ(total, 0.0);
}

TEST(Audit, ConstructedMechanisms) {
    for (const auto& m : {MeanVector{0.5, 0.5}, MeanVector{0.6, 0.55}, MeanVector{0.9, 0.8}, MeanVector{0.8, 0.55}}) {
        const auto a = audit_incentives(Mechanism(solve(m)), GridSpec{51});
        EXPECT_LE(a.dsic, 1e-8);
        EXPECT_LE(a.epir, 1e-10);
    }
    const auto ex = audit_incentives(Mechanism(solve_mode(MeanVector{0.5, 0.9}, Mode::Excludable)), GridSpec{51});
    EXPECT_LE(ex.dsic, 1e-8);
    EXPECT_LE(ex.epir, 1e-10);
}

TEST(Saddle, AllPassExamples) {
    VerifyOptions o;
    o.lp_grid.points = 101;
    o.mc_draws = 100000;
    EXPECT_TRUE(verify_saddle(MeanVector{0.84, 0.84}, {}, o).all_pass());
    const auto a4 = verify_saddle(MeanVector{2 / kE, std::log(2.0) / kE}, {}, o);
    EXPECT_TRUE(a4.all_pass());
    EXPECT_NEAR(a4.guarantee, 1 / kE, 1e-12);
    SolveOptions det;
    det.mode = Mode::Deterministic;
    const auto d = verify_saddle(MeanVector{0.9, 0.9}, det, o);
    EXPECT_TRUE(d.all_pass());
    EXPECT_EQ(d.lp->support.size(), 3u);
}

TEST(Saddle, TamperedConstantFails) {
    VerifyOptions o;
    o.lp_grid.points = 51;
    o.mc_draws = 20000;
    const auto p = with_constant(solve_sym_high(0.84), "r2", 0.2 + 1e-3);
    EXPECT_FALSE(verify_params(p, o).all_pass());
}
