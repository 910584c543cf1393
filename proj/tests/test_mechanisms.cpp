#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "robustpg/mechanisms.hpp"
#include "robustpg/params.hpp"

using namespace robustpg;

namespace {

constexpr double kE = std::numbers::e;

std::vector<SolvedParams> randomized_cases() {
    return {solve(MeanVector{0.5, 0.5}), solve(MeanVector{0.84, 0.84}), solve(MeanVector{0.6, 0.55}),
            solve(MeanVector{0.9, 0.8}),  solve(MeanVector{0.8, 0.55}),  solve(MeanVector{0.6, 0.2}),
            solve(MeanVector{0.45, 0.6}), solve(MeanVector{1.0, 0.8})};
}

}  // namespace

TEST(Provision, SymHighExamples) {
    const Mechanism m(solve_sym_high(0.84));
    EXPECT_NEAR(m.provision(std::vector<double>{1, 1}), 1.0, 1e-15);
    EXPECT_NEAR(m.provision(std::vector<double>{0.6, 0.6}), 0.0, 1e-15);
}

TEST(Provision, SymLowAtThreshold) {
    const auto p = solve_sym_low(0.5);
    const auto& c = p.get<SymLowConstants>();
    EXPECT_NEAR(Mechanism(p).provision(std::vector<double>{c.r1, c.r1}), c.a, 1e-12);
}

TEST(Provision, AreaIVDictatorship) {
    const auto p = solve(MeanVector{0.6, 0.2});
    const Mechanism m(p);
    const double w1 = p.get<AreaIVConstants>().w1;
    EXPECT_NEAR(m.provision(std::vector<double>{w1, 0.7}), 0.0, 1e-14);
    EXPECT_NEAR(m.provision(std::vector<double>{1.0, 0.1}), 1.0, 1e-14);
    for (double x : {0.3, 0.5, 0.9}) {
        const std::vector<double> a{x, 0.05}, b{x, 0.95};
        EXPECT_EQ(m.provision(a), m.provision(b));
        EXPECT_EQ(m.payment(a, 0), m.payment(b, 0));
        EXPECT_EQ(m.payment(a, 1), 0.0);
    }
}

TEST(Provision, RangeMonotoneAndTop) {
    for (const auto& p : randomized_cases()) {
        const Mechanism m(p);
        EXPECT_NEAR(m.provision(std::vector<double>{1, 1}), 1.0, 1e-12) << case_name(p);
        for (int i = 0; i <= 40; ++i) {
            double prev = -1;
            for (int k = 0; k <= 40; ++k) {
                const double q = m.provision(std::vector<double>{k / 40.0, i / 40.0});
                EXPECT_GE(q, 0.0);
                EXPECT_LE(q, 1.0);
                EXPECT_GE(q, prev - 1e-12) << case_name(p);
                prev = q;
            }
        }
    }
}

TEST(Payment, SymHighTop) {
    const Mechanism m(solve_sym_high(0.84));
    const std::vector<double> v{1, 1};
    EXPECT_NEAR(m.payment(v, 0), 0.6, 1e-14);
    EXPECT_NEAR(m.payment(v, 1), 0.6, 1e-14);
}

TEST(Payment, AreaIVClosedForm) {
    const auto p = solve(MeanVector{0.6, 0.2});
    const double w = p.get<AreaIVConstants>().w1;
    const double integral = (1 - w) - (-1 - w * std::log(w) + w) / std::log(w);
    for (double v2 : {0.0, 0.3, 1.0}) {
        EXPECT_NEAR(Mechanism(p).payment(std::vector<double>{1.0, v2}, 0), 1 - integral, 1e-12);
    }
}

TEST(Payment, ZeroWhereNotProvided) {
    for (const auto& p : randomized_cases()) {
        const Mechanism m(p);
        for (int i = 0; i <= 20; ++i) {
            for (int k = 0; k <= 20; ++k) {
                const std::vector<double> v{i / 20.0, k / 20.0};
                if (m.provision(v) == 0.0) {
                    EXPECT_NEAR(m.total_payment(v), 0.0, 1e-14);
                }
            }
        }
    }
}

TEST(Payment, MatchesEnvelopeByDirectQuadrature) {
    for (const auto& p : randomized_cases()) {
        const Mechanism m(p);
        for (const auto& v : std::vector<std::vector<double>>{{0.9, 0.7}, {0.55, 0.95}, {1, 1}, {1, 0.4}}) {
            for (std::size_t i = 0; i < 2; ++i) {
                std::vector<double> w = v;
                const double own = v[i];
                auto q = [&](double s) {
                    w[i] = s;
                    return m.provision(w);
                };
                std::vector<double> cuts = m.breakpoints(i);
                for (int k = 1; k < 2000; ++k) cuts.push_back(own * k / 2000.0);
                const double expected = own * m.provision(v) - integrate_1d(q, 0.0, own, 1e-9, cuts);
                EXPECT_NEAR(m.payment(v, i), expected, 1e-7) << case_name(p) << " agent " << i;
            }
        }
    }
}

TEST(Guarantee, Values) {
    EXPECT_NEAR(revenue_guarantee(solve_sym_high(0.84)), 0.72, 1e-14);
    EXPECT_NEAR(revenue_guarantee(solve_sym_low(0.75 - 1e-12)), 0.5, 1e-5);
    EXPECT_NEAR(revenue_guarantee(solve_deterministic(MeanVector{0.9, 0.9})), 0.61114561800016824, 1e-14);
    for (const auto& p : randomized_cases()) {
        const double g = revenue_guarantee(p);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, p.means[0] + p.means[1]);
    }
}

TEST(Excludable, PerAgentProvision) {
    const auto p = solve_excludable(MeanVector{2 / kE, 2 / kE});
    const Mechanism m(p);
    EXPECT_NEAR(m.provision(std::vector<double>{1 / std::sqrt(kE), 0.2}, 0), 0.5, 1e-14);
    EXPECT_NEAR(m.provision(std::vector<double>{1 / kE, 0.2}, 0), 0.0, 1e-14);
    EXPECT_NEAR(m.provision(std::vector<double>{1.0, 0.2}, 0), 1.0, 1e-14);
    EXPECT_THROW((void)m.provision(std::vector<double>{1, 1}), UnsupportedError);
}

TEST(Deterministic, PostedAndLinear) {
    const auto p = solve_deterministic(MeanVector{0.9, 0.9});
    const Mechanism posted(p, DeterministicVariant::Posted);
    EXPECT_EQ(posted.provision(std::vector<double>{0.6, 0.6}), 1.0);
    EXPECT_EQ(posted.provision(std::vector<double>{0.5, 0.9}), 0.0);
    const Mechanism linear(solve_deterministic(MeanVector{1, 1}));
    EXPECT_EQ(linear.provision(std::vector<double>{1, 1}), 1.0);
    // on the boundary line the good is not provided
    const double d1 = p.get<DeterministicConstants>().d1;
    EXPECT_EQ(Mechanism(p).provision(std::vector<double>{d1, 1.0}), 0.0);
}

TEST(Deterministic, Dictator) {
    const Mechanism m(solve_deterministic(MeanVector{0.75, 0.5}));
    EXPECT_EQ(m.kind(), MechanismKind::DeterministicDictator);
    EXPECT_EQ(m.provision(std::vector<double>{0.5, 0.99}), 0.0);
    EXPECT_EQ(m.provision(std::vector<double>{0.51, 0.0}), 1.0);
    EXPECT_NEAR(m.payment(std::vector<double>{0.9, 0.1}, 0), 0.5, 1e-15);
    EXPECT_EQ(m.payment(std::vector<double>{0.9, 0.1}, 1), 0.0);
}

TEST(NAgent, TwoAgentsMatchSymHigh) {
    const Mechanism n2(solve_nagent(2, 0.84));
    const Mechanism sym(solve_sym_high(0.84));
    EXPECT_NEAR(n2.guarantee(), sym.guarantee(), 1e-10);
    for (int i = 0; i <= 20; ++i) {
        for (int k = 0; k <= 20; ++k) {
            const std::vector<double> v{i / 20.0, k / 20.0};
            EXPECT_NEAR(n2.provision(v), sym.provision(v), 1e-10);
            EXPECT_NEAR(n2.total_payment(v), sym.total_payment(v), 1e-10);
        }
    }
}

TEST(Mechanism, RejectsBadProfiles) {
    const Mechanism m(solve_sym_high(0.84));
    EXPECT_THROW((void)m.provision(std::vector<double>{0.5}), DomainError);
    EXPECT_THROW((void)m.provision(std::vector<double>{1.5, 0.5}), DomainError);
}
