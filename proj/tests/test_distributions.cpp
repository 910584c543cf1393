#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "robustpg/distributions.hpp"
#include "robustpg/params.hpp"

using namespace robustpg;

namespace {

constexpr double kE = std::numbers::e;

std::vector<MeanVector> two_agent_points() {
    return {MeanVector{0.5, 0.5},  MeanVector{0.2, 0.2},  MeanVector{0.84, 0.84}, MeanVector{0.6, 0.55},
            MeanVector{0.5, 0.45}, MeanVector{0.9, 0.8},  MeanVector{0.8, 0.55},  MeanVector{0.6, 0.45},
            MeanVector{0.6, 0.2},  MeanVector{0.2, 0.6},  MeanVector{1.0, 0.8},   MeanVector{0.95, 0.3}};
}

}  // namespace

TEST(Distribution, MassAndMomentsMatchMeans) {
    for (const auto& m : two_agent_points()) {
        const WorstCaseDistribution d(solve(m));
        const auto [mass, moments] = d.mass_and_moments();
        EXPECT_NEAR(mass, 1.0, 1e-8) << case_name(d.params());
        EXPECT_NEAR(moments[0], m[0], 1e-8) << case_name(d.params());
        EXPECT_NEAR(moments[1], m[1], 1e-8) << case_name(d.params());
    }
}

TEST(Distribution, MomentExamples) {
    const auto sym = WorstCaseDistribution(solve(MeanVector{0.84, 0.84})).moments();
    EXPECT_NEAR(sym[0], 0.84, 1e-8);
    const auto a4 = WorstCaseDistribution(solve(MeanVector{2 / kE, std::log(2.0) / kE})).moments();
    EXPECT_NEAR(a4[0], 2 / kE, 1e-8);
    EXPECT_NEAR(a4[1], std::log(2.0) / kE, 1e-8);
    SolveOptions o;
    o.mode = Mode::Excludable;
    const auto ex = WorstCaseDistribution(solve(MeanVector{1.0, 1.0}, o)).moments();
    EXPECT_EQ(ex[0], 1.0);
}

TEST(Density, SymLowComponents) {
    const auto p = solve_sym_low(0.5);
    const double r1 = p.get<SymLowConstants>().r1;
    const WorstCaseDistribution d(p);
    const Tagged top = d.density(std::vector<double>{1, 1});
    EXPECT_EQ(top.kind, MassKind::Atom);
    EXPECT_NEAR(top.value, r1 / 4, 1e-15);
    EXPECT_EQ(d.density(std::vector<double>{0.1, 0.1}).kind, MassKind::Zero);
    const Tagged edge = d.density(std::vector<double>{0.3, 1.0});
    EXPECT_EQ(edge.kind, MassKind::Edge);
    EXPECT_NEAR(edge.value, r1 / (2 * 1.3 * 1.3), 1e-15);
    const Tagged in = d.density(std::vector<double>{0.4, 0.5});
    EXPECT_EQ(in.kind, MassKind::Interior);
    EXPECT_NEAR(in.value, r1 / (0.9 * 0.9 * 0.9), 1e-14);
}

TEST(Density, AreaIVAtom) {
    const WorstCaseDistribution d(solve(MeanVector{2 / kE, std::log(2.0) / kE}));
    const Tagged a = d.density(std::vector<double>{1.0, 1 / kE});
    EXPECT_EQ(a.kind, MassKind::Atom);
    EXPECT_NEAR(a.value, (1 / kE) / (1 / kE + 1), 1e-12);
    EXPECT_EQ(d.density(std::vector<double>{0.2, 0.1}).kind, MassKind::Zero);
}

TEST(Marginal, SymLow) {
    const auto p = solve_sym_low(0.5);
    const double r1 = p.get<SymLowConstants>().r1;
    const WorstCaseDistribution d(p);
    EXPECT_NEAR(d.marginal(0, 1.0).value, r1 / 2, 1e-14);
    EXPECT_NEAR(d.marginal(1, 0.5 * r1).value, 1 / (2 * r1), 1e-12);
    EXPECT_NEAR(d.marginal(1, 0.8).value, r1 / (2 * 0.64), 1e-12);
}

TEST(Marginal, SymHigh) {
    const WorstCaseDistribution d(solve_sym_high(0.84));
    EXPECT_NEAR(d.marginal(0, 0.5).value, 0.5, 1e-14);
    EXPECT_NEAR(d.marginal(0, 1.0).value, 0.6, 1e-14);
    EXPECT_EQ(d.marginal(0, 0.1).kind, MassKind::Zero);
}

TEST(Marginal, Excludable) {
    SolveOptions o;
    o.mode = Mode::Excludable;
    const WorstCaseDistribution d(solve(MeanVector{2 / kE, 2 / kE}, o));
    EXPECT_NEAR(d.marginal(0, 1.0).value, 1 / kE, 1e-12);
    EXPECT_NEAR(d.marginal(0, 0.5).value, (1 / kE) / 0.25, 1e-12);
    const double body = integrate_1d([&](double x) { return d.marginal(0, x).value; }, 1 / kE + 1e-15, 1 - 1e-15);
    EXPECT_NEAR(body + 1 / kE, 1.0, 1e-9);
}

TEST(Conditional, SymLowExamples) {
    const auto p = solve_sym_low(0.5);
    const double r1 = p.get<SymLowConstants>().r1;
    const WorstCaseDistribution d(p);
    EXPECT_NEAR(d.conditional(0, 1.0, 1.0).value, 0.5, 1e-14);
    EXPECT_NEAR(d.conditional(0, 0.3, 1.0).value, 1 / (1.3 * 1.3), 1e-14);
    const double y = 0.2;
    EXPECT_NEAR(d.conditional(0, 0.5, y).value, 2 * r1 * r1 / std::pow(0.5 + y, 3), 1e-14);
    EXPECT_NEAR(d.conditional(0, 1.0, y).value, r1 * r1 / ((1 + y) * (1 + y)), 1e-14);
}

TEST(Conditional, SymHighAtFloor) {
    const WorstCaseDistribution d(solve_sym_high(0.84));
    EXPECT_NEAR(d.conditional(0, 1.0, 0.2).value, 1.0, 1e-14);
    EXPECT_THROW((void)d.conditional(0, 0.5, 0.1), DomainError);
}

TEST(Conditional, ProductRecoversJointDensity) {
    for (const auto& m : two_agent_points()) {
        const WorstCaseDistribution d(solve(m));
        const auto* fam = d.family();
        ASSERT_NE(fam, nullptr);
        for (double y : {0.3, 0.6, 0.9}) {
            for (double x : {0.35, 0.7, 0.95}) {
                std::vector<double> v(2);
                v[d.params().order[0]] = x;
                v[d.params().order[1]] = y;
                const Tagged joint = d.density(v);
                if (joint.kind != MassKind::Interior) continue;
                const std::size_t second = d.params().order[1], first = d.params().order[0];
                const double product = d.marginal(second, y).value * d.conditional(first, x, y).value;
                EXPECT_NEAR(product, joint.value, 1e-10 * std::max(1.0, joint.value)) << case_name(d.params());
            }
        }
    }
}

TEST(VirtualValue, ZeroInsideNonPositiveOutside) {
    for (const auto& m : two_agent_points()) {
        const WorstCaseDistribution d(solve(m));
        const auto* fam = d.family();
        for (int i = 1; i < 20; ++i) {
            for (int k = 1; k < 20; ++k) {
                std::vector<double> v{i / 20.0 * fam->top[0], k / 20.0 * fam->top[1]};
                std::vector<double> caller(2);
                caller[d.params().order[0]] = v[0];
                caller[d.params().order[1]] = v[1];
                const double phi = d.weighted_virtual_value(caller);
                if (fam->in_support(v[0], v[1]) && fam->in_halfplane(v[0] - 1e-9, v[1] - 1e-9)) {
                    EXPECT_NEAR(phi, 0.0, 1e-7) << case_name(d.params());
                } else if (!fam->in_support(v[0], v[1])) {
                    EXPECT_LE(phi, 1e-9);
                }
            }
        }
    }
}

TEST(Sampling, DeterministicReplay) {
    const WorstCaseDistribution d(solve(MeanVector{0.6, 0.45}));
    EXPECT_EQ(d.sample(SamplerState{5, 1}, 1000), d.sample(SamplerState{5, 1}, 1000));
    EXPECT_NE(d.sample(SamplerState{5, 1}, 1000), d.sample(SamplerState{5, 2}, 1000));
    EXPECT_THROW((void)d.sample(SamplerState{}, 0), DomainError);
}

TEST(Sampling, SymLowSupportAndAtom) {
    const auto p = solve_sym_low(0.5);
    const double r1 = p.get<SymLowConstants>().r1;
    const WorstCaseDistribution d(p);
    const std::size_t n = 200000;
    const auto s = d.sample(SamplerState{11, 0}, n);
    std::size_t top = 0;
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_GE(s[2 * k] + s[2 * k + 1], r1 - 1e-12);
        top += s[2 * k] == 1.0 && s[2 * k + 1] == 1.0;
    }
    const double p_top = r1 / 4, se = std::sqrt(p_top * (1 - p_top) / n);
    EXPECT_NEAR(double(top) / n, p_top, 3 * se);
}

TEST(Sampling, MarginalKolmogorovSmirnov) {
    const std::size_t n = 100000;
    for (const auto& m : two_agent_points()) {
        const WorstCaseDistribution d(solve(m));
        const auto s = d.sample(SamplerState{3, 0}, n);
        for (std::size_t i = 0; i < 2; ++i) {
            std::vector<double> xs(n);
            for (std::size_t k = 0; k < n; ++k) xs[k] = s[2 * k + i];
            std::sort(xs.begin(), xs.end());
            double ks = 0;
            for (double q : {0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.95}) {
                std::vector<double> cuts;
                for (int k = 1; k < 100; ++k) cuts.push_back(k / 100.0);
                double cdf = integrate_1d([&](double x) { return d.marginal(i, x).value; }, 0.0, q, 1e-9, cuts);
                const double top = d.top_profile()[i];
                if (top <= q && d.marginal(i, top).kind == MassKind::Atom) cdf += d.marginal(i, top).value;
                const double emp = double(std::upper_bound(xs.begin(), xs.end(), q) - xs.begin()) / n;
                ks = std::max(ks, std::abs(cdf - emp));
            }
            EXPECT_LE(ks, 4 / std::sqrt(double(n))) << case_name(d.params()) << " agent " << i;
        }
    }
}

TEST(Sampling, ExcludableMeansAndIndependence) {
    SolveOptions o;
    o.mode = Mode::Excludable;
    const WorstCaseDistribution d(solve(MeanVector{0.5, 0.9}, o));
    const std::size_t n = 200000;
    const auto s = d.sample(SamplerState{9, 0}, n);
    double a = 0, b = 0, aa = 0, bb = 0, ab = 0;
    for (std::size_t k = 0; k < n; ++k) {
        a += s[2 * k];
        b += s[2 * k + 1];
        aa += s[2 * k] * s[2 * k];
        bb += s[2 * k + 1] * s[2 * k + 1];
        ab += s[2 * k] * s[2 * k + 1];
    }
    a /= n, b /= n, aa /= n, bb /= n, ab /= n;
    EXPECT_NEAR(a, 0.5, 3 * std::sqrt((aa - a * a) / n));
    EXPECT_NEAR(b, 0.9, 3 * std::sqrt((bb - b * b) / n));
    const double corr = (ab - a * b) / std::sqrt((aa - a * a) * (bb - b * b));
    EXPECT_NEAR(corr, 0.0, 3 / std::sqrt(double(n)));
}

TEST(DeterministicWorstCase, Atoms) {
    const auto p = solve_deterministic(MeanVector{0.9, 0.9});
    const auto d = deterministic_worst_case(p);
    const double w = std::sqrt(0.05), t = 1 - std::sqrt(0.2);
    EXPECT_NEAR(d.density(std::vector<double>{t, 1.0}).value, w, 1e-15);
    EXPECT_NEAR(d.density(std::vector<double>{1.0, t}).value, w, 1e-15);
    EXPECT_NEAR(d.density(std::vector<double>{1.0, 1.0}).value, 1 - 2 * w, 1e-15);
    const auto [mass, mom] = d.mass_and_moments();
    EXPECT_NEAR(mass, 1.0, 1e-15);
    EXPECT_NEAR(mom[0], 0.9, 1e-15);
    const auto full = deterministic_worst_case(solve_deterministic(MeanVector{1, 1}));
    EXPECT_NEAR(full.density(std::vector<double>{1.0, 1.0}).value, 1.0, 1e-15);
    EXPECT_THROW(deterministic_worst_case(solve_sym_high(0.84)), DomainError);
}

TEST(DeterministicWorstCase, DictatorMeans) {
    const auto d = deterministic_worst_case(solve_deterministic(MeanVector{0.75, 0.5}));
    const auto [mass, mom] = d.mass_and_moments();
    EXPECT_NEAR(mass, 1.0, 1e-15);
    EXPECT_NEAR(mom[0], 0.75, 1e-15);
    EXPECT_NEAR(mom[1], 0.5, 1e-15);
}
