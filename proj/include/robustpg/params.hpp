#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "robustpg/detail/moment_maps.hpp"
#include "robustpg/errors.hpp"
#include "robustpg/numerics.hpp"
#include "robustpg/regions.hpp"

namespace robustpg {

/// Which family of problems the constants belong to.
enum class Mode { Randomized, Deterministic, Excludable, NAgent };

inline std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Randomized: return "randomized";
        case Mode::Deterministic: return "deterministic";
        case Mode::Excludable: return "excludable";
        case Mode::NAgent: return "nagent";
    }
    return "?";
}

inline Mode parse_mode(std::string_view s) {
    for (Mode m : {Mode::Randomized, Mode::Deterministic, Mode::Excludable, Mode::NAgent}) {
        if (to_string(m) == s) return m;
    }
    throw DomainError("unknown mode: " + std::string(s));
}

struct SymLowConstants {
    double r1;  ///< lower end of the provision region v1 + v2 >= r1
    double a;   ///< provision probability at (r1, r1)
};
struct SymHighConstants {
    double r2;  ///< provision region v1 + v2 >= 1 + r2
};
struct AreaIConstants {
    double s1, s2;  ///< intercepts of the provision line s2 v1 + s1 v2 = s1 s2
    double c;       ///< provision scale
};
struct AreaIIConstants {
    double t1, t2;  ///< lowest values in the support
};
struct AreaIIIConstants {
    double u1, u2;  ///< provision line v1 + (u1 - u2) v2 = u1
    double d;       ///< provision probability at (u1, 1)
};
struct AreaIVConstants {
    double w1;  ///< agent 1 posted threshold and revenue guarantee
    double w2;  ///< upper end of agent 2's support
};
struct NAgentConstants {
    int n;
    double r;  ///< provision region sum(v) >= n - 1 + r
};
struct ExcludableConstants {
    std::vector<double> gamma;  ///< per-agent equal-revenue floor
};
struct DeterministicConstants {
    double d1;      ///< agent 1 threshold
    double d2;      ///< agent 2 threshold (unused under dictatorship)
    bool dictator;  ///< provision decided by agent 1 alone
};

using Constants = std::variant<SymLowConstants, SymHighConstants, AreaIConstants, AreaIIConstants,
                               AreaIIIConstants, AreaIVConstants, NAgentConstants, ExcludableConstants,
                               DeterministicConstants>;

struct Residual {
    std::string name;
    double value;
};

/// Solved constants for one mean vector together with their provenance.
struct SolvedParams {
    Mode mode = Mode::Randomized;
    CaseLabel label{};            ///< meaningful for randomized two-agent problems
    std::vector<double> means;    ///< in internal agent order
    std::vector<std::size_t> order;  ///< order[k] is the caller's index of internal agent k
    Constants constants;
    std::vector<Residual> residuals;
    std::vector<std::string> notes;

    [[nodiscard]] std::size_t agents() const { return means.size(); }

    [[nodiscard]] double max_residual() const {
        double r = 0.0;
        for (const auto& x : residuals) r = std::max(r, std::abs(x.value));
        return r;
    }

    [[nodiscard]] bool has_note(std::string_view n) const {
        return std::find(notes.begin(), notes.end(), n) != notes.end();
    }

    template <typename T>
    [[nodiscard]] const T& get() const {
        if (const T* p = std::get_if<T>(&constants)) return *p;
        throw UnsupportedError("SolvedParams: constants of another case");
    }
};

/// Case name used in documents: a two-agent area tag or the mode name.
inline std::string case_name(const SolvedParams& p) {
    switch (p.mode) {
        case Mode::Randomized: return std::string(to_string(p.label.tag));
        case Mode::Deterministic: return "DETERMINISTIC";
        case Mode::Excludable: return "EXCLUDABLE";
        case Mode::NAgent: return "N_AGENT";
    }
    return "?";
}

/// Constants as (name, value) pairs in a fixed order.
inline std::vector<std::pair<std::string, double>> named_constants(const SolvedParams& p) {
    using V = std::vector<std::pair<std::string, double>>;
    return std::visit(
        [](const auto& c) -> V {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SymLowConstants>) return {{"r1", c.r1}, {"a", c.a}};
            else if constexpr (std::is_same_v<T, SymHighConstants>) return {{"r2", c.r2}};
            else if constexpr (std::is_same_v<T, AreaIConstants>) return {{"s1", c.s1}, {"s2", c.s2}, {"c", c.c}};
            else if constexpr (std::is_same_v<T, AreaIIConstants>) return {{"t1", c.t1}, {"t2", c.t2}};
            else if constexpr (std::is_same_v<T, AreaIIIConstants>) return {{"u1", c.u1}, {"u2", c.u2}, {"d", c.d}};
            else if constexpr (std::is_same_v<T, AreaIVConstants>) return {{"w1", c.w1}, {"w2", c.w2}};
            else if constexpr (std::is_same_v<T, NAgentConstants>) return {{"N", double(c.n)}, {"r", c.r}};
            else if constexpr (std::is_same_v<T, ExcludableConstants>) {
                V v;
                for (std::size_t i = 0; i < c.gamma.size(); ++i) v.emplace_back("gamma_" + std::to_string(i + 1), c.gamma[i]);
                return v;
            } else {
                return {{"d1", c.d1}, {"d2", c.d2}, {"dictator", c.dictator ? 1.0 : 0.0}};
            }
        },
        p.constants);
}

/// Rebuild constants of the kind implied by (mode, label) from named values.
inline Constants constants_from_named(Mode mode, CaseTag tag,
                                      const std::function<double(const std::string&)>& value,
                                      std::size_t agents) {
    switch (mode) {
        case Mode::Randomized:
            switch (tag) {
                case CaseTag::SymLow: return SymLowConstants{value("r1"), value("a")};
                case CaseTag::SymHigh: return SymHighConstants{value("r2")};
                case CaseTag::AreaI: return AreaIConstants{value("s1"), value("s2"), value("c")};
                case CaseTag::AreaII: return AreaIIConstants{value("t1"), value("t2")};
                case CaseTag::AreaIII: return AreaIIIConstants{value("u1"), value("u2"), value("d")};
                case CaseTag::AreaIV: return AreaIVConstants{value("w1"), value("w2")};
            }
            break;
        case Mode::NAgent: return NAgentConstants{static_cast<int>(std::lround(value("N"))), value("r")};
        case Mode::Excludable: {
            ExcludableConstants c;
            for (std::size_t i = 0; i < agents; ++i) c.gamma.push_back(value("gamma_" + std::to_string(i + 1)));
            return c;
        }
        case Mode::Deterministic: return DeterministicConstants{value("d1"), value("d2"), value("dictator") != 0.0};
    }
    throw DomainError("constants_from_named: unknown case");
}

/// Copy of p with one named constant replaced.
inline SolvedParams with_constant(SolvedParams p, const std::string& name, double v) {
    auto named = named_constants(p);
    bool found = false;
    for (auto& [k, x] : named) {
        if (k == name) {
            x = v;
            found = true;
        }
    }
    if (!found) throw DomainError("with_constant: no constant named " + name);
    p.constants = constants_from_named(
        p.mode, p.label.tag,
        [&](const std::string& k) {
            for (const auto& [kk, x] : named) if (kk == k) return x;
            throw DomainError("missing constant " + k);
        },
        p.agents());
    return p;
}

namespace detail {

inline std::vector<std::size_t> identity_order(std::size_t n) {
    std::vector<std::size_t> o(n);
    for (std::size_t i = 0; i < n; ++i) o[i] = i;
    return o;
}

inline SolvedParams two_agent_shell(Mode mode, CaseLabel label, double m1, double m2) {
    SolvedParams p;
    p.mode = mode;
    p.label = label;
    p.means = {m1, m2};
    p.order = {0, 1};
    return p;
}

/// r in (0,1] with r(3 - 2 ln r)/4 = m.
inline double low_diagonal_root(double m) {
    if (m >= kSymmetricSplit) return 1.0;
    return std::exp(lambert_w_minus1(-2.0 * m * std::exp(-1.5)) + 1.5);
}

/// gamma in (0,1] with gamma(1 - ln gamma) = m.
inline double equal_revenue_floor(double m) {
    if (m >= 1.0) return 1.0;
    return std::exp(lambert_w_minus1(-m / std::numbers::e) + 1.0);
}

/// Solve g(x) = target on [from, to] (either orientation) at the first crossing seen from `from`.
/// Returns the root and the number of sign changes seen on the scan.
template <ScalarFunction G>
std::pair<double, int> first_crossing(G&& g, double from, double to, double target, int scan, double tol_x) {
    std::vector<double> xs(scan + 1), gs(scan + 1);
    for (int k = 0; k <= scan; ++k) {
        xs[k] = k == scan ? to : from + (to - from) * k / scan;
        gs[k] = g(xs[k]) - target;
    }
    int crossings = 0;
    int first = -1;
    for (int k = 0; k < scan; ++k) {
        const bool change = gs[k] == 0.0 || (gs[k] > 0) != (gs[k + 1] > 0);
        if (change) {
            ++crossings;
            if (first < 0) first = k;
        }
    }
    if (first < 0) {
        if (std::abs(gs[scan]) <= 1e-12) return {to, 0};
        throw NoSolutionError("outer bracket has no sign change");
    }
    if (gs[first] == 0.0) return {xs[first], crossings};
    const double lo = std::min(xs[first], xs[first + 1]);
    const double hi = std::max(xs[first], xs[first + 1]);
    Bracket b{lo, hi, tol_x, 1e-15, 300};
    return {solve_monotone(g, b, target), crossings};
}

}  // namespace detail

/// Symmetric means below 3/4.
inline SolvedParams solve_sym_low(double m) {
    if (!(m > 0.0 && m < kSymmetricSplit)) throw DomainError("solve_sym_low: m outside (0, 3/4)");
    const double r1 = detail::low_diagonal_root(m);
    auto p = detail::two_agent_shell(Mode::Randomized, {CaseTag::SymLow, BoundaryTag::None}, m, m);
    p.constants = SymLowConstants{r1, 1.0 / (1.0 - 2.0 * std::log(r1))};
    p.residuals = {{"mean", detail::low_diagonal_mean(r1) - m}};
    return p;
}

/// Symmetric means in [3/4, 1].
inline SolvedParams solve_sym_high(double m) {
    if (!(m >= kSymmetricSplit && m <= 1.0)) throw DomainError("solve_sym_high: m outside [3/4, 1]");
    const double r2 = 1.0 - 2.0 * std::sqrt(1.0 - m);
    auto p = detail::two_agent_shell(Mode::Randomized,
                                     {CaseTag::SymHigh, m == kSymmetricSplit ? BoundaryTag::SymmetricSplit
                                                                             : BoundaryTag::None},
                                     m, m);
    p.constants = SymHighConstants{r2};
    p.residuals = {{"mean", (1 - r2 * r2) / 4 + (1 + r2) / 2 - m}};
    if (r2 >= 1.0) p.notes.emplace_back("degenerate");
    return p;
}

/// Ordered means m1 > m2 above the low boundary curve, m1 < 3/4.
inline SolvedParams solve_area1(double m1, double m2, CaseLabel label = {CaseTag::AreaI, BoundaryTag::None}) {
    if (!(m1 > 0 && m1 < kSymmetricSplit && m2 > 0 && m2 < m1)) throw NoSolutionError("solve_area1: means outside the area");
    using detail::low_family_mean;
    const double s2_diag = detail::low_diagonal_root(m1);
    auto partner = [m1](double s2) {
        if (detail::low_diagonal_mean(s2) <= m1) return s2;
        Bracket b{1e-300, s2, 1e-16, 1e-16, 400};
        return solve_monotone([s2](double s1) { return low_family_mean(s1, s2); }, b, m1);
    };
    auto second_mean = [&](double s2) { return low_family_mean(s2, partner(s2)); };
    const auto [s2, crossings] = detail::first_crossing(second_mean, s2_diag, 1.0, m2, 32, 1e-15);
    const double s1 = partner(s2);
    auto p = detail::two_agent_shell(Mode::Randomized, label, m1, m2);
    const double lr = std::log(s1 / s2);
    const double c = 1.0 / (1.0 - ((1 - s2 / s1) * std::log(s1) - (1 - s1 / s2) * std::log(s2)) / lr);
    p.constants = AreaIConstants{s1, s2, c};
    p.residuals = {{"mean_1", low_family_mean(s1, s2) - m1}, {"mean_2", low_family_mean(s2, s1) - m2}};
    if (crossings > 1) p.notes.emplace_back("multiple_crossings");
    return p;
}

/// Ordered means m1 > m2 on or above the high boundary curve, m1 > 3/4.
inline SolvedParams solve_area2(double m1, double m2, CaseLabel label = {CaseTag::AreaII, BoundaryTag::None}) {
    if (!(m1 > kSymmetricSplit && m1 <= 1 && m2 >= 0 && m2 < m1)) throw NoSolutionError("solve_area2: means outside the area");
    using detail::high_family_mean;
    auto p = detail::two_agent_shell(Mode::Randomized, label, m1, m2);
    if (m1 == 1.0) {
        const auto f = [](double t2) { return high_family_mean(t2, 1.0); };
        if (m2 < f(0.0) - 1e-12) throw NoSolutionError("solve_area2: m2 below the boundary");
        const double t2 = solve_monotone(f, Bracket{0.0, 1.0, 1e-16, 1e-16, 400}, m2);
        p.constants = AreaIIConstants{1.0, t2};
        p.residuals = {{"mean_1", 0.0}, {"mean_2", f(t2) - m2}};
        p.notes.emplace_back("degenerate");
        return p;
    }
    const double t2_diag = 1.0 - 2.0 * std::sqrt(1.0 - m1);
    auto partner = [m1](double t2) {
        if (detail::high_diagonal_mean(t2) >= m1) return t2;
        Bracket b{t2, 1.0, 1e-16, 1e-16, 400};
        return solve_monotone([t2](double t1) { return high_family_mean(t1, t2); }, b, m1);
    };
    auto second_mean = [&](double t2) { return high_family_mean(t2, partner(t2)); };
    const auto [t2, crossings] = detail::first_crossing(second_mean, t2_diag, 0.0, m2, 32, 1e-15);
    const double t1 = partner(t2);
    p.constants = AreaIIConstants{t1, t2};
    p.residuals = {{"mean_1", high_family_mean(t1, t2) - m1}, {"mean_2", high_family_mean(t2, t1) - m2}};
    if (crossings > 1) p.notes.emplace_back("multiple_crossings");
    return p;
}

/// Ordered means between the dictatorship curve and the two interior areas.
inline SolvedParams solve_area3(double m1, double m2, CaseLabel label = {CaseTag::AreaIII, BoundaryTag::None}) {
    if (!(m1 > 0 && m1 <= 1 && m2 > 0 && m2 < m1 && m2 < kSymmetricSplit)) throw NoSolutionError("solve_area3: means outside the area");
    using detail::mixed_family_mean_first;
    using detail::mixed_family_mean_second;
    const double u1_lo =
        solve_monotone([](double r) { return detail::low_family_mean(1.0, r); }, Bracket{1e-300, 1.0, 1e-16, 1e-16, 400}, m2);
    const double u1_hi =
        m2 <= std::numbers::ln2
            ? solve_monotone([](double r) { return r * std::log1p(1 / r); }, Bracket{1e-300, 1.0, 1e-16, 1e-16, 400}, m2)
            : 1.0;
    auto partner = [m2](double u1) {
        if (mixed_family_mean_second(u1, 0.0) <= m2) return 0.0;
        if (mixed_family_mean_second(u1, u1) >= m2) return u1;
        Bracket b{0.0, u1, 1e-16, 1e-16, 400};
        return solve_monotone([u1](double u2) { return mixed_family_mean_second(u1, u2); }, b, m2);
    };
    auto first_mean = [&](double u1) { return mixed_family_mean_first(u1, partner(u1)); };
    const auto [u1, crossings] = detail::first_crossing(first_mean, u1_lo, u1_hi, m1, 32, 1e-15);
    const double u2 = partner(u1);
    auto p = detail::two_agent_shell(Mode::Randomized, label, m1, m2);
    const double d = std::log(u1 / (1 + u2)) / (std::log(u1) / (u1 - u2) - std::log1p(u2));
    p.constants = AreaIIIConstants{u1, u2, d};
    p.residuals = {{"mean_1", mixed_family_mean_first(u1, u2) - m1},
                   {"mean_2", mixed_family_mean_second(u1, u2) - m2}};
    if (!(u1 > u2)) p.notes.emplace_back("order_violated");
    if (crossings > 1) p.notes.emplace_back("multiple_crossings");
    return p;
}

/// Ordered means on or below the dictatorship curve.
inline SolvedParams solve_area4(double m1, double m2, CaseLabel label = {CaseTag::AreaIV, BoundaryTag::None}) {
    if (!(m1 > 0 && m1 <= 1 && m2 >= 0 && m2 <= m1)) throw DomainError("solve_area4: means outside the area");
    const double w1 = detail::equal_revenue_floor(m1);
    double w2 = w1 * std::expm1(m2 / w1);
    if (w2 > 1.0 + 1e-12) throw NoSolutionError("solve_area4: m2 above the dictatorship curve");
    w2 = std::min(w2, 1.0);
    auto p = detail::two_agent_shell(Mode::Randomized, label, m1, m2);
    p.constants = AreaIVConstants{w1, w2};
    p.residuals = {{"mean_1", w1 * (1 - std::log(w1)) - m1}, {"mean_2", w1 * std::log1p(w2 / w1) - m2}};
    if (w1 >= 1.0) p.notes.emplace_back("degenerate");
    return p;
}

/// Mean of each agent in the symmetric N-agent family at parameter r.
inline double nagent_mean_map(int n, double r) {
    const double c = r + n - 1;
    const double nn = std::pow(double(n), n);
    return c * (nn - std::pow(c, n - 1)) / ((n - 1) * nn);
}

/// Smallest symmetric mean covered by the N-agent solution.
inline double nagent_mean_threshold(int n) {
    return 1.0 - std::pow(double(n - 1), n - 1) / std::pow(double(n), n);
}

inline SolvedParams solve_nagent(int n, double m) {
    if (n < 2) throw DomainError("solve_nagent: N must be at least 2");
    if (!(m <= 1.0) || m < nagent_mean_threshold(n) - 1e-15) throw DomainError("solve_nagent: mean below the N-agent threshold");
    const auto f = [n](double r) { return nagent_mean_map(n, r); };
    const double r = solve_monotone(f, Bracket{0.0, 1.0, 1e-16, 1e-15, 400}, m);
    SolvedParams p;
    p.mode = Mode::NAgent;
    p.means.assign(std::size_t(n), m);
    p.order = detail::identity_order(std::size_t(n));
    p.constants = NAgentConstants{n, r};
    p.residuals = {{"mean", f(r) - m}};
    if (r >= 1.0) p.notes.emplace_back("degenerate");
    return p;
}

inline SolvedParams solve_excludable(const MeanVector& m) {
    ExcludableConstants c;
    SolvedParams p;
    p.mode = Mode::Excludable;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!(m[i] > 0.0)) throw DomainError("solve_excludable: every mean must be positive");
        const double g = detail::equal_revenue_floor(m[i]);
        c.gamma.push_back(g);
        p.residuals.push_back({"mean_" + std::to_string(i + 1), g * (1 - std::log(g)) - m[i]});
        if (g >= 1.0) p.notes.emplace_back("degenerate");
    }
    p.means.assign(m.values().begin(), m.values().end());
    p.order = detail::identity_order(m.size());
    p.constants = std::move(c);
    return p;
}

/// Mean m2 at which the two-threshold deterministic mechanisms stop being optimal.
inline const double kDeterministicSplit = 2.0 * (std::numbers::sqrt2 - 1.0);

inline SolvedParams solve_deterministic(const MeanVector& m) {
    const OrderedMeans om = order_means(m);
    auto p = detail::two_agent_shell(Mode::Deterministic, {}, om.high, om.low);
    p.order = {om.order[0], om.order[1]};
    if (om.low >= kDeterministicSplit) {
        const double d1 = 1 - std::sqrt(2 * (1 - om.high));
        const double d2 = 1 - std::sqrt(2 * (1 - om.low));
        const double top = 1 - std::sqrt((1 - om.high) / 2) - std::sqrt((1 - om.low) / 2);
        if (top < 0) throw NoSolutionError("solve_deterministic: negative top mass");
        p.constants = DeterministicConstants{d1, d2, false};
        p.residuals = {{"mean_1", d1 * std::sqrt((1 - om.high) / 2) + (1 - std::sqrt((1 - om.high) / 2)) - om.high},
                       {"mean_2", d2 * std::sqrt((1 - om.low) / 2) + (1 - std::sqrt((1 - om.low) / 2)) - om.low}};
        if (d1 >= 1.0 && d2 >= 1.0) p.notes.emplace_back("degenerate");
    } else {
        p.constants = DeterministicConstants{1 - std::sqrt(1 - om.high), 0.0, true};
        p.residuals = {{"mean_1", 0.0}};
    }
    return p;
}

struct SolveOptions {
    Mode mode = Mode::Randomized;
    int agents = 0;               ///< N for the N-agent mode when a single mean is given
    double eps = 1e-9;            ///< boundary snapping tolerance
    double diagonal_gap = 1e-6;   ///< gaps below this use the symmetric solution
};

/// Solve for the constants of the case containing m.
inline SolvedParams solve(const MeanVector& m, const SolveOptions& opt = {}) {
    switch (opt.mode) {
        case Mode::Excludable: return solve_excludable(m);
        case Mode::Deterministic: return solve_deterministic(m);
        case Mode::NAgent: {
            const int n = opt.agents > 0 ? opt.agents : static_cast<int>(m.size());
            if (m.size() != 1 && m.size() != std::size_t(n)) throw DomainError("solve: N does not match the means");
            for (double x : m.values()) {
                if (std::abs(x - m[0]) > 1e-12) throw DomainError("solve: N-agent mode needs equal means");
            }
            return solve_nagent(n, m[0]);
        }
        case Mode::Randomized: break;
    }
    const Classification cl = classify(m, opt.eps);
    const double m1 = cl.means.high;
    const double m2 = cl.means.low;
    SolvedParams p;
    const bool near_diagonal = m1 - m2 < opt.diagonal_gap;
    if (near_diagonal) {
        const double mid = 0.5 * (m1 + m2);
        p = mid < kSymmetricSplit ? solve_sym_low(mid) : solve_sym_high(mid);
        p.means = {m1, m2};
        if (m1 != m2) p.notes.emplace_back("diagonal_routed");
    } else {
        switch (cl.label.tag) {
            case CaseTag::AreaI: p = solve_area1(m1, m2, cl.label); break;
            case CaseTag::AreaII: p = solve_area2(m1, m2, cl.label); break;
            case CaseTag::AreaIII: p = solve_area3(m1, m2, cl.label); break;
            case CaseTag::AreaIV: p = solve_area4(m1, m2, cl.label); break;
            default: throw NoSolutionError("solve: unexpected symmetric label off the diagonal");
        }
    }
    p.order = {cl.means.order[0], cl.means.order[1]};
    return p;
}

}  // namespace robustpg
