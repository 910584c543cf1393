#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "robustpg/errors.hpp"
#include "robustpg/numerics.hpp"
#include "robustpg/params.hpp"

namespace robustpg {

enum class MechanismKind {
    Randomized,
    DeterministicLinear,
    DeterministicPosted,
    DeterministicDictator,
    Excludable,
    NAgent
};

inline std::string_view to_string(MechanismKind k) {
    switch (k) {
        case MechanismKind::Randomized: return "RANDOMIZED";
        case MechanismKind::DeterministicLinear: return "DETERMINISTIC_LINEAR";
        case MechanismKind::DeterministicPosted: return "DETERMINISTIC_POSTED";
        case MechanismKind::DeterministicDictator: return "DETERMINISTIC_DICTATOR";
        case MechanismKind::Excludable: return "EXCLUDABLE";
        case MechanismKind::NAgent: return "N_AGENT";
    }
    return "?";
}

/// Member of the deterministic maxmin family to build when both thresholds apply.
enum class DeterministicVariant { Linear, Posted };

/// Throws unless v has `agents` entries, each in [0,1].
inline void check_profile(std::span<const double> v, std::size_t agents) {
    if (v.size() != agents) throw DomainError("value profile has the wrong number of agents");
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("value outside [0,1]");
    }
}

namespace detail {

inline bool is_top(double v1, double v2) { return v1 >= 1.0 && v2 >= 1.0; }

/// Two-agent rules work on sorted agents (index 0 has the higher mean) and
/// expose: q(v1, v2), the lowest own value with positive provision given the
/// other value, and interior kinks along an agent's axis.

struct SymLowRule {
    double r1, a;
    double q(double v1, double v2) const {
        if (v1 + v2 < r1) return 0.0;
        const bool low1 = v1 <= r1, low2 = v2 <= r1;
        if (low1 && low2) return a / r1 * (v1 + v2 - r1);
        if (!low1 && low2) return a * std::log(v1 / r1) + a / r1 * v2;
        if (low1) return a * std::log(v2 / r1) + a / r1 * v1;
        return a * (std::log(v1) + std::log(v2)) + 1.0;
    }
    double floor(int, double other) const { return r1 - other; }
    void kinks(int, double, std::vector<double>& out) const { out.push_back(r1); }
};

struct SymHighRule {
    double r2;
    double q(double v1, double v2) const {
        if (r2 >= 1.0) return is_top(v1, v2) ? 1.0 : 0.0;
        const double e = v1 + v2 - 1 - r2;
        return e >= 0 ? e / (1 - r2) : 0.0;
    }
    double floor(int, double other) const { return r2 >= 1.0 ? 1.0 : 1 + r2 - other; }
    void kinks(int, double, std::vector<double>&) const {}
    double payment(int k, double v1, double v2) const {
        if (r2 >= 1.0) return is_top(v1, v2) ? 1.0 : 0.0;
        const double e = v1 + v2 - 1 - r2;
        if (e <= 0) return 0.0;
        const double own = k == 0 ? v1 : v2;
        return own * e / (1 - r2) - e * e / (2 * (1 - r2));
    }
};

struct AreaIRule {
    double s1, s2, scale;  // scale = c / ln(s1/s2)
    double q(double v1, double v2) const {
        if (s2 * v1 + s1 * v2 < s1 * s2) return 0.0;
        const bool low1 = v1 <= s1, low2 = v2 <= s2;
        const double f1 = low1 ? std::log(v1 + s2 - s2 / s1 * v1) : (1 - s2 / s1) * std::log(v1) + s2 / s1 * std::log(s1);
        const double f2 = low2 ? std::log(v2 + s1 - s1 / s2 * v2) : (1 - s1 / s2) * std::log(v2) + s1 / s2 * std::log(s2);
        if (!low1 && !low2) return scale * ((1 - s2 / s1) * std::log(v1) - (1 - s1 / s2) * std::log(v2)) + 1.0;
        return scale * (f1 - f2);
    }
    double floor(int k, double other) const {
        return k == 0 ? s1 * (1 - other / s2) : s2 * (1 - other / s1);
    }
    void kinks(int k, double, std::vector<double>& out) const { out.push_back(k == 0 ? s1 : s2); }
};

struct AreaIIRule {
    double t1, t2;
    double q(double v1, double v2) const {
        if (t1 >= 1.0) {
            if (v1 < 1.0 || v2 < t2) return 0.0;
            return std::log((1 + v2) / (1 + t2)) / std::log(2 / (1 + t2));
        }
        if ((1 - t2) * v1 + (1 - t1) * v2 < 1 - t1 * t2) return 0.0;
        const double span = std::log((1 + t2) / (1 + t1));
        const double x = v1 + (t2 - 1) / (1 - t1) * (v1 - t1) + 1;
        const double y = v2 + (1 - t1) / (t2 - 1) * (v2 - 1) + t1;
        return std::log(x / y) / span;
    }
    double floor(int k, double other) const {
        if (t1 >= 1.0) return k == 0 ? 1.0 : t2;
        return k == 0 ? (1 - t1 * t2 - (1 - t1) * other) / (1 - t2) : (1 - t1 * t2 - (1 - t2) * other) / (1 - t1);
    }
    void kinks(int, double, std::vector<double>&) const {}
};

struct AreaIIIRule {
    double u1, u2, scale;  // scale = d / ln(u1/(1+u2))
    double q(double v1, double v2) const {
        const double gap = u1 - u2;
        if (v1 + gap * v2 < u1) return 0.0;
        const double tail = std::log(v2 - gap * v2 + u1);
        if (v1 <= u1) return scale * (std::log(v1 + (u1 - v1) / gap) - tail);
        return scale * ((1 - 1 / gap) * std::log(v1) - tail + std::log(u1) / gap);
    }
    double floor(int k, double other) const {
        return k == 0 ? u1 - (u1 - u2) * other : (u1 - other) / (u1 - u2);
    }
    void kinks(int k, double, std::vector<double>& out) const {
        if (k == 0) out.push_back(u1);
    }
};

struct AreaIVRule {
    double w1;
    double q(double v1, double) const {
        if (w1 >= 1.0) return v1 >= 1.0 ? 1.0 : 0.0;
        return v1 >= w1 ? 1 - std::log(v1) / std::log(w1) : 0.0;
    }
    double floor(int k, double) const { return k == 0 ? w1 : 0.0; }
    void kinks(int, double, std::vector<double>&) const {}
    double payment(int k, double v1, double) const {
        if (k == 1 || v1 < w1) return 0.0;
        if (w1 >= 1.0) return 1.0;
        return (v1 - w1) / -std::log(w1);
    }
};

using TwoAgentRule = std::variant<SymLowRule, SymHighRule, AreaIRule, AreaIIRule, AreaIIIRule, AreaIVRule>;

template <typename R>
concept HasClosedPayment = requires(const R& r) { r.payment(0, 0.0, 0.0); };

/// Envelope payment of sorted agent k for any two-agent rule.
template <typename R>
double envelope_payment(const R& rule, int k, double v1, double v2, double tol) {
    if constexpr (HasClosedPayment<R>) {
        return rule.payment(k, v1, v2);
    } else {
        const double own = k == 0 ? v1 : v2;
        const double other = k == 0 ? v2 : v1;
        const double qv = rule.q(v1, v2);
        if (qv <= 0.0) return 0.0;
        const double lo = std::max(0.0, rule.floor(k, other));
        if (own <= lo) return own * qv;
        std::vector<double> kinks;
        rule.kinks(k, other, kinks);
        auto along = [&](double s) { return k == 0 ? rule.q(s, other) : rule.q(other, s); };
        return own * qv - integrate_1d(along, lo, own, tol, kinks);
    }
}

struct NAgentRule {
    int n;
    double r;
    double cut() const { return n - 1 + r; }
    double denom() const { return std::pow(double(n), n - 1) - std::pow(cut(), n - 1); }
    double q(std::span<const double> v) const {
        double s = 0;
        for (double x : v) s += x;
        if (r >= 1.0) return s >= n ? 1.0 : 0.0;
        const double c = cut();
        if (s < c) return 0.0;
        return std::min(1.0, (std::pow(s, n - 1) - std::pow(c, n - 1)) / denom());
    }
    double payment(std::span<const double> v, std::size_t i) const {
        double s = 0;
        for (double x : v) s += x;
        if (r >= 1.0) return s >= n ? 1.0 : 0.0;
        const double c = cut();
        if (s < c) return 0.0;
        const double den = denom();
        const double cn1 = std::pow(c, n - 1);
        const double integral = (std::pow(s, n) - std::pow(c, n)) / (n * den) - cn1 * (s - c) / den;
        return v[i] * q(v) - integral;
    }
};

struct ExcludableRule {
    std::vector<double> gamma;
    double q(double x, std::size_t i) const {
        const double g = gamma[i];
        if (g >= 1.0) return x >= 1.0 ? 1.0 : 0.0;
        return x >= g ? 1 - std::log(x) / std::log(g) : 0.0;
    }
    double payment(double x, std::size_t i) const {
        const double g = gamma[i];
        if (x < g) return 0.0;
        if (g >= 1.0) return 1.0;
        return (x - g) / -std::log(g);
    }
};

/// Threshold rules; provision is strict on the boundary.
struct DeterministicRule {
    MechanismKind kind;
    double d1, d2;           // thresholds; dictator uses d1 only
    static constexpr double kStrict = 1e-12;

    // Positive on the strict side of slope1*(v1 - 1) + slope2*(v2 - d2) > 0.
    bool linear(double v1, double v2) const {
        const double a1 = 1 - d1, a2 = 1 - d2;
        if (a1 <= 0 && a2 <= 0) return is_top(v1, v2);
        if (a1 <= 0) return v1 >= 1.0 && v2 > d2 + kStrict;
        if (a2 <= 0) return v2 >= 1.0 && v1 > d1 + kStrict;
        return a2 * (v1 - 1) + a1 * (v2 - d2) > kStrict;
    }
    static bool above(double v, double d) { return d >= 1.0 ? v >= 1.0 : v > d; }
    double q(double v1, double v2) const {
        switch (kind) {
            case MechanismKind::DeterministicLinear: return linear(v1, v2) ? 1.0 : 0.0;
            case MechanismKind::DeterministicPosted: return above(v1, d1) && above(v2, d2) ? 1.0 : 0.0;
            default: return above(v1, d1) ? 1.0 : 0.0;
        }
    }
    /// Critical value of sorted agent k at a profile where the good is provided.
    double critical(int k, double v1, double v2) const {
        switch (kind) {
            case MechanismKind::DeterministicLinear: {
                const double a1 = 1 - d1, a2 = 1 - d2;
                if (a1 <= 0 && a2 <= 0) return 1.0;
                if (k == 0) return a2 <= 0 ? d1 : (a1 <= 0 ? 1.0 : std::max(0.0, 1 - a1 * (v2 - d2) / a2));
                return a1 <= 0 ? d2 : (a2 <= 0 ? 1.0 : std::max(0.0, d2 - a2 * (v1 - 1) / a1));
            }
            case MechanismKind::DeterministicPosted: return k == 0 ? d1 : d2;
            default: return k == 0 ? d1 : 0.0;
        }
    }
    double payment(int k, double v1, double v2) const {
        return q(v1, v2) > 0 ? critical(k, v1, v2) : 0.0;
    }
};

}  // namespace detail

/// Provision rule plus envelope payments for one solved case.
///
/// Public methods take value profiles in the caller's agent order.
class Mechanism {
public:
    explicit Mechanism(SolvedParams params, DeterministicVariant variant = DeterministicVariant::Linear)
        : params_(std::move(params)) {
        build(variant);
    }

    [[nodiscard]] const SolvedParams& params() const { return params_; }
    [[nodiscard]] MechanismKind kind() const { return kind_; }
    [[nodiscard]] std::size_t agents() const { return params_.agents(); }
    [[nodiscard]] double guarantee() const { return guarantee_; }

    /// Common provision probability; undefined for the excludable good.
    [[nodiscard]] double provision(std::span<const double> v) const {
        check_profile(v, agents());
        if (kind_ == MechanismKind::Excludable) throw UnsupportedError("excludable good has per-agent provision");
        return provision_unchecked(v);
    }

    /// Provision probability seen by agent i (the common one for a public good).
    [[nodiscard]] double provision(std::span<const double> v, std::size_t i) const {
        check_profile(v, agents());
        if (kind_ == MechanismKind::Excludable) return std::get<detail::ExcludableRule>(rule_).q(v[i], i);
        return provision_unchecked(v);
    }

    /// Envelope payment of agent i; `tol` is the absolute quadrature target.
    [[nodiscard]] double payment(std::span<const double> v, std::size_t i, double tol = 1e-12) const {
        check_profile(v, agents());
        if (i >= agents()) throw DomainError("agent index out of range");
        return std::visit(
            [&](const auto& r) -> double {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, detail::TwoAgentRule>) {
                    const auto [a, b] = sorted(v);
                    const int k = internal_index(i);
                    return std::visit([&](const auto& rr) { return detail::envelope_payment(rr, k, a, b, tol); }, r);
                } else if constexpr (std::is_same_v<R, detail::DeterministicRule>) {
                    const auto [a, b] = sorted(v);
                    return r.payment(internal_index(i), a, b);
                } else if constexpr (std::is_same_v<R, detail::NAgentRule>) {
                    return r.payment(v, i);
                } else {
                    return r.payment(v[i], i);
                }
            },
            rule_);
    }

    /// Sum of all agents' payments.
    [[nodiscard]] double total_payment(std::span<const double> v, double tol = 1e-12) const {
        double t = 0;
        for (std::size_t i = 0; i < agents(); ++i) t += payment(v, i, tol);
        return t;
    }

    /// Values along agent i's axis where the rule changes form.
    [[nodiscard]] std::vector<double> breakpoints(std::size_t i) const {
        const int k = internal_index(i);
        std::vector<double> out;
        std::visit(
            [&](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, SymLowConstants>) out = {c.r1};
                else if constexpr (std::is_same_v<C, SymHighConstants>) out = {c.r2};
                else if constexpr (std::is_same_v<C, AreaIConstants>) out = {k == 0 ? c.s1 : c.s2};
                else if constexpr (std::is_same_v<C, AreaIIConstants>) out = {k == 0 ? c.t1 : c.t2};
                else if constexpr (std::is_same_v<C, AreaIIIConstants>) out = {c.u1, c.u2};
                else if constexpr (std::is_same_v<C, AreaIVConstants>) out = {k == 0 ? c.w1 : c.w2};
                else if constexpr (std::is_same_v<C, NAgentConstants>) out = {c.r};
                else if constexpr (std::is_same_v<C, ExcludableConstants>) out = {c.gamma[i]};
                else {
                    if (c.dictator) out = {k == 0 ? c.d1 : params_.means[1]};
                    else out = {k == 0 ? c.d1 : c.d2};
                }
            },
            params_.constants);
        return sorted_unique(out);
    }

    /// Internal (sorted) index of caller agent i.
    [[nodiscard]] int internal_index(std::size_t i) const {
        for (std::size_t k = 0; k < params_.order.size(); ++k) {
            if (params_.order[k] == i) return static_cast<int>(k);
        }
        return static_cast<int>(i);
    }

private:
    using Rule = std::variant<detail::TwoAgentRule, detail::DeterministicRule, detail::NAgentRule, detail::ExcludableRule>;

    std::pair<double, double> sorted(std::span<const double> v) const {
        return {v[params_.order[0]], v[params_.order[1]]};
    }

    double provision_unchecked(std::span<const double> v) const {
        return std::visit(
            [&](const auto& r) -> double {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, detail::TwoAgentRule>) {
                    const auto [a, b] = sorted(v);
                    return std::clamp(std::visit([&](const auto& rr) { return rr.q(a, b); }, r), 0.0, 1.0);
                } else if constexpr (std::is_same_v<R, detail::DeterministicRule>) {
                    const auto [a, b] = sorted(v);
                    return r.q(a, b);
                } else if constexpr (std::is_same_v<R, detail::NAgentRule>) {
                    return r.q(v);
                } else {
                    return 0.0;
                }
            },
            rule_);
    }

    void build(DeterministicVariant variant) {
        kind_ = MechanismKind::Randomized;
        std::visit(
            [&](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, SymLowConstants>) {
                    rule_ = detail::TwoAgentRule{detail::SymLowRule{c.r1, c.a}};
                    guarantee_ = c.r1 / 2;
                } else if constexpr (std::is_same_v<C, SymHighConstants>) {
                    rule_ = detail::TwoAgentRule{detail::SymHighRule{c.r2}};
                    guarantee_ = (1 + c.r2) * (1 + c.r2) / 2;
                } else if constexpr (std::is_same_v<C, AreaIConstants>) {
                    rule_ = detail::TwoAgentRule{detail::AreaIRule{c.s1, c.s2, c.c / std::log(c.s1 / c.s2)}};
                    guarantee_ = c.s1 * c.s2 / (c.s1 + c.s2);
                } else if constexpr (std::is_same_v<C, AreaIIConstants>) {
                    rule_ = detail::TwoAgentRule{detail::AreaIIRule{c.t1, c.t2}};
                    guarantee_ = (1 + c.t1) * (1 + c.t2) / 2;
                } else if constexpr (std::is_same_v<C, AreaIIIConstants>) {
                    rule_ = detail::TwoAgentRule{detail::AreaIIIRule{c.u1, c.u2, c.d / std::log(c.u1 / (1 + c.u2))}};
                    guarantee_ = c.u1 * (c.u2 + 1) / (c.u1 + 1);
                } else if constexpr (std::is_same_v<C, AreaIVConstants>) {
                    rule_ = detail::TwoAgentRule{detail::AreaIVRule{c.w1}};
                    guarantee_ = c.w1;
                } else if constexpr (std::is_same_v<C, NAgentConstants>) {
                    kind_ = MechanismKind::NAgent;
                    rule_ = detail::NAgentRule{c.n, c.r};
                    guarantee_ = std::pow(c.r + c.n - 1, c.n) / std::pow(double(c.n), c.n - 1);
                } else if constexpr (std::is_same_v<C, ExcludableConstants>) {
                    kind_ = MechanismKind::Excludable;
                    rule_ = detail::ExcludableRule{c.gamma};
                    guarantee_ = 0;
                    for (double g : c.gamma) guarantee_ += g;
                } else {
                    if (c.dictator) {
                        kind_ = MechanismKind::DeterministicDictator;
                        guarantee_ = c.d1 * c.d1;
                    } else {
                        kind_ = variant == DeterministicVariant::Posted ? MechanismKind::DeterministicPosted
                                                                        : MechanismKind::DeterministicLinear;
                        guarantee_ = (c.d1 + c.d2) * (c.d1 + c.d2) / 2;
                    }
                    rule_ = detail::DeterministicRule{kind_, c.d1, c.d2};
                }
            },
            params_.constants);
    }

    SolvedParams params_;
    MechanismKind kind_{};
    Rule rule_;
    double guarantee_ = 0;
};

/// Revenue guarantee of the solved case.
inline double revenue_guarantee(const SolvedParams& p) { return Mechanism(p).guarantee(); }

}  // namespace robustpg
