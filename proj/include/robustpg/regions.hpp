#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robustpg/detail/moment_maps.hpp"
#include "robustpg/errors.hpp"
#include "robustpg/numerics.hpp"

namespace robustpg {

/// Mean at which the symmetric solution switches families.
inline constexpr double kSymmetricSplit = 0.75;

/// Known expectations of the agents' values, each in [0,1].
class MeanVector {
public:
    MeanVector() = default;
    explicit MeanVector(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw DomainError("MeanVector: no agents");
        for (double m : values_) {
            if (!(m >= 0.0 && m <= 1.0)) throw DomainError("MeanVector: mean outside [0,1]");
        }
    }
    MeanVector(std::initializer_list<double> values) : MeanVector(std::vector<double>(values)) {}

    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

/// A two-agent mean pair sorted so that high >= low.
struct OrderedMeans {
    double high = 0.0;
    double low = 0.0;
    /// order[k] is the caller's index of sorted agent k.
    std::array<std::size_t, 2> order{0, 1};

    [[nodiscard]] bool swapped() const { return order[0] != 0; }
};

inline OrderedMeans order_means(const MeanVector& m) {
    if (m.size() != 2) throw DomainError("two-agent operation on a mean vector of another size");
    if (m[0] >= m[1]) return {m[0], m[1], {0, 1}};
    return {m[1], m[0], {1, 0}};
}

enum class CaseTag { SymLow, SymHigh, AreaI, AreaII, AreaIII, AreaIV };
enum class BoundaryTag { None, BoundaryI, BoundaryII, BoundaryIII, SymmetricSplit };

struct CaseLabel {
    CaseTag tag = CaseTag::SymLow;
    BoundaryTag on_boundary = BoundaryTag::None;
    friend bool operator==(const CaseLabel&, const CaseLabel&) = default;
};

inline std::string_view to_string(CaseTag t) {
    switch (t) {
        case CaseTag::SymLow: return "SYM_I";
        case CaseTag::SymHigh: return "SYM_II";
        case CaseTag::AreaI: return "AREA_I";
        case CaseTag::AreaII: return "AREA_II";
        case CaseTag::AreaIII: return "AREA_III";
        case CaseTag::AreaIV: return "AREA_IV";
    }
    return "?";
}

inline std::string_view to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::None: return "";
        case BoundaryTag::BoundaryI: return "B_I";
        case BoundaryTag::BoundaryII: return "B_II";
        case BoundaryTag::BoundaryIII: return "B_III";
        case BoundaryTag::SymmetricSplit: return "SYM_SPLIT";
    }
    return "?";
}

inline CaseTag parse_case_tag(std::string_view s) {
    for (CaseTag t : {CaseTag::SymLow, CaseTag::SymHigh, CaseTag::AreaI, CaseTag::AreaII,
                      CaseTag::AreaIII, CaseTag::AreaIV}) {
        if (to_string(t) == s) return t;
    }
    throw DomainError("unknown case tag: " + std::string(s));
}

inline BoundaryTag parse_boundary_tag(std::string_view s) {
    for (BoundaryTag t : {BoundaryTag::None, BoundaryTag::BoundaryI, BoundaryTag::BoundaryII,
                          BoundaryTag::BoundaryIII, BoundaryTag::SymmetricSplit}) {
        if (to_string(t) == s) return t;
    }
    throw DomainError("unknown boundary tag: " + std::string(s));
}

/// Point (m1, m2) on the curve separating the low-mean interior area, at parameter r in (0,1].
inline std::pair<double, double> boundary_I_point(double r) {
    return {detail::low_family_mean(r, 1.0), detail::low_family_mean(1.0, r)};
}

/// Point (m1, m2) on the curve bounding the high-mean interior area, at r in [0,1].
inline std::pair<double, double> boundary_II_point(double r) {
    return {detail::high_family_mean(r, 0.0), detail::high_family_mean(0.0, r)};
}

/// Point (m1, m2) on the dictatorship curve, at r in (0,1].
inline std::pair<double, double> boundary_III_point(double r) {
    return {r * (1 - std::log(r)), r * std::log1p(1 / r)};
}

/// Lower edge m2 = B_I(m1) of the low-mean interior area, for m1 in (0, 3/4).
inline double boundary_I(double m1) {
    if (!(m1 > 0.0 && m1 < kSymmetricSplit)) throw DomainError("boundary_I: m1 outside (0, 3/4)");
    Bracket b{1e-300, 1.0, 1e-15, 1e-15};
    const double r = solve_monotone([](double x) { return detail::low_family_mean(x, 1.0); }, b, m1);
    return detail::low_family_mean(1.0, r);
}

/// Lower edge m2 = B_II(m1) of the high-mean interior area, for m1 in (3/4, 1].
inline double boundary_II(double m1) {
    if (!(m1 > kSymmetricSplit && m1 <= 1.0)) throw DomainError("boundary_II: m1 outside (3/4, 1]");
    Bracket b{0.0, 1.0, 1e-15, 1e-15};
    const double r = solve_monotone([](double x) { return detail::high_family_mean(x, 0.0); }, b, m1);
    return detail::high_family_mean(0.0, r);
}

/// Upper edge m2 = B_III(m1) of the dictatorship area, for m1 in (0, 1].
inline double boundary_III(double m1) {
    if (!(m1 > 0.0 && m1 <= 1.0)) throw DomainError("boundary_III: m1 outside (0, 1]");
    const double r = m1 == 1.0 ? 1.0 : std::exp(lambert_w_minus1(-m1 / std::numbers::e) + 1.0);
    return r * std::log1p(1 / r);
}

/// Case of an ordered pair m1 >= m2; equalities within eps are recorded in on_boundary.
inline CaseLabel classify_ordered(double m1, double m2, double eps = 1e-9) {
    if (!(m1 >= 0 && m1 <= 1 && m2 >= 0 && m2 <= 1)) throw DomainError("classify: mean outside [0,1]");
    if (m2 > m1) throw DomainError("classify_ordered: expects m1 >= m2");
    if (m1 - m2 <= eps) {
        const double m = 0.5 * (m1 + m2);
        if (std::abs(m - kSymmetricSplit) <= eps) return {CaseTag::SymHigh, BoundaryTag::SymmetricSplit};
        return {m < kSymmetricSplit ? CaseTag::SymLow : CaseTag::SymHigh, BoundaryTag::None};
    }
    if (m1 < kSymmetricSplit && m1 > 0) {
        const double b1 = boundary_I(m1);
        if (m2 > b1 + eps) return {CaseTag::AreaI, BoundaryTag::None};
        if (m2 >= b1 - eps) {
            const double b3 = boundary_III(m1);
            if (m2 <= b3 + eps) return {CaseTag::AreaIV, BoundaryTag::BoundaryIII};
            return {CaseTag::AreaIII, BoundaryTag::BoundaryI};
        }
    }
    if (m1 > kSymmetricSplit) {
        const double b2 = boundary_II(m1);
        if (m2 >= b2 - eps) {
            return {CaseTag::AreaII, m2 <= b2 + eps ? BoundaryTag::BoundaryII : BoundaryTag::None};
        }
    }
    const double b3 = boundary_III(m1);
    if (m2 <= b3 + eps) {
        return {CaseTag::AreaIV, m2 >= b3 - eps ? BoundaryTag::BoundaryIII : BoundaryTag::None};
    }
    return {CaseTag::AreaIII, BoundaryTag::None};
}

struct Classification {
    CaseLabel label;
    OrderedMeans means;
};

/// Classify a two-agent mean vector after sorting it so that m1 >= m2.
inline Classification classify(const MeanVector& m, double eps = 1e-9) {
    const OrderedMeans om = order_means(m);
    return {classify_ordered(om.high, om.low, eps), om};
}

}  // namespace robustpg
