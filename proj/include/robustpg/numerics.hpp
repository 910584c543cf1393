#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "robustpg/errors.hpp"

namespace robustpg {

template <typename F>
concept ScalarFunction = std::regular_invocable<F, double> &&
                         std::convertible_to<std::invoke_result_t<F, double>, double>;

/// Search interval and stopping rule for solve_monotone.
struct Bracket {
    double lo = 0.0;
    double hi = 1.0;
    double tol_x = 1e-12;  ///< absolute width at which the search stops
    double tol_f = 1e-12;  ///< absolute residual accepted as a root
    int max_iter = 200;
};

/// Lower real branch of the Lambert W function on [-1/e, 0).
inline double lambert_w_minus1(double x) {
    constexpr double branch = -1.0 / std::numbers::e;
    if (!(x < 0.0) || x < branch - 4.0 * std::numeric_limits<double>::epsilon()) {
        throw DomainError("lambert_w_minus1: argument outside [-1/e, 0)");
    }
    if (x <= branch) return -1.0;
    try {
        return boost::math::lambert_wm1(x);
    } catch (const std::exception& e) {
        throw ConvergenceError(std::string("lambert_w_minus1: ") + e.what());
    }
}

/// Root of f(x) = target inside a bracket on which f is continuous and monotone.
///
/// Endpoints within tol_f of the target are returned directly; otherwise the
/// bracket must straddle the target.  Uses TOMS 748 with a bisection fallback
/// for its termination rule.
template <ScalarFunction F>
double solve_monotone(F&& f, const Bracket& b, double target) {
    if (!(b.lo < b.hi) || !(b.tol_x > 0) || !(b.tol_f > 0) || b.max_iter < 1) {
        throw DomainError("solve_monotone: invalid bracket");
    }
    auto g = [&](double x) { return static_cast<double>(f(x)) - target; };
    const double glo = g(b.lo);
    const double ghi = g(b.hi);
    if (std::isnan(glo) || std::isnan(ghi)) throw BracketError("solve_monotone: NaN at bracket end");
    if (std::abs(glo) <= b.tol_f && std::abs(glo) <= std::abs(ghi)) return b.lo;
    if (std::abs(ghi) <= b.tol_f) return b.hi;
    if ((glo > 0) == (ghi > 0)) {
        throw BracketError("solve_monotone: bracket does not straddle the target");
    }
    std::uintmax_t iters = static_cast<std::uintmax_t>(b.max_iter);
    const double tol_x = b.tol_x;
    auto width_ok = [tol_x](double a, double c) {
        const double ulps = 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(c));
        return std::abs(c - a) <= std::max(tol_x, ulps);
    };
    auto stop = [&](double a, double c) { return width_ok(a, c); };
    std::pair<double, double> r;
    try {
        r = boost::math::tools::toms748_solve(g, b.lo, b.hi, glo, ghi, stop, iters);
    } catch (const std::exception& e) {
        throw ConvergenceError(std::string("solve_monotone: ") + e.what());
    }
    const double ga = g(r.first);
    const double gb = g(r.second);
    const double x = std::abs(ga) <= std::abs(gb) ? r.first : r.second;
    if (!width_ok(r.first, r.second) && std::min(std::abs(ga), std::abs(gb)) > b.tol_f) {
        throw ConvergenceError("solve_monotone: iteration budget exhausted");
    }
    return x;
}

/// Plain bisection; the reference against which accelerated solves are compared.
template <ScalarFunction F>
double bisect_monotone(F&& f, const Bracket& b, double target) {
    double lo = b.lo, hi = b.hi;
    double glo = f(lo) - target;
    if ((glo > 0) == (f(hi) - target > 0)) throw BracketError("bisect_monotone: no sign change");
    for (int i = 0; i < 4 * b.max_iter && hi - lo > b.tol_x; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = f(mid) - target;
        if (gm == 0.0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

template <ScalarFunction F>
double gk_recurse(F& f, double a, double b, double tol, int depth, double& err) {
    double e = 0.0;
    const double est =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &e);
    e *= 0.5 * (b - a);  // reported on the reference interval [-1, 1]
    if (e <= tol || e <= 1e-13 * std::abs(est) || depth == 0 || b - a <= 8 * std::numeric_limits<double>::epsilon() * (1 + std::abs(a))) {
        err += e;
        return est;
    }
    const double mid = 0.5 * (a + b);
    return gk_recurse(f, a, mid, 0.5 * tol, depth - 1, err) +
           gk_recurse(f, mid, b, 0.5 * tol, depth - 1, err);
}

}  // namespace detail

/// Adaptive Gauss–Kronrod (7/15) quadrature with absolute error target `tol`
/// and a relative floor of 1e-13.
///
/// `breakpoints` are split points where the integrand may have kinks or jumps;
/// entries outside (lo, hi) are ignored.
template <ScalarFunction F>
double integrate_1d(F&& f, double lo, double hi, double tol = 1e-12,
                    std::span<const double> breakpoints = {}) {
    if (hi < lo) return -integrate_1d(f, hi, lo, tol, breakpoints);
    if (hi == lo) return 0.0;
    std::vector<double> cuts{lo};
    for (double p : breakpoints) {
        if (p > lo && p < hi) cuts.push_back(p);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto g = [&f](double x) { return static_cast<double>(f(x)); };
    const double per_piece = tol / static_cast<double>(cuts.size() - 1);
    double total = 0.0;
    double err = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        total += detail::gk_recurse(g, cuts[k], cuts[k + 1], per_piece, 30, err);
    }
    if (!(err <= 10 * tol + 1e-12 * std::abs(total)) || !std::isfinite(total)) {
        throw ConvergenceError("integrate_1d: subdivision limit reached");
    }
    return total;
}

/// Sorted, de-duplicated copy of `xs` restricted to [lo, hi].
inline std::vector<double> sorted_unique(std::vector<double> xs, double lo = 0.0, double hi = 1.0) {
    std::erase_if(xs, [&](double x) { return !(x >= lo && x <= hi); });
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace robustpg
