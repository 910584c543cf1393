#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "robustpg/distributions.hpp"
#include "robustpg/errors.hpp"
#include "robustpg/mechanisms.hpp"
#include "robustpg/nagent.hpp"
#include "robustpg/numerics.hpp"
#include "robustpg/params.hpp"
#include "robustpg/simplex.hpp"

namespace robustpg {

/// Means of p in the caller's agent order.
inline std::vector<double> caller_means(const SolvedParams& p) {
    std::vector<double> out(p.agents());
    for (std::size_t k = 0; k < p.agents(); ++k) out[p.order[k]] = p.means[k];
    return out;
}

// ---------------------------------------------------------------------------
// Parallel helpers

/// Runs body(k) for k in [0, count) on up to `workers` threads, in contiguous blocks.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * block, hi = std::min(count, lo + block);
                for (std::size_t k = lo; k < hi; ++k) body(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------------------
// Grids

struct GridSpec {
    std::size_t points = 101;      ///< per axis, at least 2
    bool endpoints = true;         ///< include 0 and 1; otherwise cell midpoints plus 1
    bool refine = true;            ///< add the mechanism's breakpoints
    std::vector<double> extra;     ///< further values added on every axis

    GridSpec() = default;
    GridSpec(std::size_t per_axis) : points(per_axis) {}  // NOLINT(google-explicit-constructor)
};

/// Axis values for caller agent i.
inline std::vector<double> grid_axis(const GridSpec& g, const Mechanism* mech = nullptr, std::size_t i = 0) {
    if (g.points < 2) throw DomainError("grid: at least two points per axis");
    std::vector<double> xs;
    const double n = static_cast<double>(g.points - 1);
    for (std::size_t k = 0; k < g.points; ++k) {
        xs.push_back(g.endpoints ? static_cast<double>(k) / n : (static_cast<double>(k) + 0.5) / static_cast<double>(g.points));
    }
    xs.back() = g.endpoints ? 1.0 : xs.back();
    if (!g.endpoints) xs.push_back(1.0);
    if (g.refine && mech) {
        for (double b : mech->breakpoints(i)) xs.push_back(b);
    }
    for (double e : g.extra) xs.push_back(e);
    return sorted_unique(xs);
}

inline std::vector<std::vector<double>> grid_axes(const GridSpec& g, const Mechanism& mech) {
    std::vector<std::vector<double>> axes;
    for (std::size_t i = 0; i < mech.agents(); ++i) axes.push_back(grid_axis(g, &mech, i));
    return axes;
}

/// Calls f(profile) on every point of the product grid.
template <typename F>
void for_each_profile(const std::vector<std::vector<double>>& axes, F&& f) {
    const std::size_t n = axes.size();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (axes[k].empty()) return;
        v[k] = axes[k][0];
    }
    while (true) {
        f(std::span<const double>(v));
        std::size_t k = 0;
        while (k < n) {
            if (++idx[k] < axes[k].size()) {
                v[k] = axes[k][idx[k]];
                break;
            }
            idx[k] = 0;
            v[k] = axes[k][0];
            ++k;
        }
        if (k == n) return;
    }
}

/// Calls f(profile) once per multiset of axis values of size n (non-decreasing profiles).
template <typename F>
void for_each_multiset(const std::vector<double>& axis, std::size_t n, F&& f) {
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> v(n, axis.empty() ? 0.0 : axis[0]);
    if (axis.empty()) return;
    while (true) {
        f(std::span<const double>(v));
        std::size_t k = n;
        while (k > 0 && idx[k - 1] + 1 == axis.size()) --k;
        if (k == 0) return;
        ++idx[k - 1];
        for (std::size_t j = k; j < n; ++j) idx[j] = idx[k - 1];
        for (std::size_t j = k - 1; j < n; ++j) v[j] = axis[idx[j]];
    }
}

/// Grid traversal for a mechanism: multisets for the symmetric N-agent rule, full product otherwise.
template <typename F>
void for_each_grid_profile(const Mechanism& mech, const GridSpec& g, F&& f) {
    if (mech.kind() == MechanismKind::NAgent) {
        for_each_multiset(grid_axis(g, &mech, 0), mech.agents(), f);
    } else {
        for_each_profile(grid_axes(g, mech), f);
    }
}

// ---------------------------------------------------------------------------
// Dual certificates

struct DualCertificate {
    std::vector<double> lambdas;   ///< caller order
    double mu = 0.0;
    double value = 0.0;            ///< lambdas.m + mu at the solved means
    std::optional<double> anchor_mu;  ///< second recovery of mu, when the case has one
    bool anchors_agree = true;

    [[nodiscard]] double at(std::span<const double> v) const {
        double s = mu;
        for (std::size_t i = 0; i < v.size(); ++i) s += lambdas[i] * v[i];
        return s;
    }
};

namespace detail {

inline void require_nondegenerate(bool ok, const char* what) {
    if (!ok) throw DegenerateError(std::string("dual_certificate: degenerate constants (") + what + "), the certificate is a limit");
}

}  // namespace detail

/// Closed-form multipliers (lambda, mu) certifying the worst case of p.
inline DualCertificate dual_certificate(const SolvedParams& p) {
    const Mechanism mech(p);
    std::vector<double> lam(p.agents(), 0.0);  // internal order
    double mu = 0.0;
    std::optional<double> anchor;
    auto total_internal = [&](double a, double b) {
        std::vector<double> v(2);
        v[p.order[0]] = a;
        v[p.order[1]] = b;
        return mech.total_payment(v);
    };
    std::visit(
        [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, SymLowConstants>) {
                detail::require_nondegenerate(std::isfinite(c.a) && c.a > 0, "a");
                lam = {c.a, c.a};
                mu = -c.a * c.r1;
            } else if constexpr (std::is_same_v<C, SymHighConstants>) {
                detail::require_nondegenerate(c.r2 < 1, "r2 = 1");
                const double l = (1 + c.r2) / (1 - c.r2);
                lam = {l, l};
                mu = -l * (1 + c.r2);
            } else if constexpr (std::is_same_v<C, AreaIConstants>) {
                const double ln = std::log(c.s1 / c.s2);
                detail::require_nondegenerate(ln != 0 && std::isfinite(ln), "s1 = s2");
                lam = {c.c * (1 - c.s2 / c.s1) / ln, -c.c * (1 - c.s1 / c.s2) / ln};
                mu = -c.c * (c.s1 - c.s2) / ln;
            } else if constexpr (std::is_same_v<C, AreaIIConstants>) {
                const double ln = std::log((1 + c.t2) / (1 + c.t1));
                detail::require_nondegenerate(c.t1 < 1 && c.t2 < 1 && ln != 0, "t1 = t2 or a unit threshold");
                lam = {(c.t2 - c.t1) / ((1 - c.t1) * ln), -(c.t1 - c.t2) / ((1 - c.t2) * ln)};
                mu = -(lam[0] * c.t1 + lam[1]);
                anchor = total_internal(1.0, c.t2) - lam[0] - lam[1] * c.t2;
            } else if constexpr (std::is_same_v<C, AreaIIIConstants>) {
                const double ln = std::log(c.u1 / (1 + c.u2));
                detail::require_nondegenerate(c.u1 > c.u2 && ln != 0 && std::isfinite(ln), "u1 = u2");
                const double scale = c.d / ln;
                const double k = 1 + c.u2 - c.u1;
                lam = {-scale * k / (c.u1 - c.u2), -scale * k};
                mu = -lam[0] * c.u1;
                anchor = total_internal(c.u2, 1.0) - lam[0] * c.u2 - lam[1];
            } else if constexpr (std::is_same_v<C, AreaIVConstants>) {
                detail::require_nondegenerate(c.w1 > 0 && c.w1 < 1, "w1 = 1");
                lam = {-1 / std::log(c.w1), 0.0};
                mu = -lam[0] * c.w1;
            } else if constexpr (std::is_same_v<C, NAgentConstants>) {
                const double n = c.n, cut = c.r + n - 1;
                const double den = std::pow(n, n - 1) - std::pow(cut, n - 1);
                detail::require_nondegenerate(den > 0, "r = 1");
                std::fill(lam.begin(), lam.end(), (n - 1) * std::pow(cut, n - 1) / den);
                mu = -(n - 1) * std::pow(cut, n) / den;
            } else if constexpr (std::is_same_v<C, ExcludableConstants>) {
                for (std::size_t i = 0; i < c.gamma.size(); ++i) {
                    detail::require_nondegenerate(c.gamma[i] > 0 && c.gamma[i] < 1, "gamma_i = 1");
                    lam[i] = -1 / std::log(c.gamma[i]);
                    mu += c.gamma[i] / std::log(c.gamma[i]);
                }
            } else {
                if (c.dictator) {
                    detail::require_nondegenerate(c.d1 < 1, "threshold = 1");
                    lam = {c.d1 / (1 - c.d1), 0.0};
                    mu = -lam[0] * c.d1;
                } else {
                    detail::require_nondegenerate(c.d1 < 1 && c.d2 < 1, "threshold = 1");
                    const double s = c.d1 + c.d2;
                    lam = {s / (1 - c.d1), s / (1 - c.d2)};
                    mu = -s * (1 - c.d1 * c.d2) / ((1 - c.d1) * (1 - c.d2));
                }
            }
        },
        p.constants);

    DualCertificate cert;
    cert.lambdas.assign(p.agents(), 0.0);
    for (std::size_t k = 0; k < p.agents(); ++k) cert.lambdas[p.order[k]] = lam[k];
    cert.mu = mu;
    cert.value = cert.at(caller_means(p));
    cert.anchor_mu = anchor;
    if (anchor) cert.anchors_agree = std::abs(*anchor - mu) <= 1e-8;
    return cert;
}

/// Minimum over the grid of total payment minus the certificate plane.
inline double check_feasibility(const DualCertificate& cert, const Mechanism& mech, const GridSpec& g) {
    double margin = std::numeric_limits<double>::infinity();
    for_each_grid_profile(mech, g, [&](std::span<const double> v) {
        margin = std::min(margin, mech.total_payment(v) - cert.at(v));
    });
    return margin;
}

/// Largest |total payment - certificate plane| over grid points in the support of d.
inline double check_slackness(const DualCertificate& cert, const Mechanism& mech, const WorstCaseDistribution& d,
                              const GridSpec& g) {
    double residual = 0.0;
    for_each_grid_profile(mech, g, [&](std::span<const double> v) {
        if (!d.in_support(v)) return;
        residual = std::max(residual, std::abs(mech.total_payment(v) - cert.at(v)));
    });
    return residual;
}

// ---------------------------------------------------------------------------
// Nature's best response on a grid

struct SupportPoint {
    std::vector<double> profile;
    double probability;
};

struct NatureLpResult {
    double value = 0.0;
    std::vector<SupportPoint> support;
    double lipschitz = 0.0;   ///< largest total-payment slope between adjacent grid points
    double spacing = 0.0;     ///< largest adjacent gap on any axis
    std::size_t columns = 0;
};

using PaymentFunction = std::function<double(std::span<const double>)>;

/// Minimum expected total payment over grid-supported laws with the given means.
inline NatureLpResult nature_lp(const PaymentFunction& total, std::span<const double> means,
                                const std::vector<std::vector<double>>& axes, unsigned workers = 1) {
    const std::size_t n = axes.size();
    if (means.size() != n) throw DomainError("nature_lp: means and grid dimension differ");
    std::size_t cols = 1;
    std::vector<std::size_t> stride(n);
    for (std::size_t k = 0; k < n; ++k) {
        stride[k] = cols;
        cols *= axes[k].size();
    }
    StandardLp lp;
    lp.rows = n + 1;
    lp.columns.resize(cols * lp.rows);
    lp.cost.resize(cols);
    lp.rhs.assign(means.begin(), means.end());
    lp.rhs.push_back(1.0);
    std::size_t j = 0;
    for_each_profile(axes, [&](std::span<const double> v) {
        for (std::size_t k = 0; k < n; ++k) lp.columns[j * lp.rows + k] = v[k];
        lp.columns[j * lp.rows + n] = 1.0;
        ++j;
    });
    parallel_for(cols, workers, [&](std::size_t c) {
        lp.cost[c] = total(std::span<const double>(lp.columns).subspan(c * lp.rows, n));
    });

    NatureLpResult out;
    out.columns = cols;
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t rest = c;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = rest % axes[k].size();
            rest /= axes[k].size();
            if (i + 1 < axes[k].size()) {
                const double h = axes[k][i + 1] - axes[k][i];
                out.spacing = std::max(out.spacing, h);
                out.lipschitz = std::max(out.lipschitz, std::abs(lp.cost[c + stride[k]] - lp.cost[c]) / h);
            }
        }
    }

    const LpSolution s = solve_lp(lp);
    out.value = s.value;
    for (std::size_t k = 0; k < s.basis.size(); ++k) {
        const auto col = lp.column(s.basis[k]);
        out.support.push_back({std::vector<double>(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(n)), s.weights[k]});
    }
    return out;
}

inline NatureLpResult nature_lp(const Mechanism& mech, std::span<const double> means, const GridSpec& g,
                                unsigned workers = 1) {
    return nature_lp([&mech](std::span<const double> v) { return mech.total_payment(v); }, means,
                     grid_axes(g, mech), workers);
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct MonteCarloSummary {
    std::size_t draws = 0;
    double revenue = 0.0, revenue_se = 0.0;
    std::vector<double> means, means_se;
    double top_frequency = 0.0, top_se = 0.0;
    double correlation = 0.0, correlation_se = 0.0;  ///< first two agents
};

namespace detail {

struct McAccumulator {
    double t = 0, t2 = 0, top = 0, cross = 0;
    std::vector<double> s, s2;
    void add(const McAccumulator& o) {
        t += o.t;
        t2 += o.t2;
        top += o.top;
        cross += o.cross;
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] += o.s[i];
            s2[i] += o.s2[i];
        }
    }
};

inline constexpr std::size_t kMcChunk = 1u << 15;

}  // namespace detail

/// Monte Carlo summary of total payments and draws.
///
/// Draws are split into fixed chunks on consecutive streams, so results do not depend on `workers`.
inline MonteCarloSummary monte_carlo(const Mechanism& mech, const WorstCaseDistribution& d, std::size_t n,
                                     SamplerState s, unsigned workers = 1) {
    if (n < 1) throw DomainError("monte_carlo: n must be at least 1");
    const std::size_t agents = d.agents();
    const std::vector<double> top = d.top_profile();
    const std::size_t chunks = (n + detail::kMcChunk - 1) / detail::kMcChunk;
    std::vector<detail::McAccumulator> acc(chunks, detail::McAccumulator{0, 0, 0, 0, std::vector<double>(agents), std::vector<double>(agents)});
    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng(SamplerState{s.seed, (s.stream << 24) + c});
        auto& a = acc[c];
        std::vector<double> v(agents);
        const std::size_t count = std::min(detail::kMcChunk, n - c * detail::kMcChunk);
        for (std::size_t k = 0; k < count; ++k) {
            d.sample(rng, v);
            const double t = mech.total_payment(v);
            a.t += t;
            a.t2 += t * t;
            bool at_top = true;
            for (std::size_t i = 0; i < agents; ++i) {
                a.s[i] += v[i];
                a.s2[i] += v[i] * v[i];
                at_top = at_top && v[i] == top[i];
            }
            a.top += at_top;
            if (agents >= 2) a.cross += v[0] * v[1];
        }
    });
    detail::McAccumulator total{0, 0, 0, 0, std::vector<double>(agents), std::vector<double>(agents)};
    for (const auto& a : acc) total.add(a);

    const double nn = static_cast<double>(n);
    auto se = [nn](double sum, double sum2) {
        const double mean = sum / nn;
        return std::sqrt(std::max(0.0, sum2 / nn - mean * mean) / nn);
    };
    MonteCarloSummary out;
    out.draws = n;
    out.revenue = total.t / nn;
    out.revenue_se = se(total.t, total.t2);
    for (std::size_t i = 0; i < agents; ++i) {
        out.means.push_back(total.s[i] / nn);
        out.means_se.push_back(se(total.s[i], total.s2[i]));
    }
    const double p = d.top_atom();
    out.top_frequency = total.top / nn;
    out.top_se = std::sqrt(p * (1 - p) / nn);
    if (agents >= 2) {
        const double cov = total.cross / nn - out.means[0] * out.means[1];
        const double sd0 = out.means_se[0] * std::sqrt(nn), sd1 = out.means_se[1] * std::sqrt(nn);
        out.correlation = sd0 > 0 && sd1 > 0 ? cov / (sd0 * sd1) : 0.0;
        out.correlation_se = 1 / std::sqrt(nn);
    }
    return out;
}

/// Mean total payment and its standard error.
inline std::pair<double, double> mc_revenue(const Mechanism& mech, const WorstCaseDistribution& d, std::size_t n,
                                            SamplerState s, unsigned workers = 1) {
    const auto m = monte_carlo(mech, d, n, s, workers);
    return {m.revenue, m.revenue_se};
}

// ---------------------------------------------------------------------------
// Incentive audit

struct IncentiveAudit {
    double dsic = 0.0;  ///< largest gain from a misreport
    double epir = 0.0;  ///< largest negative utility
};

/// Worst DSIC and EPIR violations over grid profiles and grid misreports.
inline IncentiveAudit audit_incentives(const Mechanism& mech, const GridSpec& g) {
    const auto axes = grid_axes(g, mech);
    const std::size_t n = axes.size();
    std::vector<std::size_t> size(n), stride(n);
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) {
        size[k] = axes[k].size();
        stride[k] = total;
        total *= size[k];
    }
    // provision and payment per agent at each grid profile
    std::vector<double> q(total * n), t(total * n);
    std::size_t j = 0;
    for_each_profile(axes, [&](std::span<const double> v) {
        for (std::size_t i = 0; i < n; ++i) {
            q[j * n + i] = mech.provision(v, i);
            t[j * n + i] = mech.payment(v, i);
        }
        ++j;
    });
    IncentiveAudit out;
    for (std::size_t c = 0; c < total; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t own = (c / stride[i]) % size[i];
            const double value = axes[i][own];
            const double truthful = value * q[c * n + i] - t[c * n + i];
            out.epir = std::max(out.epir, -truthful);
            const std::size_t base = c - own * stride[i];
            for (std::size_t x = 0; x < size[i]; ++x) {
                const std::size_t r = base + x * stride[i];
                out.dsic = std::max(out.dsic, value * q[r * n + i] - t[r * n + i] - truthful);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end report

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    bool skipped = false;
    std::string detail;
};

struct VerifyOptions {
    GridSpec certificate_grid{101};
    GridSpec lp_grid{201};
    GridSpec audit_grid{51};
    std::size_t mc_draws = 200000;
    SamplerState sampler{};
    unsigned workers = 1;
    DeterministicVariant variant = DeterministicVariant::Linear;
    std::size_t max_lp_columns = 400000;   ///< per-axis points shrink for many agents
    std::size_t max_audit_profiles = 300000;
};

struct VerificationReport {
    std::string case_name;
    std::vector<double> means;   ///< caller order
    double guarantee = 0.0;
    std::optional<DualCertificate> certificate;
    double feasibility_margin = std::numeric_limits<double>::quiet_NaN();
    double slackness_residual = std::numeric_limits<double>::quiet_NaN();
    std::optional<NatureLpResult> lp;
    std::optional<MonteCarloSummary> mc;
    std::optional<IncentiveAudit> audit;
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;

    [[nodiscard]] bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.skipped || c.passed; });
    }
    [[nodiscard]] const CheckResult* find(std::string_view name) const {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

namespace detail {

inline GridSpec shrink_grid(GridSpec g, std::size_t agents, std::size_t budget) {
    const auto cap = static_cast<std::size_t>(std::floor(std::pow(double(budget), 1.0 / double(agents)) + 1e-9));
    g.points = std::max<std::size_t>(2, std::min(g.points, cap));
    return g;
}

inline CheckResult at_most(std::string name, double value, double tol) {
    return {std::move(name), value, tol, std::isfinite(value) && value <= tol, false, {}};
}

}  // namespace detail

/// Certify a solved case: certificate, grid feasibility and slackness, nature LP, Monte Carlo and incentives.
inline VerificationReport verify_params(const SolvedParams& p, const VerifyOptions& opt = {}) {
    VerificationReport rep;
    const Mechanism mech(p, opt.variant);
    const WorstCaseDistribution dist(p);
    rep.case_name = case_name(p);
    rep.means = caller_means(p);
    rep.guarantee = mech.guarantee();
    rep.notes = p.notes;

    rep.checks.push_back(detail::at_most("residuals", p.max_residual(), 1e-9));

    // dual certificate
    try {
        const DualCertificate cert = dual_certificate(p);
        rep.certificate = cert;
        rep.checks.push_back(detail::at_most("certificate_value", std::abs(cert.value - rep.guarantee), 1e-8));
        if (cert.anchor_mu) {
            rep.checks.push_back(detail::at_most("certificate_anchors", std::abs(*cert.anchor_mu - cert.mu), 1e-8));
        }
        rep.feasibility_margin = check_feasibility(cert, mech, opt.certificate_grid);
        rep.checks.push_back({"feasibility", rep.feasibility_margin, -1e-7, rep.feasibility_margin >= -1e-7, false, {}});
        rep.slackness_residual = check_slackness(cert, mech, dist, opt.certificate_grid);
        rep.checks.push_back(detail::at_most("slackness", rep.slackness_residual, 1e-6));
    } catch (const DegenerateError& e) {
        rep.notes.emplace_back("degenerate_certificate");
        rep.checks.push_back({"certificate_value", 0, 0, false, true, e.what()});
    }

    // nature LP
    {
        const GridSpec g = detail::shrink_grid(opt.lp_grid, mech.agents(), opt.max_lp_columns);
        const auto axes = grid_axes(g, mech);
        const auto lp = nature_lp([&mech](std::span<const double> v) { return mech.total_payment(v); }, rep.means,
                                  axes, opt.workers);
        rep.lp = lp;
        const bool finite_law = p.mode == Mode::Deterministic;
        const double tol = finite_law ? 1e-9 : 2 * lp.lipschitz * lp.spacing + 1e-9;
        CheckResult c = detail::at_most("lp_value", std::abs(lp.value - rep.guarantee), tol);
        c.detail = "grid " + std::to_string(g.points) + " per axis";
        rep.checks.push_back(c);
        rep.checks.push_back(detail::at_most("lp_support", double(lp.support.size()), double(mech.agents() + 1)));
    }

    // Monte Carlo
    if (opt.mc_draws > 0) {
        const auto mc = monte_carlo(mech, dist, opt.mc_draws, opt.sampler, opt.workers);
        rep.mc = mc;
        auto within = [](double x, double target, double se) {
            return std::abs(x - target) <= std::max(3 * se, 1e-12);
        };
        rep.checks.push_back({"mc_revenue", mc.revenue, 3 * mc.revenue_se, within(mc.revenue, rep.guarantee, mc.revenue_se), false, {}});
        // diagonal routing solves at the averaged mean
        const auto target = p.has_note("diagonal_routed") ? dist.moments() : rep.means;
        bool means_ok = true;
        for (std::size_t i = 0; i < mc.means.size(); ++i) means_ok = means_ok && within(mc.means[i], target[i], mc.means_se[i]);
        rep.checks.push_back({"mc_means", mc.means[0], 3 * mc.means_se[0], means_ok, false, {}});
        rep.checks.push_back({"mc_top_atom", mc.top_frequency, 3 * mc.top_se, within(mc.top_frequency, dist.top_atom(), mc.top_se), false, {}});
    } else {
        rep.checks.push_back({"mc_revenue", 0, 0, false, true, "no draws requested"});
    }

    // incentives
    {
        const GridSpec g = detail::shrink_grid(opt.audit_grid, mech.agents(), opt.max_audit_profiles);
        const auto audit = audit_incentives(mech, g);
        rep.audit = audit;
        rep.checks.push_back(detail::at_most("dsic", audit.dsic, 1e-8));
        rep.checks.push_back(detail::at_most("epir", audit.epir, 1e-10));
    }
    return rep;
}

/// Solve the case containing m and certify it.
inline VerificationReport verify_saddle(const MeanVector& m, const SolveOptions& solve_opt = {},
                                        const VerifyOptions& opt = {}) {
    return verify_params(solve(m, solve_opt), opt);
}

}  // namespace robustpg
