#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "robustpg/errors.hpp"
#include "robustpg/nagent.hpp"
#include "robustpg/numerics.hpp"
#include "robustpg/params.hpp"

namespace robustpg {

/// Density A/(slope*x + offset)^2 on [lo, hi).
struct PowerPiece {
    double lo, hi;
    double coef, slope, offset;

    [[nodiscard]] double at(double x) const {
        const double z = slope * x + offset;
        return coef / (z * z);
    }
    [[nodiscard]] double mass_to(double x) const {
        const double z0 = slope * lo + offset;
        return coef * (x - lo) / (z0 * (slope * x + offset));
    }
    [[nodiscard]] double mass() const { return mass_to(hi); }
    /// Point whose mass from lo equals u.
    [[nodiscard]] double inverse(double u) const {
        const double z0 = slope * lo + offset;
        const double k = u / coef;
        return std::min(hi, lo + k * z0 * z0 / (1 - k * slope * z0));
    }
};

/// One-dimensional law made of power pieces plus an atom.
struct PiecewiseMarginal {
    std::vector<PowerPiece> pieces;
    double atom_at = 1.0;
    double atom = 0.0;

    [[nodiscard]] Tagged at(double x) const {
        if (x == atom_at) return {MassKind::Atom, atom};
        for (const auto& p : pieces) {
            if (x >= p.lo && x < p.hi) return {MassKind::Interior, p.at(x)};
        }
        return {};
    }
    [[nodiscard]] double draw(double u) const {
        double acc = 0;
        for (const auto& p : pieces) {
            const double m = p.mass();
            if (u < acc + m) return p.inverse(u - acc);
            acc += m;
        }
        return atom_at;
    }
};

/// Two-agent worst-case family shared by every randomized case.
///
/// Interior density C/(v1+v2)^3 on {alpha.v >= beta, v >= floor, v < top},
/// edges (C/2)/(top_k + x)^2 on the lines v_k = top_k, and an atom at top.
struct TwoAgentFamily {
    std::array<double, 2> alpha;
    double beta;
    std::array<double, 2> floor{0.0, 0.0};
    std::array<double, 2> top{1.0, 1.0};
    double scale;  // C
    double atom;   // mass at top

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool in_halfplane(double v1, double v2) const {
        return alpha[0] * v1 + alpha[1] * v2 >= beta - 1e-12 && v1 >= floor[0] - 1e-12 && v2 >= floor[1] - 1e-12;
    }

    [[nodiscard]] bool in_support(double v1, double v2) const {
        return v1 >= 0 && v2 >= 0 && v1 <= top[0] && v2 <= top[1] && in_halfplane(v1, v2);
    }

    /// Lowest value of the other agent given agent j at y (may exceed its top).
    [[nodiscard]] double lower_given(int j, double y) const {
        const int i = 1 - j;
        if (y < floor[j]) return kInf;
        double lo;
        if (alpha[i] > 0) {
            lo = std::max({floor[i], (beta - alpha[j] * y) / alpha[i], 0.0});
        } else {
            lo = alpha[j] * y >= beta ? std::max(floor[i], 0.0) : kInf;
        }
        return lo;
    }

    [[nodiscard]] Tagged density(double v1, double v2) const {
        if (v1 < 0 || v2 < 0 || v1 > top[0] || v2 > top[1] || !in_halfplane(v1, v2)) return {};
        const bool at1 = v1 == top[0], at2 = v2 == top[1];
        if (at1 && at2) return {MassKind::Atom, atom};
        if (at1) return {MassKind::Edge, scale / 2 / ((top[0] + v2) * (top[0] + v2))};
        if (at2) return {MassKind::Edge, scale / 2 / ((top[1] + v1) * (top[1] + v1))};
        const double s = v1 + v2;
        return {MassKind::Interior, scale / (s * s * s)};
    }

    /// Marginal law of agent j.
    [[nodiscard]] PiecewiseMarginal marginal(int j) const {
        const int i = 1 - j;
        std::vector<double> cuts{std::max(0.0, floor[j]), top[j]};
        if (alpha[j] > 0) {
            if (alpha[i] > 0) {
                cuts.push_back((beta - alpha[i] * floor[i]) / alpha[j]);
                cuts.push_back((beta - alpha[i] * top[i]) / alpha[j]);
            } else {
                cuts.push_back(beta / alpha[j]);
            }
        }
        cuts = sorted_unique(cuts, std::max(0.0, floor[j]), top[j]);
        PiecewiseMarginal m;
        m.atom_at = top[j];
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k], b = cuts[k + 1];
            if (!(b > a)) continue;
            const double mid = 0.5 * (a + b);
            const double lo = lower_given(j, mid);
            if (!(lo <= top[i])) continue;
            const bool on_line = alpha[i] > 0 && (beta - alpha[j] * mid) / alpha[i] >= floor[i] &&
                                 (beta - alpha[j] * mid) / alpha[i] > 0;
            PowerPiece p{a, b, scale / 2, 1.0, 0.0};
            if (on_line) {
                p.slope = 1 - alpha[j] / alpha[i];
                p.offset = beta / alpha[i];
            } else {
                p.offset = std::max(floor[i], 0.0);
            }
            m.pieces.push_back(p);
        }
        m.atom = atom + top_edge_mass(j);
        return m;
    }

    /// Edge mass on the line where agent j sits at its top value.
    [[nodiscard]] double top_edge_mass(int j) const {
        const int i = 1 - j;
        const double lo = lower_given(j, top[j]);
        if (!(lo < top[i])) return 0.0;
        return scale / 2 * (1 / (lo + top[j]) - 1 / (top[i] + top[j]));
    }

    /// Conditional law of agent i at x given agent j at y.
    [[nodiscard]] Tagged conditional(int i, double x, double y) const {
        const int j = 1 - i;
        if (y < 0 || y > top[j]) throw DomainError("conditional: conditioning value outside the support");
        const double lo = lower_given(j, y);
        if (!(lo <= top[i])) throw DomainError("conditional: conditioning value outside the marginal support");
        if (y < top[j]) {
            const double c = lo + y;
            if (x == top[i]) return {MassKind::Atom, c * c / ((top[i] + y) * (top[i] + y))};
            if (x >= lo && x < top[i]) return {MassKind::Interior, 2 * c * c / ((x + y) * (x + y) * (x + y))};
            return {};
        }
        const double total = atom + top_edge_mass(j);
        if (x == top[i]) return {MassKind::Atom, atom / total};
        if (x >= lo && x < top[i]) return {MassKind::Interior, scale / 2 / ((top[j] + x) * (top[j] + x)) / total};
        return {};
    }

    /// Draw (v1, v2): agent 2 from its marginal, then agent 1 given agent 2.
    void sample(Rng& rng, std::array<double, 2>& out, const PiecewiseMarginal& second) const {
        const double y = second.draw(rng.uniform());
        const double lo = lower_given(1, y);
        double x;
        if (y < top[1]) {
            x = (lo + y) / std::sqrt(rng.open_unit()) - y;
            if (x >= top[0]) x = top[0];
            x = std::max(x, lo);
        } else {
            const double edge = top_edge_mass(1);
            const double u = rng.uniform() * (edge + atom);
            if (u < edge && lo < top[0]) {
                x = PowerPiece{lo, top[0], scale / 2, 1.0, top[1]}.inverse(u);
            } else {
                x = top[0];
            }
        }
        out = {x, y};
    }

    /// Mass and first moments by outer quadrature over agent 2.
    [[nodiscard]] std::array<double, 3> moments() const {
        std::vector<double> cuts;
        for (const auto& p : marginal(1).pieces) cuts.push_back(p.lo);
        auto interior = [&](double y, int which) {
            const double lo = lower_given(1, y);
            if (!(lo < top[0])) return 0.0;
            const double a = 1 / (lo + y), b = 1 / (top[0] + y);
            const double m0 = scale / 2 * (a * a - b * b);
            if (which == 0) return m0;
            if (which == 2) return y * m0;
            return scale * (a - b) - y * m0;
        };
        auto edge1 = [&](double y) {
            if (!(lower_given(1, y) <= top[0])) return 0.0;
            return scale / 2 / ((top[0] + y) * (top[0] + y));
        };
        const double lo2 = lower_given(1, top[1]);
        auto edge2 = [&](double x) {
            if (x < lo2) return 0.0;
            return scale / 2 / ((top[1] + x) * (top[1] + x));
        };
        std::array<double, 3> out{};
        const double tol = 1e-12;
        for (int w = 0; w < 3; ++w) {
            double total = integrate_1d([&](double y) { return interior(y, w); }, 0.0, top[1], tol, cuts);
            total += integrate_1d(
                [&](double y) { return edge1(y) * (w == 0 ? 1.0 : (w == 1 ? top[0] : y)); }, 0.0, top[1], tol, cuts);
            if (lo2 < top[0]) {
                total += integrate_1d(
                    [&](double x) { return edge2(x) * (w == 0 ? 1.0 : (w == 1 ? x : top[1])); }, lo2, top[0], tol);
            }
            total += atom * (w == 0 ? 1.0 : top[w - 1]);
            out[w] = total;
        }
        return out;
    }

    /// Weighted virtual value at a point below both tops, by quadrature.
    [[nodiscard]] double weighted_virtual_value(double v1, double v2) const {
        if (!(v1 < top[0] && v2 < top[1])) throw DomainError("weighted_virtual_value: point on a top line");
        auto tail = [&](int i, double own, double other) {
            const int j = 1 - i;
            const double lo = std::max(own, lower_given(j, other));
            double s = 0;
            if (lo < top[i]) {
                s += integrate_1d([&](double x) { const double t = x + other; return scale / (t * t * t); }, lo, top[i], 1e-12);
            }
            if (lower_given(j, other) <= top[i]) s += scale / 2 / ((top[i] + other) * (top[i] + other));
            return s;
        };
        const Tagged d = density(v1, v2);
        return d.value * (v1 + v2) - tail(0, v1, v2) - tail(1, v2, v1);
    }
};

/// Independent equal-revenue marginals.
struct ExcludableLaw {
    std::vector<double> gamma;

    [[nodiscard]] Tagged marginal(std::size_t i, double x) const {
        const double g = gamma[i];
        if (x == 1.0) return {MassKind::Atom, g};
        if (x >= g && x < 1.0) return {MassKind::Interior, g / (x * x)};
        return {};
    }
    [[nodiscard]] Tagged density(std::span<const double> v) const {
        double value = 1;
        std::size_t atoms = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Tagged t = marginal(i, v[i]);
            if (t.kind == MassKind::Zero) return {};
            atoms += t.kind == MassKind::Atom;
            value *= t.value;
        }
        const MassKind k = atoms == v.size() ? MassKind::Atom : (atoms == 0 ? MassKind::Interior : MassKind::Edge);
        return {k, value};
    }
    [[nodiscard]] bool in_support(std::span<const double> v) const {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < gamma[i] - 1e-12) return false;
        }
        return true;
    }
    void sample(Rng& rng, std::span<double> out) const {
        for (std::size_t i = 0; i < gamma.size(); ++i) out[i] = std::min(1.0, gamma[i] / rng.open_unit());
    }
};

struct PointMass {
    std::array<double, 2> at;
    double mass;
};

/// Finitely supported two-agent law.
struct DiscreteLaw {
    std::vector<PointMass> atoms;

    [[nodiscard]] Tagged density(double v1, double v2) const {
        double m = 0;
        for (const auto& a : atoms) {
            if (a.at[0] == v1 && a.at[1] == v2) m += a.mass;
        }
        return m > 0 ? Tagged{MassKind::Atom, m} : Tagged{};
    }
    void sample(Rng& rng, std::array<double, 2>& out) const {
        const double u = rng.uniform();
        double acc = 0;
        for (const auto& a : atoms) {
            acc += a.mass;
            if (u < acc) {
                out = a.at;
                return;
            }
        }
        out = atoms.back().at;
    }
};

/// Worst-case joint distribution of a solved case.
///
/// Public methods use the caller's agent order.
class WorstCaseDistribution {
public:
    explicit WorstCaseDistribution(SolvedParams params) : params_(std::move(params)) { build(); }

    [[nodiscard]] const SolvedParams& params() const { return params_; }
    [[nodiscard]] std::size_t agents() const { return params_.agents(); }

    [[nodiscard]] Tagged density(std::span<const double> v) const {
        check_profile(v, agents());
        return std::visit(
            [&](const auto& law) -> Tagged {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, TwoAgentFamily> || std::is_same_v<L, DiscreteLaw>) {
                    return law.density(v[params_.order[0]], v[params_.order[1]]);
                } else {
                    return law.density(v);
                }
            },
            law_);
    }

    /// Closed support membership, with 1e-12 slack on boundary lines.
    [[nodiscard]] bool in_support(std::span<const double> v) const {
        check_profile(v, agents());
        return std::visit(
            [&](const auto& law) -> bool {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, TwoAgentFamily>) {
                    return law.in_support(v[params_.order[0]], v[params_.order[1]]);
                } else if constexpr (std::is_same_v<L, DiscreteLaw>) {
                    const double a = v[params_.order[0]], b = v[params_.order[1]];
                    for (const auto& p : law.atoms) {
                        if (std::abs(p.at[0] - a) <= 1e-12 && std::abs(p.at[1] - b) <= 1e-12) return true;
                    }
                    return false;
                } else {
                    return law.in_support(v);
                }
            },
            law_);
    }

    /// Marginal density or atom of caller agent i at x.
    [[nodiscard]] Tagged marginal(std::size_t i, double x) const {
        return std::visit(
            [&](const auto& law) -> Tagged {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, TwoAgentFamily>) {
                    return marginals_[std::size_t(internal(i))].at(x);
                } else if constexpr (std::is_same_v<L, NAgentLaw>) {
                    return law.marginal(x);
                } else if constexpr (std::is_same_v<L, ExcludableLaw>) {
                    return law.marginal(i, x);
                } else {
                    throw UnsupportedError("marginal: not available for a finitely supported law");
                }
            },
            law_);
    }

    /// Conditional density or atom of caller agent i at x given the other agent at y.
    [[nodiscard]] Tagged conditional(std::size_t i, double x, double y) const {
        const auto* fam = std::get_if<TwoAgentFamily>(&law_);
        if (!fam) throw UnsupportedError("conditional: two-agent continuous cases only");
        return fam->conditional(internal(i), x, y);
    }

    /// Weighted virtual value at v, two-agent continuous cases, v below the top lines.
    [[nodiscard]] double weighted_virtual_value(std::span<const double> v) const {
        check_profile(v, agents());
        const auto* fam = std::get_if<TwoAgentFamily>(&law_);
        if (!fam) throw UnsupportedError("weighted_virtual_value: two-agent continuous cases only");
        return fam->weighted_virtual_value(v[params_.order[0]], v[params_.order[1]]);
    }

    /// Total mass followed by per-agent first moments, caller order.
    [[nodiscard]] std::pair<double, std::vector<double>> mass_and_moments() const {
        return std::visit(
            [&](const auto& law) -> std::pair<double, std::vector<double>> {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, TwoAgentFamily>) {
                    const auto m = law.moments();
                    return {m[0], to_caller({m[1], m[2]})};
                } else if constexpr (std::is_same_v<L, DiscreteLaw>) {
                    double mass = 0, a = 0, b = 0;
                    for (const auto& p : law.atoms) {
                        mass += p.mass;
                        a += p.mass * p.at[0];
                        b += p.mass * p.at[1];
                    }
                    return {mass, to_caller({a, b})};
                } else if constexpr (std::is_same_v<L, NAgentLaw>) {
                    const auto c = nagent_marginal_checks(params_);
                    return {c.mass, std::vector<double>(agents(), c.mean)};
                } else {
                    std::vector<double> means;
                    double mass = 1;
                    for (double g : law.gamma) {
                        // mean of the equal-revenue law: g(1 - ln g) by quadrature
                        const double tail = g < 1.0 ? integrate_1d([g](double x) { return g / x; }, g, 1.0, 1e-14) : 0.0;
                        const double body = g < 1.0 ? integrate_1d([g](double x) { return g / (x * x); }, g, 1.0, 1e-14) : 0.0;
                        means.push_back(tail + g);
                        mass *= body + g;
                    }
                    return {mass, means};
                }
            },
            law_);
    }

    [[nodiscard]] std::vector<double> moments() const { return mass_and_moments().second; }

    /// The highest profile carrying an atom and its mass.
    [[nodiscard]] std::vector<double> top_profile() const {
        if (const auto* fam = std::get_if<TwoAgentFamily>(&law_)) return to_caller({fam->top[0], fam->top[1]});
        return std::vector<double>(agents(), 1.0);
    }
    [[nodiscard]] double top_atom() const {
        return std::visit(
            [&](const auto& law) -> double {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, TwoAgentFamily>) return law.atom;
                else if constexpr (std::is_same_v<L, NAgentLaw>) return law.top_atom();
                else if constexpr (std::is_same_v<L, ExcludableLaw>) {
                    double m = 1;
                    for (double g : law.gamma) m *= g;
                    return m;
                } else {
                    return law.density(1.0, 1.0).value;
                }
            },
            law_);
    }

    /// One draw into out (caller order).
    void sample(Rng& rng, std::span<double> out) const {
        std::visit(
            [&](const auto& law) {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, TwoAgentFamily> || std::is_same_v<L, DiscreteLaw>) {
                    std::array<double, 2> x{};
                    if constexpr (std::is_same_v<L, TwoAgentFamily>) law.sample(rng, x, marginals_[1]);
                    else law.sample(rng, x);
                    out[params_.order[0]] = x[0];
                    out[params_.order[1]] = x[1];
                } else {
                    law.sample(rng, out);
                }
            },
            law_);
    }

    /// n draws, row-major.
    [[nodiscard]] std::vector<double> sample(SamplerState s, std::size_t n) const {
        if (n < 1) throw DomainError("sample: n must be at least 1");
        Rng rng(s);
        std::vector<double> out(n * agents());
        for (std::size_t k = 0; k < n; ++k) sample(rng, std::span<double>(out).subspan(k * agents(), agents()));
        return out;
    }

    [[nodiscard]] const TwoAgentFamily* family() const { return std::get_if<TwoAgentFamily>(&law_); }

private:
    using Law = std::variant<TwoAgentFamily, NAgentLaw, ExcludableLaw, DiscreteLaw>;

    int internal(std::size_t i) const {
        for (std::size_t k = 0; k < params_.order.size(); ++k) {
            if (params_.order[k] == i) return static_cast<int>(k);
        }
        return static_cast<int>(i);
    }

    std::vector<double> to_caller(std::array<double, 2> x) const {
        std::vector<double> out(2);
        out[params_.order[0]] = x[0];
        out[params_.order[1]] = x[1];
        return out;
    }

    void build() {
        std::visit(
            [&](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, SymLowConstants>) {
                    law_ = TwoAgentFamily{{1, 1}, c.r1, {0, 0}, {1, 1}, c.r1, c.r1 / 4};
                } else if constexpr (std::is_same_v<C, SymHighConstants>) {
                    const double k = (1 + c.r2) * (1 + c.r2);
                    law_ = TwoAgentFamily{{1, 1}, 1 + c.r2, {c.r2, c.r2}, {1, 1}, k, k / 4};
                } else if constexpr (std::is_same_v<C, AreaIConstants>) {
                    const double p = c.s1 * c.s2 / (c.s1 + c.s2);
                    law_ = TwoAgentFamily{{c.s2, c.s1}, c.s1 * c.s2, {0, 0}, {1, 1}, 2 * p, p / 2};
                } else if constexpr (std::is_same_v<C, AreaIIConstants>) {
                    const double k = (1 + c.t1) * (1 + c.t2);
                    law_ = TwoAgentFamily{{1 - c.t2, 1 - c.t1}, 1 - c.t1 * c.t2, {c.t1, c.t2}, {1, 1}, k, k / 4};
                } else if constexpr (std::is_same_v<C, AreaIIIConstants>) {
                    const double q = c.u1 * (c.u2 + 1) / (c.u1 + 1);
                    law_ = TwoAgentFamily{{1, c.u1 - c.u2}, c.u1, {0, 0}, {1, 1}, 2 * q, q / 2};
                } else if constexpr (std::is_same_v<C, AreaIVConstants>) {
                    law_ = TwoAgentFamily{{1, 0}, c.w1, {0, 0}, {1, c.w2}, 2 * c.w1, c.w1 / (c.w2 + 1)};
                } else if constexpr (std::is_same_v<C, NAgentConstants>) {
                    law_ = NAgentLaw(c.n, c.r);
                } else if constexpr (std::is_same_v<C, ExcludableConstants>) {
                    law_ = ExcludableLaw{c.gamma};
                } else {
                    law_ = deterministic_law(c);
                }
            },
            params_.constants);
        if (const auto* fam = std::get_if<TwoAgentFamily>(&law_)) marginals_ = {fam->marginal(0), fam->marginal(1)};
    }

    DiscreteLaw deterministic_law(const DeterministicConstants& c) const {
        const double m1 = params_.means[0], m2 = params_.means[1];
        DiscreteLaw law;
        if (c.dictator) {
            const double low = std::sqrt(1 - m1);
            law.atoms = {{{c.d1, m2}, low}, {{1.0, m2}, 1 - low}};
        } else {
            const double w1 = std::sqrt((1 - m1) / 2), w2 = std::sqrt((1 - m2) / 2);
            const double top = 1 - w1 - w2;
            if (top < 0) throw NoSolutionError("deterministic worst case: negative top mass");
            law.atoms = {{{c.d1, 1.0}, w1}, {{1.0, c.d2}, w2}, {{1.0, 1.0}, top}};
        }
        std::erase_if(law.atoms, [](const PointMass& p) { return p.mass <= 0; });
        return law;
    }

    SolvedParams params_;
    Law law_;
    std::array<PiecewiseMarginal, 2> marginals_;
};

/// Three- or two-atom worst case of the deterministic mechanisms.
inline WorstCaseDistribution deterministic_worst_case(const SolvedParams& p) {
    if (p.mode != Mode::Deterministic) throw DomainError("deterministic_worst_case: deterministic params required");
    return WorstCaseDistribution(p);
}

}  // namespace robustpg
