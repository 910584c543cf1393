#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "robustpg/errors.hpp"
#include "robustpg/mechanisms.hpp"
#include "robustpg/numerics.hpp"
#include "robustpg/params.hpp"

namespace robustpg {

/// Which component of a mixed distribution a point falls on.
enum class MassKind { Zero, Interior, Edge, Atom };

inline std::string_view to_string(MassKind k) {
    switch (k) {
        case MassKind::Zero: return "zero";
        case MassKind::Interior: return "interior";
        case MassKind::Edge: return "edge";
        case MassKind::Atom: return "atom";
    }
    return "?";
}

/// A density or point-mass value together with its kind.
struct Tagged {
    MassKind kind = MassKind::Zero;
    double value = 0.0;
};

/// Seed and stream of a reproducible random source.
struct SamplerState {
    std::uint64_t seed = 20240601;
    std::uint64_t stream = 0;
};

/// 64-bit Mersenne Twister seeded from (seed, stream).
class Rng {
public:
    explicit Rng(SamplerState s) {
        std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                          static_cast<std::uint32_t>(s.stream), static_cast<std::uint32_t>(s.stream >> 32)};
        engine_.seed(seq);
    }
    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0,1].
    double open_unit() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
    double exponential() { return -std::log(open_unit()); }

private:
    std::mt19937_64 engine_;
};

/// Profile class of an N-agent value vector: agents whose value differs from 1.
struct NAgentProfileClass {
    std::vector<std::size_t> below_top;
    [[nodiscard]] std::size_t size() const { return below_top.size(); }
};

inline NAgentProfileClass profile_class(std::span<const double> v) {
    NAgentProfileClass c;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 1.0) c.below_top.push_back(i);
    }
    return c;
}

/// Symmetric N-agent worst-case law on {sum(v) >= N - 1 + r}.
class NAgentLaw {
public:
    NAgentLaw(int n, double r) : n_(n), r_(r) {
        if (n < 2) throw DomainError("NAgentLaw: N must be at least 2");
        if (!(r >= 0.0 && r <= 1.0)) throw DomainError("NAgentLaw: r outside [0,1]");
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] double r() const { return r_; }
    [[nodiscard]] double cut() const { return n_ - 1 + r_; }
    [[nodiscard]] double top_atom() const { return std::pow(cut() / n_, n_); }
    [[nodiscard]] double top_probability() const { return cut() / n_; }

    [[nodiscard]] bool in_support(std::span<const double> v) const {
        double s = 0;
        for (double x : v) s += x;
        return s >= cut() - 1e-12;
    }

    [[nodiscard]] Tagged density(std::span<const double> v) const {
        double s = 0;
        for (double x : v) s += x;
        if (s < cut()) return {};
        const std::size_t a = profile_class(v).size();
        if (a == 0) return {MassKind::Atom, top_atom()};
        const double value =
            std::tgamma(double(a) + 1) * std::pow(cut(), n_) / (std::pow(double(n_), n_ - 1) * std::pow(s, double(a) + 1));
        return {a == std::size_t(n_) ? MassKind::Interior : MassKind::Edge, value};
    }

    /// Marginal of any single agent.
    [[nodiscard]] Tagged marginal(double x) const {
        if (x >= 1.0) return {MassKind::Atom, top_probability()};
        if (x < r_) return {};
        double f = 0;
        const double c = cut();
        for (int j = 0; j <= n_ - 2; ++j) {
            f += binomial(n_ - 2, j) * (n_ - 1 - j) * std::pow(c, j) * std::pow(x - r_, n_ - 2 - j);
        }
        return {MassKind::Interior, f / std::pow(double(n_), n_ - 1)};
    }

    /// Exact draw: the top indicators are independent; on a face with a free
    /// coordinates the gap sum has a closed-form law and is spread uniformly.
    void sample(Rng& rng, std::span<double> out) const {
        const double p = top_probability();
        std::vector<std::size_t> free;
        for (int i = 0; i < n_; ++i) {
            if (rng.uniform() < p) {
                out[i] = 1.0;
            } else {
                out[i] = 0.0;
                free.push_back(std::size_t(i));
            }
        }
        if (free.empty()) return;
        const double zmax = (1 - r_) / cut();
        const double z = zmax * std::pow(rng.open_unit(), 1.0 / double(free.size()));
        const double gap = n_ * z / (1 + z);
        std::vector<double> w(free.size());
        double total = 0;
        for (double& e : w) total += (e = rng.exponential());
        for (std::size_t k = 0; k < free.size(); ++k) out[free[k]] = std::max(0.0, 1 - gap * w[k] / total);
    }

private:
    static double binomial(int n, int k) {
        double b = 1;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    }

    int n_;
    double r_;
};

/// Provision of the N-agent maxmin mechanism.
inline double nagent_provision(const SolvedParams& p, std::span<const double> v) {
    const auto& c = p.get<NAgentConstants>();
    check_profile(v, std::size_t(c.n));
    return detail::NAgentRule{c.n, c.r}.q(v);
}

/// Graded density of the N-agent worst-case law.
inline Tagged nagent_density(const SolvedParams& p, std::span<const double> v) {
    const auto& c = p.get<NAgentConstants>();
    check_profile(v, std::size_t(c.n));
    return NAgentLaw(c.n, c.r).density(v);
}

struct MarginalCheck {
    double mass;
    double mean;
};

/// Total mass and first moment of the single-agent marginal, by quadrature.
inline MarginalCheck nagent_marginal_checks(const SolvedParams& p) {
    const auto& c = p.get<NAgentConstants>();
    const NAgentLaw law(c.n, c.r);
    const double atom = law.top_probability();
    if (c.r >= 1.0) return {atom, atom};
    const double mass = integrate_1d([&](double x) { return law.marginal(x).value; }, c.r, 1.0, 1e-13);
    const double mean = integrate_1d([&](double x) { return x * law.marginal(x).value; }, c.r, 1.0, 1e-13);
    return {mass + atom, mean + atom};
}

}  // namespace robustpg
