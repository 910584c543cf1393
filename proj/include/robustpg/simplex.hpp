#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "robustpg/errors.hpp"

namespace robustpg {

/// Standard-form LP: minimize cost.x subject to A x = rhs, x >= 0.
///
/// Columns are stored contiguously, `rows` entries each.
struct StandardLp {
    std::size_t rows = 0;
    std::vector<double> columns;  // column-major, columns.size() == rows * cost.size()
    std::vector<double> cost;
    std::vector<double> rhs;

    [[nodiscard]] std::size_t cols() const { return cost.size(); }
    [[nodiscard]] std::span<const double> column(std::size_t j) const {
        return std::span<const double>(columns).subspan(j * rows, rows);
    }
};

struct LpSolution {
    double value = 0.0;
    std::vector<std::size_t> basis;   // structural columns only
    std::vector<double> weights;      // matching basis
    std::vector<double> duals;        // one per row
    std::size_t iterations = 0;
};

namespace detail {

/// Dense inverse by Gauss-Jordan with partial pivoting.
inline bool invert(std::vector<double>& a, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        }
        if (std::abs(a[piv * n + c]) < 1e-300) return false;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a[c * n + k], a[piv * n + k]);
                std::swap(inv[c * n + k], inv[piv * n + k]);
            }
        }
        const double d = a[c * n + c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c * n + k] /= d;
            inv[c * n + k] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r * n + c];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) {
                a[r * n + k] -= f * a[c * n + k];
                inv[r * n + k] -= f * inv[c * n + k];
            }
        }
    }
    a = std::move(inv);
    return true;
}

/// Revised simplex over structural columns plus one artificial per row.
class RevisedSimplex {
public:
    explicit RevisedSimplex(const StandardLp& lp) : lp_(lp), m_(lp.rows), n_(lp.cols()) {
        if (lp.columns.size() != m_ * n_ || lp.rhs.size() != m_) throw DomainError("simplex: inconsistent LP shape");
        for (double b : lp.rhs) {
            if (b < 0) throw DomainError("simplex: right-hand side must be nonnegative");
        }
        basis_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) basis_[r] = n_ + r;
        binv_.assign(m_ * m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0;
        xb_ = lp.rhs;
    }

    LpSolution run() {
        phase_ = 1;
        iterate();
        if (objective() > 1e-9) throw NoSolutionError("simplex: constraints are infeasible on this grid");
        drive_out_artificials();
        phase_ = 2;
        iterate();
        refactor();
        LpSolution s;
        s.iterations = iterations_;
        s.duals = duals();
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_ && xb_[r] > 0) {
                s.basis.push_back(basis_[r]);
                s.weights.push_back(xb_[r]);
            }
        }
        s.value = 0;
        for (std::size_t k = 0; k < s.basis.size(); ++k) s.value += lp_.cost[s.basis[k]] * s.weights[k];
        return s;
    }

private:
    static constexpr double kPivotTol = 1e-11;
    static constexpr double kReducedTol = 1e-12;

    double cost_of(std::size_t j) const {
        if (phase_ == 1) return j >= n_ ? 1.0 : 0.0;
        return j >= n_ ? 0.0 : lp_.cost[j];
    }

    double entry(std::size_t j, std::size_t r) const {
        if (j >= n_) return j - n_ == r ? 1.0 : 0.0;
        return lp_.columns[j * m_ + r];
    }

    double objective() const {
        double z = 0;
        for (std::size_t r = 0; r < m_; ++r) z += cost_of(basis_[r]) * xb_[r];
        return z;
    }

    std::vector<double> duals() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            const double c = cost_of(basis_[r]);
            if (c == 0.0) continue;
            for (std::size_t k = 0; k < m_; ++k) y[k] += c * binv_[r * m_ + k];
        }
        return y;
    }

    double reduced_cost(std::size_t j, std::span<const double> y) const {
        double d = cost_of(j);
        for (std::size_t r = 0; r < m_; ++r) d -= y[r] * entry(j, r);
        return d;
    }

    std::vector<double> ftran(std::size_t j) const {
        std::vector<double> w(m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t k = 0; k < m_; ++k) w[r] += binv_[r * m_ + k] * entry(j, k);
        }
        return w;
    }

    void pivot(std::size_t row, std::size_t j, std::span<const double> w) {
        const double p = w[row];
        for (std::size_t k = 0; k < m_; ++k) binv_[row * m_ + k] /= p;
        xb_[row] /= p;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == row || w[r] == 0.0) continue;
            for (std::size_t k = 0; k < m_; ++k) binv_[r * m_ + k] -= w[r] * binv_[row * m_ + k];
            xb_[r] -= w[r] * xb_[row];
        }
        basis_[row] = j;
        if (++since_refactor_ >= 32) refactor();
    }

    void refactor() {
        std::vector<double> b(m_ * m_);
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t c = 0; c < m_; ++c) b[r * m_ + c] = entry(basis_[c], r);
        }
        if (!invert(b, m_)) throw ConvergenceError("simplex: singular basis");
        binv_ = std::move(b);
        for (std::size_t r = 0; r < m_; ++r) {
            double s = 0;
            for (std::size_t k = 0; k < m_; ++k) s += binv_[r * m_ + k] * lp_.rhs[k];
            xb_[r] = std::max(0.0, s);
        }
        since_refactor_ = 0;
    }

    bool allowed(std::size_t j) const {
        if (j >= n_) return false;
        return std::find(basis_.begin(), basis_.end(), j) == basis_.end();
    }

    void iterate() {
        std::size_t stalled = 0;
        double last = objective();
        const std::size_t budget = 50 * (n_ + m_) + 1000;
        for (std::size_t it = 0; it < budget; ++it) {
            const auto y = duals();
            const bool bland = stalled > 2 * m_ + 10;
            std::size_t enter = n_ + m_;
            double best = -kReducedTol;
            for (std::size_t j = 0; j < n_; ++j) {
                const double d = reduced_cost(j, y);
                if (d < best && allowed(j)) {
                    enter = j;
                    best = d;
                    if (bland) break;
                }
            }
            if (enter == n_ + m_) return;
            const auto w = ftran(enter);
            std::size_t leave = m_;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                if (w[r] <= kPivotTol) continue;
                const double t = xb_[r] / w[r];
                if (t < ratio - 1e-15 || (bland && std::abs(t - ratio) <= 1e-15 && basis_[r] < basis_[leave])) {
                    ratio = t;
                    leave = r;
                }
            }
            if (leave == m_) throw NoSolutionError("simplex: objective unbounded");
            pivot(leave, enter, w);
            ++iterations_;
            const double now = objective();
            stalled = now < last - 1e-14 ? 0 : stalled + 1;
            last = std::min(last, now);
        }
        throw ConvergenceError("simplex: iteration budget exhausted");
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!allowed(j)) continue;
                const auto w = ftran(j);
                if (std::abs(w[r]) > 1e-9) {
                    pivot(r, j, w);
                    break;
                }
            }
        }
        refactor();
    }

    const StandardLp& lp_;
    std::size_t m_, n_;
    int phase_ = 1;
    std::vector<std::size_t> basis_;
    std::vector<double> binv_;
    std::vector<double> xb_;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
};

}  // namespace detail

/// Exact optimum of a small-row standard-form LP by the two-phase revised simplex.
inline LpSolution solve_lp(const StandardLp& lp) { return detail::RevisedSimplex(lp).run(); }

}  // namespace robustpg
