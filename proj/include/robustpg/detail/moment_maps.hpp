#pragma once

// Mean maps of the asymmetric worst-case families.  Each family has a
// removable singularity on its diagonal; near it the maps are evaluated
// through the cubic log remainder below, elsewhere through the direct
// formulas.

#include <cmath>

namespace robustpg::detail {

inline constexpr double kNearDiagonal = 0.1;

/// (ln(ratio) - u + u^2/2) / u^3 with u = ratio - 1.
inline double cubic_log_remainder(double ratio) {
    const double u = ratio - 1.0;
    if (std::abs(u) < kNearDiagonal) {
        double sum = 0.0;
        double term = 1.0;
        for (int k = 0; k < 22; ++k) {
            sum += term / (k + 3);
            term *= -u;
        }
        return sum;
    }
    return (std::log(ratio) - u + 0.5 * u * u) / (u * u * u);
}

/// Mean of the own coordinate in the low-mean family with intercepts
/// (own, other); the other coordinate's mean is the same map with arguments swapped.
inline double low_family_mean(double own, double other) {
    const double scale = own * other / (own + other);
    const double ratio = own / other;
    const double u = ratio - 1.0;
    if (std::abs(u) < kNearDiagonal) {
        return scale *
               (1.5 + u * (1 + u) * (1 + u) * cubic_log_remainder(ratio) - 0.5 * u * u - std::log(own));
    }
    const double gap = own - other;
    return scale * (own * own / (gap * gap) * std::log(ratio) - std::log(own) + other / (other - own));
}

/// Mean of the own coordinate in the high-mean family with lower ends (own, other).
inline double high_family_mean(double own, double other) {
    const double a = 1.0 + own;
    const double b = 1.0 + other;
    const double ratio = b / a;
    const double u = ratio - 1.0;
    const double slack = 1.0 - own;
    if (std::abs(u) < kNearDiagonal) {
        return 1.0 + b * slack * slack / (2 * a) * (u * cubic_log_remainder(ratio) - 0.5);
    }
    const double gap = own - other;
    return a * b * slack * slack / (2 * gap * gap) * std::log(ratio) +
           (1 - own * other) * slack / (2 * gap) + 0.5 * a;
}

/// Scale u1(u2+1)/(u1+1) shared by the mixed family.
inline double mixed_family_scale(double u1, double u2) { return u1 * (u2 + 1) / (u1 + 1); }

/// Mean of agent 1 in the mixed family (u1, u2).
inline double mixed_family_mean_first(double u1, double u2) {
    const double q = mixed_family_scale(u1, u2);
    const double top = 1 + u2;
    const double k = top - u1;
    const double ratio = u1 / top;
    const double y = ratio - 1.0;
    if (std::abs(y) < kNearDiagonal) {
        const double km1 = k - 1;
        return q * (1 - std::log(u1) - km1 / top +
                    km1 * km1 * (y * cubic_log_remainder(ratio) - 0.5) / (top * top));
    }
    const double diff = u2 - u1;
    return q * (diff * diff / (k * k) * std::log(ratio) - std::log(u1) + 1 - diff / (top * k));
}

/// Mean of agent 2 in the mixed family (u1, u2).
inline double mixed_family_mean_second(double u1, double u2) {
    const double q = mixed_family_scale(u1, u2);
    const double top = 1 + u2;
    const double k = top - u1;
    const double ratio = u1 / top;
    const double y = ratio - 1.0;
    if (std::abs(y) < kNearDiagonal) {
        return q * (1 / top + (0.5 - y * cubic_log_remainder(ratio)) / (top * top));
    }
    return q * (-std::log(ratio) / (k * k) + 1 / top - 1 / (top * k));
}

/// Diagonal value of low_family_mean: (-2s ln s + 3s)/4.
inline double low_diagonal_mean(double s) { return s * (3 - 2 * std::log(s)) / 4; }

/// Diagonal value of high_family_mean: (-t^2 + 2t + 3)/4.
inline double high_diagonal_mean(double t) { return (3 + 2 * t - t * t) / 4; }

}  // namespace robustpg::detail
