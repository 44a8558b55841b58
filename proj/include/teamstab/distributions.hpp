#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "teamstab/errors.hpp"

namespace teamstab {

namespace detail {

/// Continued fraction for the incomplete beta function, evaluated with the
/// modified Lentz algorithm. Converges fast for x < (a+1)/(a+b+2).
inline double incomplete_beta_cf(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEpsilon = 1e-15;
    const double kTiny = std::numeric_limits<double>::min() / kEpsilon;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("incomplete beta requires positive shape parameters");
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("incomplete beta requires x in [0,1], got " + std::to_string(x));
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::incomplete_beta_cf(a, b, x) / a;
    return 1.0 - front * detail::incomplete_beta_cf(b, a, 1.0 - x) / b;
}

/// Upper tail of the Student-t distribution, P(T > t).
inline double t_distribution_sf(double t, int df) {
    if (df < 1) throw DomainError("t distribution needs df >= 1");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

/// Two-sided p-value for a t statistic.
inline double t_two_sided_p(double t, int df) {
    return 2.0 * t_distribution_sf(std::fabs(t), df);
}

/// Upper tail of the F distribution, P(F > f), for f >= 0.
inline double f_distribution_sf(double f, int df1, int df2) {
    if (df1 < 1 || df2 < 1) throw DomainError("F distribution needs df >= 1");
    if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
    if (f < 0.0) throw DomainError("F statistic must be non-negative");
    if (std::isinf(f)) return 0.0;
    return regularized_incomplete_beta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
}

}  // namespace teamstab
