#pragma once

// Bessel functions of the first kind and modified Bessel functions at real
// order nu >= 0, their derivatives, and a deterministic bracketed root
// finder.  Everything downstream (ball spectra, stability constants) sits on
// top of these four calls.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "robinstab/errors.hpp"

namespace robinstab {

namespace detail {

inline void check_order_arg(double nu, double x, const char* who) {
    if (!std::isfinite(nu) || !std::isfinite(x))
        throw std::invalid_argument(std::string(who) + ": non-finite input");
    if (nu < 0.0)
        throw std::invalid_argument(std::string(who) + ": order must be >= 0");
    if (x < 0.0)
        throw std::invalid_argument(std::string(who) + ": argument must be >= 0");
}

// Ascending power series, summed in extended precision.  The terms alternate
// for J, so this is only used below the cancellation threshold.
inline double bessel_j_series(double nu, double x) {
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const long double half = 0.5L * static_cast<long double>(x);
    const long double q = half * half;
    long double term = std::exp(static_cast<long double>(nu) * std::log(half)
                                 - std::lgamma(static_cast<long double>(nu) + 1.0L));
    long double sum = term;
    for (int m = 0; m < 400; ++m) {
        term *= -q / ((m + 1.0L) * (static_cast<long double>(nu) + m + 1.0L));
        sum += term;
        if (std::fabs(term) < 1e-22L * (std::fabs(sum) + 1e-30L) && m > x)
            break;
    }
    return static_cast<double>(sum);
}

// Hankel's large-argument expansion.  For half-integer orders the symbol
// (nu,m) vanishes eventually and the expansion is exact; otherwise the series
// is truncated at its smallest term.
inline double bessel_j_asymptotic(double nu, double x) {
    const long double mu = 4.0L * static_cast<long double>(nu) * nu;
    const long double xl = x;
    long double a = 1.0L;   // (nu,m) / (8x)^m, built incrementally
    long double p = 1.0L, q = 0.0L;
    long double prev = std::numeric_limits<long double>::max();
    for (int m = 1; m <= 40; ++m) {
        a *= (mu - (2.0L * m - 1.0L) * (2.0L * m - 1.0L)) / (8.0L * m * xl);
        const long double mag = std::fabs(a);
        if (mag > prev) break;   // past the smallest term: stop
        prev = mag;
        if (m % 2 == 1)
            q += ((m % 4 == 1) ? a : -a);
        else
            p += ((m % 4 == 2) ? -a : a);
        if (mag < 1e-22L) break;
    }
    const long double chi = xl - (0.5L * static_cast<long double>(nu) + 0.25L)
                                     * 3.14159265358979323846264338327950288L;
    const long double amp = std::sqrt(2.0L / (3.14159265358979323846264338327950288L * xl));
    return static_cast<double>(amp * (p * std::cos(chi) - q * std::sin(chi)));
}

} // namespace detail

/// J_nu(x) for nu >= 0, x >= 0.  Series below x = max(14, 2 nu), Hankel
/// asymptotics beyond; absolute error <= 1e-12 on x in [0, 50] for the
/// orders used here (nu <= 8).
inline double bessel_j(double nu, double x) {
    detail::check_order_arg(nu, x, "bessel_j");
    if (x <= std::fmax(14.0, 2.0 * nu))
        return detail::bessel_j_series(nu, x);
    return detail::bessel_j_asymptotic(nu, x);
}

/// d/dx J_nu(x) via J'_nu = (J_{nu-1} - J_{nu+1})/2; J'_0 = -J_1.
inline double bessel_j_prime(double nu, double x) {
    detail::check_order_arg(nu, x, "bessel_j_prime");
    if (nu == 0.0) return -bessel_j(1.0, x);
    return 0.5 * (bessel_j(nu - 1.0, x) - bessel_j(nu + 1.0, x));
}

/// Modified Bessel I_nu(x).  The series has positive terms (no cancellation)
/// and is summed in extended precision, so accuracy is near machine-relative
/// over the whole supported range.
inline double bessel_i(double nu, double x) {
    detail::check_order_arg(nu, x, "bessel_i");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const long double half = 0.5L * static_cast<long double>(x);
    const long double q = half * half;
    long double term = std::exp(static_cast<long double>(nu) * std::log(half)
                                 - std::lgamma(static_cast<long double>(nu) + 1.0L));
    long double sum = term;
    for (int m = 0; m < 600; ++m) {
        term *= q / ((m + 1.0L) * (static_cast<long double>(nu) + m + 1.0L));
        sum += term;
        if (term < 1e-22L * sum && m > x) break;
    }
    return static_cast<double>(sum);
}

/// d/dx I_nu(x) via I'_nu = (I_{nu-1} + I_{nu+1})/2; I'_0 = I_1.
inline double bessel_i_prime(double nu, double x) {
    detail::check_order_arg(nu, x, "bessel_i_prime");
    if (nu == 0.0) return bessel_i(1.0, x);
    return 0.5 * (bessel_i(nu - 1.0, x) + bessel_i(nu + 1.0, x));
}

/// Deterministic bisection on a bracketing interval.  Requires
/// f(lo) * f(hi) <= 0; returns the bracket midpoint once its width is <= tol.
inline double find_bracketed_root(const std::function<double(double)>& f,
                                  double lo, double hi, double tol) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(tol > 0.0))
        throw std::invalid_argument("find_bracketed_root: bad interval or tolerance");
    if (lo > hi) std::swap(lo, hi);
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw BracketError("find_bracketed_root: no sign change in bracket");
    for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace robinstab
