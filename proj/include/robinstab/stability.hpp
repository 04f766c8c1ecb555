#pragma once

// Explicit constants of the quantitative Freitas-Laugesen inequality:
// eta(n, alpha, R), gamma(n, alpha, R), the Neumann-limit constant delta(n),
// the key integral inequality behind them, and the two elementary scalar
// inequalities used in its proof.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "robinstab/ball_spectrum.hpp"
#include "robinstab/quadrature.hpp"

namespace robinstab {

struct StabilityConstants {
    double eta;
    double gamma;
    double R;
    int n;
    double alpha;
};

namespace detail {

// omega_n^{-2/n} * Int_{B_1} r^{2-n} J_{n/2}(k r)^2 dx reduced to the radial
// integral n omega_n Int_0^1 r J_{n/2}(k r)^2 dr.
inline double eta_from_wavenumber(int n, double k) {
    const double nu = 0.5 * n;
    const double om = unit_ball_volume(n);
    const double radial = integrate(
        [nu, k](double r) {
            const double j = bessel_j(nu, k * r);
            return r * j * j;
        },
        0.0, 1.0, 1e-10, 1e-14);
    return std::pow(om, -2.0 / n) * n * om * radial;
}

} // namespace detail

/// eta(n, alpha, R) for -1/R < alpha < 0 (the alpha -> 0 limit is also
/// accepted at alpha = 0, where the Neumann wavenumber is used).
inline double eta_constant(int n, double alpha, double R) {
    if (n < 2) throw std::invalid_argument("eta_constant: n >= 2 required");
    const double a = R * alpha;
    if (!(a > -1.0 && a <= 0.0))
        throw std::out_of_range("eta_constant: need -1/R < alpha <= 0");
    const double k = lambda2_unit_ball(n, a).k;
    return detail::eta_from_wavenumber(n, k);
}

/// gamma(n, alpha, R) = eta^{-1} |Omega|^{-2/n} omega_n
///                      J_{n/2}(sqrt(lambda_2(B_1; R alpha)))^2 7(n-1)/(256 n)
/// with |Omega| = omega_n R^n.
inline StabilityConstants gamma_constant(int n, double alpha, double R) {
    if (n < 2) throw std::invalid_argument("gamma_constant: n >= 2 required");
    const double a = R * alpha;
    if (!(a > -1.0 && a < 0.0))
        throw std::out_of_range("gamma_constant: need -1/R < alpha < 0");
    const double k = lambda2_unit_ball(n, a).k;
    const double eta = detail::eta_from_wavenumber(n, k);
    const double om = unit_ball_volume(n);
    const double vol = om * std::pow(R, n);
    const double jk = bessel_j(0.5 * n, k);
    const double gamma = (1.0 / eta) * std::pow(vol, -2.0 / n) * om * jk * jk *
                         7.0 * (n - 1) / (256.0 * n);
    return {eta, gamma, R, n, alpha};
}

/// delta(n): the alpha -> 0^- limit constant of the quantitative
/// Szego-Weinberger inequality, built from the first zero of the derivative
/// of t^{1-n/2} J_{n/2}(t).
inline double delta_constant(int n) {
    if (n < 2) throw std::invalid_argument("delta_constant: n >= 2 required");
    const double xi = lambda2_unit_ball(n, 0.0).k;
    const double nu = 0.5 * n;
    const double om = unit_ball_volume(n);
    const double integral =
        n * om *
        integrate(
            [nu, xi](double r) {
                const double j = bessel_j(nu, xi * r);
                return r * j * j;
            },
            0.0, 1.0, 1e-10, 1e-14);
    const double jxi = bessel_j(nu, xi);
    return 7.0 * (n - 1) / (256.0 * n) * std::pow(om, (n + 2.0) / n) * jxi * jxi /
           integral;
}

/// Both sides of the key integral inequality
///   Int_R^{R_2} (h(R) - h(r)) r^{n-1} dr >= 7(n-1) R^{n-2} g(R)^2 beta^2 / (256 n^2)
/// with R_2 = R (1 + beta/2)^{1/n}.
struct KeypointGap {
    double lhs;
    double rhs;
};

inline KeypointGap keypoint_gap(int n, double alpha, double R, double beta) {
    if (!(beta >= 0.0 && beta <= 2.0))
        throw std::out_of_range("keypoint_gap: beta must lie in [0, 2]");
    const RadialProfile prof(BallSpec(n, R), alpha);
    const double R2 = R * std::pow(1.0 + 0.5 * beta, 1.0 / n);
    const double hR = prof.h(R);
    const double lhs = integrate(
        [&prof, hR, n](double r) { return (hR - prof.h(r)) * std::pow(r, n - 1); },
        R, R2, 1e-10, 1e-14);
    const double gR = prof.g(R);
    const double rhs =
        7.0 * (n - 1) * std::pow(R, n - 2) * gR * gR * beta * beta / (256.0 * n * n);
    return {lhs, rhs};
}

/// Margins of the two elementary inequalities used in the key lemma:
///   m1 = 1 + (n-2)/n x - (n-2)/(4n^2) x^2 - (1+x)^{(n-2)/n}   (n >= 3)
///   m2 = x - x^2/8 - log(1+x)
/// both nonnegative on [0, 1]; m1 is not applicable for n = 2.
struct ElementaryMargins {
    std::optional<double> m1;
    double m2;
};

inline ElementaryMargins elementary_inequality_margin(int n, double x) {
    if (n < 2) throw std::invalid_argument("elementary_inequality_margin: n >= 2");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::out_of_range("elementary_inequality_margin: x must lie in [0, 1]");
    ElementaryMargins out;
    if (n >= 3) {
        const double p = (n - 2.0) / n;
        out.m1 = 1.0 + p * x - (n - 2.0) / (4.0 * n * n) * x * x - std::pow(1.0 + x, p);
    }
    out.m2 = x - x * x / 8.0 - std::log1p(x);
    return out;
}

} // namespace robinstab
