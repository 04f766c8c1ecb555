#pragma once

// Analytic Robin eigenvalues of balls in R^n and the radial functions g, h
// behind the stability constants.  Conventions:
//
//   * lambda_2 of the unit ball with parameter a in (-1, 0] is k^2 where k is
//     the smallest positive root of (1 - n/2) J_{n/2}(k) + k J'_{n/2}(k)
//     + a J_{n/2}(k) = 0, i.e. the Robin condition g'(1) = -a g(1) applied to
//     g(r) = r^{1-n/2} J_{n/2}(k r).  At a = -1 the eigenvalue is 0 exactly
//     with g(r) = r.
//   * lambda_1 with a < 0 is -kappa^2 where kappa solves
//     kappa I_{n/2}(kappa) = |a| I_{n/2-1}(kappa); the eigenfunction
//     r^{1-n/2} I_{n/2-1}(kappa r) is radial and strictly increasing.  The
//     literature states existence of this radial increasing mode but not the
//     transcendental equation itself; the equation here is derived from the
//     Robin condition and is covered by its own oracle tests.
//   * Rescaling to radius R uses lambda_k(B_R; alpha) = lambda_k(B_1; R
//     alpha) / R^2.

#include <cmath>
#include <stdexcept>

#include "robinstab/special.hpp"

namespace robinstab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball_volume: n >= 1 required");
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

struct BallSpec {
    int n;      // dimension >= 2
    double R;   // radius > 0

    BallSpec(int dim, double radius) : n(dim), R(radius) {
        if (n < 2) throw std::invalid_argument("BallSpec: dimension must be >= 2");
        if (!(R > 0.0) || !std::isfinite(R))
            throw std::invalid_argument("BallSpec: radius must be positive");
    }

    double volume() const { return unit_ball_volume(n) * std::pow(R, n); }
};

struct RobinParameter {
    double alpha = 0.0;
};

/// One ball eigenmode: wavenumber k (or kappa on the negative branch),
/// eigenvalue, and the Bessel order nu = n/2 of the radial factor.
struct RadialEigenSolution {
    double k;
    double lambda;
    double nu;
};

namespace detail {

// Robin boundary residual of g(r) = r^{1-n/2} J_{n/2}(k r) at r = 1.
inline double robin_residual_j(int n, double a, double k) {
    const double nu = 0.5 * n;
    return (1.0 - nu) * bessel_j(nu, k) + k * bessel_j_prime(nu, k) +
           a * bessel_j(nu, k);
}

// First positive zero xi_{n/2,1} of d/dt [ t^{1-n/2} J_{n/2}(t) ], which is
// the alpha = 0 wavenumber (Neumann mu_2 of the unit ball is xi^2).
inline double neumann_wavenumber(int n) {
    const auto f = [n](double t) { return robin_residual_j(n, 0.0, t); };
    // march until the sign flips; xi is below the first zero of J_{n/2}
    double lo = 0.05, hi = 0.0;
    double flo = f(lo);
    for (double t = 0.15; t < 40.0; t += 0.1) {
        const double ft = f(t);
        if ((ft > 0.0) != (flo > 0.0)) {
            hi = t;
            break;
        }
        lo = t;
        flo = ft;
    }
    if (hi == 0.0) throw BracketError("neumann_wavenumber: no bracket found");
    return find_bracketed_root(f, lo, hi, 1e-12);
}

} // namespace detail

/// Second Robin eigenvalue of the unit ball for boundary parameter a in
/// [-1, 0].  Returns the wavenumber/eigenvalue pair; a = -1 gives the exact
/// zero mode g(r) = r (reported as k = 0).
inline RadialEigenSolution lambda2_unit_ball(int n, double a) {
    if (n < 2) throw std::invalid_argument("lambda2_unit_ball: n >= 2 required");
    if (!std::isfinite(a)) throw std::invalid_argument("lambda2_unit_ball: bad alpha");
    if (a == -1.0) return {0.0, 0.0, 0.5 * n};
    if (a < -1.0 || a > 0.0)
        throw std::out_of_range("lambda2_unit_ball: alpha must lie in [-1, 0]");
    const double xi = detail::neumann_wavenumber(n);
    if (a == 0.0) return {xi, xi * xi, 0.5 * n};
    const auto f = [n, a](double k) { return detail::robin_residual_j(n, a, k); };
    // f > 0 as k -> 0+ (sign (1+a)) and f(xi) = a J_{n/2}(xi) < 0
    const double k = find_bracketed_root(f, 1e-9, xi, 1e-12);
    return {k, k * k, 0.5 * n};
}

/// lambda_2(B_R; alpha) by the scaling relation; accepts alpha in [-1/R, 0]
/// (the endpoint -1/R maps to the exact zero mode).
inline double lambda2_ball(const BallSpec& b, double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("lambda2_ball: bad alpha");
    const double a = b.R * alpha;
    if (a < -1.0 || a > 0.0)
        throw std::out_of_range("lambda2_ball: alpha must lie in [-1/R, 0]");
    return lambda2_unit_ball(b.n, a).lambda / (b.R * b.R);
}

/// First Robin eigenvalue of B_R for alpha <= 0: zero at alpha = 0, otherwise
/// the unique negative eigenvalue of the radial increasing mode.
inline double lambda1_ball(const BallSpec& b, double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("lambda1_ball: bad alpha");
    if (alpha > 0.0)
        throw std::out_of_range("lambda1_ball: alpha > 0 not supported");
    if (alpha == 0.0) return 0.0;
    const double mag = -b.R * alpha;  // unit-ball parameter magnitude
    const double nu = 0.5 * b.n;
    const auto f = [nu, mag](double kp) {
        return kp * bessel_i(nu, kp) - mag * bessel_i(nu - 1.0, kp);
    };
    double hi = std::fmax(1.0, 2.0 * mag);
    int guard = 0;
    while (f(hi) <= 0.0) {
        hi *= 2.0;
        if (++guard > 16) throw BracketError("lambda1_ball: failed to bracket kappa");
    }
    const double kappa = find_bracketed_root(f, 1e-9, hi, 1e-12);
    return -(kappa * kappa) / (b.R * b.R);
}

/// Radial profile of the second eigenfunction of B_R, with its exponential
/// extension outside the ball.  Precomputes the wavenumber once so that g and
/// h can be evaluated cheaply inside quadrature loops.
class RadialProfile {
public:
    RadialProfile(const BallSpec& b, double alpha) : ball_(b), alpha_(alpha) {
        const double a = b.R * alpha;
        if (!(a > -1.0 && a < 0.0))
            throw std::out_of_range("RadialProfile: need -1/R < alpha < 0");
        mode_ = lambda2_unit_ball(b.n, a);
    }

    const BallSpec& ball() const { return ball_; }
    double alpha() const { return alpha_; }
    const RadialEigenSolution& mode() const { return mode_; }

    /// lambda_2(B_R; alpha)
    double lambda2() const { return mode_.lambda / (ball_.R * ball_.R); }

    /// g(r) = r^{1-n/2} J_{n/2}(k r / R) inside, g(R) e^{-alpha (r-R)} outside.
    double g(double r) const {
        if (r < 0.0) throw std::domain_error("RadialProfile::g: r >= 0 required");
        if (r == 0.0) return 0.0;
        const double R = ball_.R;
        if (r <= R) {
            const double nu = mode_.nu;
            return std::pow(r, 1.0 - nu) * bessel_j(nu, mode_.k * r / R);
        }
        return g(R) * std::exp(-alpha_ * (r - R));
    }

    double g_prime(double r) const {
        if (r <= 0.0) throw std::domain_error("RadialProfile::g_prime: r > 0 required");
        const double R = ball_.R;
        if (r <= R) {
            const double nu = mode_.nu;
            const double s = mode_.k * r / R;
            return (1.0 - nu) * std::pow(r, -nu) * bessel_j(nu, s) +
                   std::pow(r, 1.0 - nu) * (mode_.k / R) * bessel_j_prime(nu, s);
        }
        return -alpha_ * g(r);
    }

    /// h(r) = g'^2 + (n-1) r^{-2} g^2 + 2 alpha g g' + alpha (n-1) g^2 / r.
    /// Outside the ball the simplified closed form of the extension is used.
    double h(double r) const {
        if (!(r > 0.0)) throw std::domain_error("RadialProfile::h: r > 0 required");
        const int n = ball_.n;
        const double R = ball_.R;
        if (r >= R) {
            const double gR = g(R);
            return gR * gR *
                   (-alpha_ * alpha_ + (n - 1) * (1.0 + alpha_ * r) / (r * r)) *
                   std::exp(-2.0 * alpha_ * (r - R));
        }
        const double gv = g(r);
        const double gp = g_prime(r);
        return gp * gp + (n - 1) * gv * gv / (r * r) + 2.0 * alpha_ * gv * gp +
               alpha_ * (n - 1) * gv * gv / r;
    }

    /// h via the definition only (both branches evaluated from g, g'); used
    /// by tests to check the closed form.
    double h_definitional(double r) const {
        if (!(r > 0.0)) throw std::domain_error("RadialProfile::h: r > 0 required");
        const int n = ball_.n;
        const double gv = g(r);
        const double gp = g_prime(r);
        return gp * gp + (n - 1) * gv * gv / (r * r) + 2.0 * alpha_ * gv * gp +
               alpha_ * (n - 1) * gv * gv / r;
    }

private:
    BallSpec ball_;
    double alpha_;
    RadialEigenSolution mode_;
};

inline double radial_g(const BallSpec& b, double alpha, double r) {
    return RadialProfile(b, alpha).g(r);
}

inline double radial_g_prime(const BallSpec& b, double alpha, double r) {
    return RadialProfile(b, alpha).g_prime(r);
}

inline double radial_h(const BallSpec& b, double alpha, double r) {
    return RadialProfile(b, alpha).h(r);
}

} // namespace robinstab
