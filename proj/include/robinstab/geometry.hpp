#pragma once

// Star-shaped planar domains r(theta) = R (1 + eps psi(theta)) with psi given
// by trigonometric modes m >= 3, the exact Fourier area formulas, Fraenkel
// asymmetry by polar quadrature with center search, and the boundary
// Jacobian of the nearly-spherical construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "robinstab/ball_spectrum.hpp"
#include "robinstab/errors.hpp"

namespace robinstab {

class StarDomain2D {
public:
    StarDomain2D() = default;

    double R() const { return R_; }
    double eps() const { return eps_; }
    bool symmetric() const { return symmetric_; }
    const std::map<int, double>& cosine_coeffs() const { return cosine_; }
    const std::map<int, double>& sine_coeffs() const { return sine_; }

    double psi(double theta) const {
        double s = 0.0;
        for (const auto& [m, c] : cosine_) s += c * std::cos(m * theta);
        for (const auto& [m, c] : sine_) s += c * std::sin(m * theta);
        return s;
    }

    double psi_prime(double theta) const {
        double s = 0.0;
        for (const auto& [m, c] : cosine_) s -= c * m * std::sin(m * theta);
        for (const auto& [m, c] : sine_) s += c * m * std::cos(m * theta);
        return s;
    }

    /// Boundary radius r(theta) = R (1 + eps psi(theta)).
    double radius(double theta) const { return R_ * (1.0 + eps_ * psi(theta)); }

    /// Sum of squared mode coefficients (the Parseval term of the area).
    double coeff_square_sum() const {
        double s = 0.0;
        for (const auto& [m, c] : cosine_) s += c * c;
        for (const auto& [m, c] : sine_) s += c * c;
        return s;
    }

    /// sum_m |c_m| — an L-infinity bound for |psi|.
    double psi_sup_bound() const {
        double s = 0.0;
        for (const auto& [m, c] : cosine_) s += std::fabs(c);
        for (const auto& [m, c] : sine_) s += std::fabs(c);
        return s;
    }

    double psi_prime_sup_bound() const {
        double s = 0.0;
        for (const auto& [m, c] : cosine_) s += m * std::fabs(c);
        for (const auto& [m, c] : sine_) s += m * std::fabs(c);
        return s;
    }

    bool is_disk() const { return eps_ == 0.0 || (cosine_.empty() && sine_.empty()); }

    friend StarDomain2D make_star_domain(double, double, const std::map<int, double>&,
                                         bool, const std::map<int, double>&);

private:
    double R_ = 1.0;
    double eps_ = 0.0;
    bool symmetric_ = true;
    std::map<int, double> cosine_;
    std::map<int, double> sine_;
};

/// Validated construction.  Rejects modes 0..2 (orthogonality to spherical
/// harmonics of order <= 2), odd or sine modes when the double-symmetry flag
/// is set, and any (eps, psi) with min_theta (1 + eps psi) <= 0.
inline StarDomain2D make_star_domain(double R, double eps,
                                     const std::map<int, double>& cosine,
                                     bool symmetric,
                                     const std::map<int, double>& sine = {}) {
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("make_star_domain: radius must be positive");
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("make_star_domain: eps must be >= 0");
    for (const auto* coeffs : {&cosine, &sine}) {
        for (const auto& [m, c] : *coeffs) {
            if (!std::isfinite(c))
                throw std::invalid_argument("make_star_domain: non-finite coefficient");
            if (m < 3)
                throw std::invalid_argument(
                    "make_star_domain: modes 0, 1, 2 are excluded (mode " +
                    std::to_string(m) + ")");
        }
    }
    if (symmetric) {
        if (!sine.empty())
            throw std::invalid_argument(
                "make_star_domain: sine modes break the coordinate symmetry");
        for (const auto& [m, c] : cosine) {
            if (m % 2 != 0 && c != 0.0)
                throw std::invalid_argument(
                    "make_star_domain: odd mode " + std::to_string(m) +
                    " breaks the coordinate symmetry");
        }
    }
    StarDomain2D d;
    d.R_ = R;
    d.eps_ = eps;
    d.symmetric_ = symmetric;
    d.cosine_ = cosine;
    d.sine_ = sine;
    // star-shapedness: dense sampling of 1 + eps psi
    if (eps > 0.0 && !(cosine.empty() && sine.empty())) {
        const int N = 1 << 18;
        double lo = 1e300;
        for (int i = 0; i < N; ++i) {
            const double v = 1.0 + eps * d.psi(2.0 * kPi * i / N);
            lo = std::min(lo, v);
        }
        if (lo <= 0.0)
            throw std::domain_error(
                "make_star_domain: 1 + eps psi(theta) must stay positive "
                "(min over theta is " + std::to_string(lo) + ")");
    }
    return d;
}

/// Exact area from the Fourier coefficients:
/// pi R^2 (1 + eps^2 sum c_m^2 / 2).
inline double volume(const StarDomain2D& d) {
    return kPi * d.R() * d.R() * (1.0 + 0.5 * d.eps() * d.eps() * d.coeff_square_sum());
}

/// t_eps = (|Omega_eps| / |B_R|)^{1/2}: the radius ratio of the equal-area
/// ball to the base ball.
inline double volume_ratio(const StarDomain2D& d) {
    return std::sqrt(1.0 + 0.5 * d.eps() * d.eps() * d.coeff_square_sum());
}

/// The origin-centered ball with the same area.
inline BallSpec equivalent_ball(const StarDomain2D& d) {
    return BallSpec(2, d.R() * volume_ratio(d));
}

/// Jacobian of the boundary map x -> (1 + eps psi) x restricted to the unit
/// circle (n = 2 form).
inline double boundary_jacobian(const StarDomain2D& d, double theta) {
    const double f = 1.0 + d.eps() * d.psi(theta);
    const double fp = d.eps() * d.psi_prime(theta);
    return std::sqrt(f * f + fp * fp);
}

namespace detail {

// Distance from point c to the boundary along direction phi.  The domain is
// star-shaped about any center close enough to the origin, so the crossing
// is unique; safeguarded Newton on F(t) = |c + t u| - r(arg(c + t u)).
inline double ray_exit_distance(const StarDomain2D& d, double cx, double cy,
                                double ux, double uy) {
    if (cx == 0.0 && cy == 0.0) return d.radius(std::atan2(uy, ux));
    const double cr = std::hypot(cx, cy);
    double lo = 0.0;
    double hi = d.R() * (1.0 + d.eps() * d.psi_sup_bound()) + cr + 1e-12;
    const auto F = [&](double t) {
        const double x = cx + t * ux, y = cy + t * uy;
        return std::hypot(x, y) - d.radius(std::atan2(y, x));
    };
    double t = d.radius(std::atan2(uy, ux));  // exact for c = 0, good nearby
    t = std::clamp(t, 1e-12, hi);
    double ft = F(t);
    for (int it = 0; it < 60; ++it) {
        if (ft > 0.0) hi = t; else lo = t;
        if (hi - lo < 1e-14 * d.R()) break;
        // Newton step on F, falling back to bisection when it leaves [lo, hi]
        const double x = cx + t * ux, y = cy + t * uy;
        const double rr = std::hypot(x, y);
        const double darg = (x * uy - y * ux) / (rr * rr);
        const double dF = (x * ux + y * uy) / rr -
                          d.R() * d.eps() * d.psi_prime(std::atan2(y, x)) * darg;
        double tn = (dF != 0.0) ? t - ft / dF : 0.5 * (lo + hi);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
        ft = F(t);
    }
    return t;
}

// |Omega ∩ B_rad(c)| by the periodic midpoint rule in the angle around c.
inline double overlap_area(const StarDomain2D& d, double cx, double cy,
                           double rad, int nodes) {
    double s = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double phi = 2.0 * kPi * (i + 0.5) / nodes;
        const double t = ray_exit_distance(d, cx, cy, std::cos(phi), std::sin(phi));
        const double m = std::min(t, rad);
        s += m * m;
    }
    return 0.5 * s * 2.0 * kPi / nodes;
}

} // namespace detail

/// Fraenkel asymmetry: min over ball centers of |Omega Δ B| / |B| with B the
/// equal-area ball.  Coarse grid over a disk of radius R*eps followed by
/// compass (pattern) refinement; high-resolution polar quadrature for the
/// overlap.  Result accurate to roughly tol.
inline double fraenkel_asymmetry(const StarDomain2D& d, double tol = 1e-6) {
    if (!(tol > 0.0)) throw std::invalid_argument("fraenkel_asymmetry: tol > 0");
    const double area = volume(d);
    const double rad = std::sqrt(area / kPi);
    const int nodes = 8192;
    const auto asym_at = [&](double cx, double cy) {
        const double ov = detail::overlap_area(d, cx, cy, rad, nodes);
        return 2.0 * std::max(0.0, 1.0 - ov / area);
    };
    if (d.is_disk()) return asym_at(0.0, 0.0);

    double search = d.R() * d.eps();
    double bx = 0.0, by = 0.0, best = asym_at(0.0, 0.0);
    for (int widen = 0; widen < 2; ++widen) {
        double gx = bx, gy = by, gbest = best;
        for (int ir = 1; ir <= 3; ++ir) {
            const double rr = search * ir / 3.0;
            for (int ia = 0; ia < 12; ++ia) {
                const double ang = 2.0 * kPi * ia / 12.0;
                const double cx = bx + rr * std::cos(ang);
                const double cy = by + rr * std::sin(ang);
                const double v = asym_at(cx, cy);
                if (v < gbest) { gbest = v; gx = cx; gy = cy; }
            }
        }
        const bool on_rim = std::hypot(gx - bx, gy - by) > 0.95 * search;
        bx = gx; by = gy; best = gbest;
        if (!on_rim) break;
        search *= 4.0;  // minimum hit the search rim: widen and repeat
    }
    // compass refinement
    double step = std::max(search / 3.0, 1e-6 * d.R());
    const double step_min = std::max(0.3 * d.R() * std::sqrt(tol), 1e-9 * d.R());
    while (step > step_min) {
        bool moved = false;
        const std::array<std::array<double, 2>, 4> dirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        for (const auto& dir : dirs) {
            const double cx = bx + step * dir[0];
            const double cy = by + step * dir[1];
            const double v = asym_at(cx, cy);
            if (v < best) { best = v; bx = cx; by = cy; moved = true; }
        }
        if (!moved) step *= 0.5;
    }
    return best;
}

/// Plain-text domain file:
///   R = 1.0
///   eps = 0.1
///   symmetric = true
///   mode 4 = 1.0
///   sine 5 = 0.25        (only when symmetric = false)
/// Blank lines and '#' comments are ignored.
inline StarDomain2D parse_domain_text(std::istream& in, const std::string& name) {
    double R = 1.0, eps = 0.0;
    bool symmetric = true;
    std::map<int, double> cosine, sine;
    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& msg) {
        throw ParseError(name + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::string eq;
        if (key == "mode" || key == "sine") {
            int m;
            double c;
            if (!(ls >> m >> eq >> c) || eq != "=") fail("expected '" + key + " <m> = <value>'");
            auto& dst = (key == "mode") ? cosine : sine;
            if (dst.count(m)) fail("duplicate " + key + " " + std::to_string(m));
            dst[m] = c;
        } else if (key == "R" || key == "eps" || key == "symmetric") {
            std::string val;
            if (!(ls >> eq >> val) || eq != "=") fail("expected '" + key + " = <value>'");
            if (key == "symmetric") {
                if (val == "true" || val == "1") symmetric = true;
                else if (val == "false" || val == "0") symmetric = false;
                else fail("symmetric must be true/false");
            } else {
                try {
                    const double v = std::stod(val);
                    (key == "R" ? R : eps) = v;
                } catch (const std::exception&) {
                    fail("bad number '" + val + "'");
                }
            }
        } else {
            fail("unknown key '" + key + "'");
        }
        std::string trailing;
        if (ls >> trailing) fail("trailing tokens after value");
    }
    try {
        return make_star_domain(R, eps, cosine, symmetric, sine);
    } catch (const std::exception& e) {
        throw ParseError(name + ": " + e.what());
    }
}

inline StarDomain2D load_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open domain file");
    return parse_domain_text(in, path);
}

} // namespace robinstab
