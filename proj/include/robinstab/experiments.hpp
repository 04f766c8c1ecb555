#pragma once

// End-to-end verification pipelines: the quantitative inequality on a domain
// corpus, the sharpness sweep of the asymmetry exponent, and the Neumann
// limit consistency check.  FEM eigenvalues are Richardson-extrapolated and
// every report carries an explicit numerical allowance.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "robinstab/eigensolver.hpp"
#include "robinstab/fem.hpp"
#include "robinstab/geometry.hpp"
#include "robinstab/mesh.hpp"
#include "robinstab/stability.hpp"

namespace robinstab {

inline constexpr double kAsymmetryTol = 1e-6;
inline constexpr double kSolverTol = 1e-6;

struct StabilityReport {
    std::string domain_id;
    int n = 2;
    double R_eq = 0.0;       // equivalent-ball radius
    double alpha = 0.0;
    double eps = 0.0;
    double lambda2_ball = 0.0;
    double lambda2_domain = 0.0;
    double asymmetry = 0.0;
    double gamma = 0.0;
    double deficit = 0.0;
    double margin = 0.0;
    double allowance = 0.0;
    bool pass = false;
    bool trivial_branch = false;  // lambda_2(Omega) <= 0: inequality is automatic
};

namespace detail {

inline int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("ROBIN_STABILITY_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return std::min<unsigned>(v, hw);
    }
    return static_cast<int>(hw);
}

template <typename F>
inline void parallel_for(int count, F&& body) {
    const int T = std::min(thread_cap(), count);
    if (T <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (int t = 0; t < T; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// second-smallest discrete Robin eigenvalue on one mesh
inline double fem_lambda2(const StarDomain2D& dom, double alpha, double h, int order,
                          int grade_depth = 0) {
    MeshOptions opt;
    opt.grade_depth = grade_depth;
    const TriMesh mesh = triangulate(dom, h, opt);
    const DiscreteOperator op = assemble(mesh, alpha, order);
    const SpectrumResult res = solve_lowest(op, std::min(4, op.dof_count), kSolverTol);
    return res.eigenvalues[1];
}

struct Extrapolated {
    double value;      // Richardson-extrapolated eigenvalue (order 2 in h)
    double step;       // |lambda(h) - lambda(h/2)|: the plain error estimate
};

inline Extrapolated fem_lambda2_richardson(const StarDomain2D& dom, double alpha,
                                           double h, int order) {
    const double c = fem_lambda2(dom, alpha, h, order);
    const double f = fem_lambda2(dom, alpha, 0.5 * h, order);
    return {f + (f - c) / 3.0, std::fabs(c - f)};
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace detail

/// Check lambda_2(B) - lambda_2(Omega) >= gamma A(Omega)^2 for one domain.
/// lambda_2(Omega) comes from meshes at h and h/2 with Richardson
/// extrapolation; the allowance is the two-mesh difference plus the
/// asymmetry tolerance.
inline StabilityReport verify_main_inequality(const StarDomain2D& dom, double alpha,
                                              double h, int order = 1,
                                              const std::string& id = "") {
    StabilityReport rep;
    rep.domain_id = id;
    rep.alpha = alpha;
    rep.eps = dom.eps();
    const BallSpec ball = equivalent_ball(dom);
    rep.R_eq = ball.R;
    if (!(alpha > -1.0 / ball.R && alpha < 0.0))
        throw std::out_of_range("verify_main_inequality: need -1/R < alpha < 0");
    rep.lambda2_ball = lambda2_ball(ball, alpha);
    const auto fem = detail::fem_lambda2_richardson(dom, alpha, h, order);
    rep.lambda2_domain = fem.value;
    rep.asymmetry = fraenkel_asymmetry(dom, kAsymmetryTol);
    const StabilityConstants sc = gamma_constant(2, alpha, ball.R);
    rep.gamma = sc.gamma;
    rep.deficit = rep.lambda2_ball - rep.lambda2_domain;
    double gamma_eff = sc.gamma;
    if (rep.lambda2_domain <= 0.0) {
        // the paper's trivial branch: gamma = lambda_2(B)/4 works since A <= 2
        rep.trivial_branch = true;
        gamma_eff = 0.25 * rep.lambda2_ball;
    }
    rep.allowance = fem.step + kAsymmetryTol;
    rep.margin = rep.deficit - gamma_eff * rep.asymmetry * rep.asymmetry;
    rep.pass = rep.margin >= -rep.allowance;
    return rep;
}

struct CorpusRow {
    std::string domain_id;
    std::optional<StabilityReport> report;  // empty on error
    std::string error;
};

struct CorpusResult {
    std::vector<CorpusRow> rows;
    double worst_margin = 0.0;
    bool all_pass = true;
    bool had_errors = false;
};

/// verify_main_inequality over the cross product corpus x alpha_grid.  Rows
/// keep the input order; per-case failures are recorded, never dropped.
inline CorpusResult run_corpus(const std::vector<std::string>& domain_files,
                               const std::vector<double>& alphas, double h,
                               int order = 1) {
    if (domain_files.empty())
        throw std::invalid_argument("run_corpus: corpus must be non-empty");
    CorpusResult out;
    const int count = static_cast<int>(domain_files.size() * alphas.size());
    out.rows.resize(count);
    detail::parallel_for(count, [&](int i) {
        const std::size_t fi = i / alphas.size();
        const double alpha = alphas[i % alphas.size()];
        CorpusRow& row = out.rows[i];
        row.domain_id = domain_files[fi];
        try {
            const StarDomain2D dom = load_domain_file(domain_files[fi]);
            row.report = verify_main_inequality(dom, alpha, h, order, domain_files[fi]);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    bool first = true;
    for (const auto& row : out.rows) {
        if (!row.report) {
            out.had_errors = true;
            out.all_pass = false;
            continue;
        }
        if (!row.report->pass) out.all_pass = false;
        if (first || row.report->margin < out.worst_margin) {
            out.worst_margin = row.report->margin;
            first = false;
        }
    }
    return out;
}

struct SharpnessRow {
    double eps = 0.0;
    double lambda2_ball = 0.0;    // volume-matched ball via exact t_eps
    double lambda2_domain = 0.0;  // extrapolated FEM value
    double deficit = 0.0;
    double asymmetry = 0.0;
    double allowance = 0.0;
    bool in_fit = false;  // deficit >= 10 x allowance
};

struct SharpnessTable {
    std::vector<SharpnessRow> rows;
    double fitted_slope = 0.0;
    double fitted_intercept = 0.0;
    int fit_count = 0;
};

/// Deficit scaling sweep over the nearly-spherical family
/// r = 1 + eps psi(theta).  The ball reference is exact (closed-form t_eps);
/// the domain side uses meshes at 4h, 2h, h with two nested Richardson
/// levels, whose disagreement sets the noise floor.
inline SharpnessTable sharpness_sweep(const std::map<int, double>& coeffs,
                                      double alpha,
                                      const std::vector<double>& eps_list, double h,
                                      int order = 2) {
    SharpnessTable table;
    table.rows.resize(eps_list.size());
    const bool symmetric = std::all_of(coeffs.begin(), coeffs.end(),
                                       [](const auto& mc) { return mc.first % 2 == 0; });
    detail::parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
        const double eps = eps_list[i];
        SharpnessRow& row = table.rows[i];
        row.eps = eps;
        const StarDomain2D dom = make_star_domain(1.0, eps, coeffs, symmetric);
        const BallSpec beps = equivalent_ball(dom);
        row.lambda2_ball = lambda2_ball(beps, alpha);
        const double l4 = detail::fem_lambda2(dom, alpha, 4.0 * h, order);
        const double l2 = detail::fem_lambda2(dom, alpha, 2.0 * h, order);
        const double l1 = detail::fem_lambda2(dom, alpha, h, order);
        const double extrap_c = l2 + (l2 - l4) / 3.0;
        const double extrap_f = l1 + (l1 - l2) / 3.0;
        row.lambda2_domain = extrap_f;
        row.allowance = 3.0 * std::fabs(extrap_f - extrap_c) + 1e-11 + kAsymmetryTol;
        row.deficit = row.lambda2_ball - row.lambda2_domain;
        row.asymmetry = fraenkel_asymmetry(dom, kAsymmetryTol);
        row.in_fit = row.deficit >= 10.0 * row.allowance;
    });
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : table.rows) {
        if (!row.in_fit || row.deficit <= 0.0) continue;
        const double x = std::log(row.eps);
        const double y = std::log(row.deficit);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++table.fit_count;
    }
    if (table.fit_count >= 2) {
        const double n = table.fit_count;
        table.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        table.fitted_intercept = (sy - table.fitted_slope * sx) / n;
    }
    return table;
}

struct NeumannGammaRow {
    double alpha = 0.0;
    double gamma = 0.0;
    double limit = 0.0;  // delta(2) |Omega|^{-1}
    double rel_gap = 0.0;
};

struct NeumannLimitReport {
    double mu2_ball = 0.0;
    double mu2_domain = 0.0;
    double asymmetry = 0.0;
    double delta_term = 0.0;  // delta(2) |Omega|^{-1} A^2
    double margin = 0.0;
    double allowance = 0.0;
    bool neumann_pass = false;
    std::vector<NeumannGammaRow> gamma_rows;
    bool limit_pass = false;  // gap at the alpha nearest 0 is <= 1e-2
};

/// Corollary check: the pure Neumann (alpha = 0) deficit dominates
/// delta(2) |Omega|^{-1} A^2, and gamma(2, alpha, R) approaches that limit
/// constant as alpha -> 0^-.
inline NeumannLimitReport neumann_limit_check(const StarDomain2D& dom,
                                              const std::vector<double>& alpha_list,
                                              double h, int order = 1) {
    NeumannLimitReport rep;
    const BallSpec ball = equivalent_ball(dom);
    for (double a : alpha_list)
        if (!(a > -1.0 / ball.R && a < 0.0))
            throw std::out_of_range("neumann_limit_check: alphas must lie in (-1/R, 0)");
    const double vol = volume(dom);
    const double delta2 = delta_constant(2);
    rep.mu2_ball = lambda2_unit_ball(2, 0.0).lambda / (ball.R * ball.R);
    const auto fem = detail::fem_lambda2_richardson(dom, 0.0, h, order);
    rep.mu2_domain = fem.value;
    rep.asymmetry = fraenkel_asymmetry(dom, kAsymmetryTol);
    rep.delta_term = delta2 / vol * rep.asymmetry * rep.asymmetry;
    rep.allowance = fem.step + kAsymmetryTol;
    rep.margin = (rep.mu2_ball - rep.mu2_domain) - rep.delta_term;
    rep.neumann_pass = rep.margin >= -rep.allowance;

    const double limit = delta2 / vol;
    std::vector<double> sorted(alpha_list);
    std::sort(sorted.begin(), sorted.end());  // most negative first
    for (double a : sorted) {
        NeumannGammaRow row;
        row.alpha = a;
        row.gamma = gamma_constant(2, a, ball.R).gamma;
        row.limit = limit;
        row.rel_gap = std::fabs(row.gamma - limit) / limit;
        rep.gamma_rows.push_back(row);
    }
    rep.limit_pass = !rep.gamma_rows.empty() && rep.gamma_rows.back().rel_gap <= 1e-2;
    return rep;
}

// ---------------------------------------------------------------------------
// CSV / SVG output

inline const char* kStabilityCsvHeader =
    "domain_id,n,R,alpha,eps,lambda2_ball,lambda2_domain,asymmetry,gamma,"
    "deficit,margin,allowance,pass\n";

inline void write_csv_row(std::ostream& os, const StabilityReport& r) {
    using detail::fmt;
    os << r.domain_id << "," << r.n << "," << fmt(r.R_eq) << "," << fmt(r.alpha) << ","
       << fmt(r.eps) << "," << fmt(r.lambda2_ball) << "," << fmt(r.lambda2_domain)
       << "," << fmt(r.asymmetry) << "," << fmt(r.gamma) << "," << fmt(r.deficit)
       << "," << fmt(r.margin) << "," << fmt(r.allowance) << ","
       << (r.pass ? "1" : "0") << "\n";
}

inline void write_corpus_csv(std::ostream& os, const CorpusResult& res) {
    os << kStabilityCsvHeader;
    for (const auto& row : res.rows) {
        if (row.report) {
            write_csv_row(os, *row.report);
        } else {
            os << row.domain_id << ",,,,,,,,,,,,error\n";
        }
    }
}

inline void write_sharpness_csv(std::ostream& os, const SharpnessTable& t) {
    using detail::fmt;
    os << "eps,lambda2_ball,lambda2_domain,deficit,asymmetry,allowance,in_fit\n";
    for (const auto& r : t.rows)
        os << fmt(r.eps) << "," << fmt(r.lambda2_ball) << "," << fmt(r.lambda2_domain)
           << "," << fmt(r.deficit) << "," << fmt(r.asymmetry) << ","
           << fmt(r.allowance) << "," << (r.in_fit ? "1" : "0") << "\n";
    os << "# fitted_slope," << fmt(t.fitted_slope) << "\n";
    os << "# fitted_intercept," << fmt(t.fitted_intercept) << "\n";
}

/// Minimal log-log deficit-vs-eps plot with the fitted power law.
inline void write_sharpness_svg(std::ostream& os, const SharpnessTable& t) {
    using detail::fmt;
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : t.rows) {
        if (r.deficit <= 0.0) continue;
        xmin = std::min(xmin, std::log10(r.eps));
        xmax = std::max(xmax, std::log10(r.eps));
        ymin = std::min(ymin, std::log10(r.deficit));
        ymax = std::max(ymax, std::log10(r.deficit));
    }
    if (xmin > xmax) { xmin = -2; xmax = -1; ymin = -4; ymax = -2; }
    const double xpad = 0.05 * (xmax - xmin + 1e-12), ypad = 0.05 * (ymax - ymin + 1e-12);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;
    const auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
    const auto py = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
       << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << H - mb << "\" stroke=\"black\"/>\n";
    if (t.fit_count >= 2) {
        const double lx0 = xmin + xpad, lx1 = xmax - xpad;
        const double ly0 = (t.fitted_slope * lx0 * std::log(10.0) + t.fitted_intercept) / std::log(10.0);
        const double ly1 = (t.fitted_slope * lx1 * std::log(10.0) + t.fitted_intercept) / std::log(10.0);
        os << "<line x1=\"" << fmt(px(lx0)) << "\" y1=\"" << fmt(py(ly0)) << "\" x2=\""
           << fmt(px(lx1)) << "\" y2=\"" << fmt(py(ly1))
           << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& r : t.rows) {
        if (r.deficit <= 0.0) continue;
        os << "<circle cx=\"" << fmt(px(std::log10(r.eps))) << "\" cy=\""
           << fmt(py(std::log10(r.deficit))) << "\" r=\"4\" fill=\""
           << (r.in_fit ? "#d62728" : "#999999") << "\"/>\n";
    }
    os << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 12)
       << "\" text-anchor=\"middle\" font-size=\"14\">log10 eps</text>\n";
    os << "<text x=\"16\" y=\"" << (H / 2)
       << "\" font-size=\"14\" transform=\"rotate(-90 16 " << (H / 2)
       << ")\" text-anchor=\"middle\">log10 deficit</text>\n";
    os << "<text x=\"" << (W - mr - 8) << "\" y=\"" << (mt + 16)
       << "\" text-anchor=\"end\" font-size=\"14\">slope " << fmt(t.fitted_slope)
       << "</text>\n";
    os << "</svg>\n";
}

} // namespace robinstab
