// Command-line front end: ball spectra, stability constants, corpus
// verification, sharpness sweeps, the Neumann limit check, and mesh dumps.
//
// Exit codes: 0 all checks passed, 1 a mathematical check failed,
// 2 invalid input or configuration.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "robinstab/robinstab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMathFail = 1;
constexpr int kExitBadInput = 2;

constexpr double kSlopeLo = 1.8;
constexpr double kSlopeHi = 2.2;
constexpr double kAsymRatioSpread = 0.15;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::map<int, double> parse_modes(const std::vector<std::string>& specs) {
    std::map<int, double> out;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        const int m = std::stoi(s.substr(0, eq));
        const double c = eq == std::string::npos ? 1.0 : std::stod(s.substr(eq + 1));
        out[m] = c;
    }
    return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const robinstab::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMathFail;
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file " + path);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using namespace robinstab;

    CLI::App app{"Robin-Laplacian spectral stability toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI file (flags take precedence)");

    // ---- ball-eig ----------------------------------------------------------
    auto* ball = app.add_subcommand("ball-eig", "analytic Robin eigenvalues of a ball");
    int be_n = 2;
    double be_R = 1.0, be_alpha = -0.5;
    bool be_first = false;
    ball->add_option("--n", be_n, "dimension")->capture_default_str();
    ball->add_option("--R", be_R, "ball radius")->capture_default_str();
    ball->add_option("--alpha", be_alpha, "Robin boundary parameter")->capture_default_str();
    ball->add_flag("--first", be_first, "also print lambda_1");

    // ---- constants ---------------------------------------------------------
    auto* cst = app.add_subcommand("constants", "stability constants eta, gamma, delta");
    int c_n = 2;
    double c_R = 1.0, c_alpha = -0.5;
    cst->add_option("--n", c_n, "dimension")->capture_default_str();
    cst->add_option("--R", c_R, "equivalent ball radius")->capture_default_str();
    cst->add_option("--alpha", c_alpha, "Robin boundary parameter")->capture_default_str();

    // ---- verify ------------------------------------------------------------
    auto* ver = app.add_subcommand("verify", "quantitative inequality on domain files");
    std::vector<std::string> v_files;
    std::vector<double> v_alphas = {-0.2, -0.5, -0.8};
    double v_h = 0.035;
    int v_order = 1;
    std::string v_csv;
    ver->add_option("--domain", v_files, "domain file(s)")->required();
    ver->add_option("--alpha", v_alphas, "boundary parameters")
        ->delimiter(',')->capture_default_str();
    ver->add_option("--h", v_h, "mesh size")->capture_default_str();
    ver->add_option("--order", v_order, "element order (1 or 2)")->capture_default_str();
    ver->add_option("--csv", v_csv, "write the per-case CSV here");

    // ---- sharpness ---------------------------------------------------------
    auto* shp = app.add_subcommand("sharpness", "deficit-vs-eps exponent sweep");
    std::vector<std::string> s_modes = {"4"};
    double s_alpha = -0.5;
    std::vector<double> s_eps = {0.02, 0.03, 0.05, 0.07, 0.1};
    double s_h = 0.01;
    int s_order = 2;
    std::string s_csv, s_plot;
    shp->add_option("--mode", s_modes, "psi modes, as m or m=coeff")->capture_default_str();
    shp->add_option("--alpha", s_alpha, "boundary parameter")->capture_default_str();
    shp->add_option("--eps", s_eps, "eps values")->delimiter(',')->capture_default_str();
    shp->add_option("--h", s_h, "finest mesh size")->capture_default_str();
    shp->add_option("--order", s_order, "element order (1 or 2)")->capture_default_str();
    shp->add_option("--csv", s_csv, "write the sweep CSV here");
    shp->add_option("--plot", s_plot, "write a log-log SVG plot here");

    // ---- neumann-limit -----------------------------------------------------
    auto* neu = app.add_subcommand("neumann-limit", "Szego-Weinberger limit check");
    std::string n_file;
    std::vector<double> n_alphas = {-0.5, -0.1, -0.01, -0.001, -0.0001};
    double n_h = 0.035;
    neu->add_option("--domain", n_file, "domain file")->required();
    neu->add_option("--alpha-list", n_alphas, "alphas approaching 0^-")
        ->delimiter(',')->capture_default_str();
    neu->add_option("--h", n_h, "mesh size")->capture_default_str();

    // ---- mesh-dump ---------------------------------------------------------
    auto* msh = app.add_subcommand("mesh-dump", "triangulate a domain and dump it");
    std::string m_file, m_out;
    double m_h = 0.1;
    int m_grade = 0;
    msh->add_option("--domain", m_file, "domain file")->required();
    msh->add_option("--h", m_h, "mesh size")->capture_default_str();
    msh->add_option("--grade", m_grade, "boundary grading depth")->capture_default_str();
    msh->add_option("--out", m_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage / message
        return e.get_exit_code() == 0 ? kExitOk : kExitBadInput;
    }

    if (ball->parsed()) {
        return guarded([&]() -> int {
            const BallSpec b(be_n, be_R);
            char buf[64];
            std::snprintf(buf, sizeof buf, "lambda2 = %.12g\n", lambda2_ball(b, be_alpha));
            std::cout << buf;
            if (be_first) {
                std::snprintf(buf, sizeof buf, "lambda1 = %.12g\n",
                              lambda1_ball(b, be_alpha));
                std::cout << buf;
            }
            return kExitOk;
        });
    }

    if (cst->parsed()) {
        return guarded([&]() -> int {
            const StabilityConstants sc = gamma_constant(c_n, c_alpha, c_R);
            char buf[96];
            std::snprintf(buf, sizeof buf, "eta = %.12g\ngamma = %.12g\ndelta = %.12g\n",
                          sc.eta, sc.gamma, delta_constant(c_n));
            std::cout << buf;
            return kExitOk;
        });
    }

    if (ver->parsed()) {
        return guarded([&]() -> int {
            for (const auto& f : v_files) (void)load_domain_file(f);  // fail fast -> exit 2
            const CorpusResult res = run_corpus(v_files, v_alphas, v_h, v_order);
            if (!v_csv.empty()) {
                auto out = open_out(v_csv);
                write_corpus_csv(out, res);
            } else {
                write_corpus_csv(std::cout, res);
            }
            std::cerr << (res.all_pass ? "PASS" : "FAIL") << ": worst margin "
                      << fmt(res.worst_margin) << (res.had_errors ? " (with error rows)" : "")
                      << "\n";
            return res.all_pass ? kExitOk : kExitMathFail;
        });
    }

    if (shp->parsed()) {
        return guarded([&]() -> int {
            const auto coeffs = parse_modes(s_modes);
            const SharpnessTable t = sharpness_sweep(coeffs, s_alpha, s_eps, s_h, s_order);
            if (!s_csv.empty()) {
                auto out = open_out(s_csv);
                write_sharpness_csv(out, t);
            } else {
                write_sharpness_csv(std::cout, t);
            }
            if (!s_plot.empty()) {
                auto out = open_out(s_plot);
                write_sharpness_svg(out, t);
            }
            bool ok = t.fit_count >= 2;
            for (const auto& r : t.rows)
                if (r.in_fit && r.deficit <= 0.0) ok = false;
            if (ok) {
                std::vector<double> ratios;
                for (const auto& r : t.rows) ratios.push_back(r.asymmetry / r.eps);
                std::vector<double> sorted = ratios;
                std::sort(sorted.begin(), sorted.end());
                const double med = sorted[sorted.size() / 2];
                for (double q : ratios)
                    if (std::fabs(q - med) > kAsymRatioSpread * med) ok = false;
                if (t.fitted_slope < kSlopeLo || t.fitted_slope > kSlopeHi) ok = false;
            }
            std::cerr << (ok ? "PASS" : "FAIL") << ": slope " << fmt(t.fitted_slope)
                      << " from " << t.fit_count << " rows\n";
            return ok ? kExitOk : kExitMathFail;
        });
    }

    if (neu->parsed()) {
        return guarded([&]() -> int {
            const StarDomain2D dom = load_domain_file(n_file);
            const NeumannLimitReport rep = neumann_limit_check(dom, n_alphas, n_h);
            std::cout << "mu2_ball = " << fmt(rep.mu2_ball) << "\n"
                      << "mu2_domain = " << fmt(rep.mu2_domain) << "\n"
                      << "asymmetry = " << fmt(rep.asymmetry) << "\n"
                      << "delta_term = " << fmt(rep.delta_term) << "\n"
                      << "margin = " << fmt(rep.margin) << " (allowance "
                      << fmt(rep.allowance) << ")\n";
            std::cout << "alpha,gamma,limit,rel_gap\n";
            for (const auto& row : rep.gamma_rows) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", row.alpha,
                              row.gamma, row.limit, row.rel_gap);
                std::cout << buf;
            }
            const bool ok = rep.neumann_pass && rep.limit_pass;
            std::cerr << (ok ? "PASS" : "FAIL") << "\n";
            return ok ? kExitOk : kExitMathFail;
        });
    }

    if (msh->parsed()) {
        return guarded([&]() -> int {
            const StarDomain2D dom = load_domain_file(m_file);
            MeshOptions opt;
            opt.grade_depth = m_grade;
            const TriMesh mesh = triangulate(dom, m_h, opt);
            if (!m_out.empty()) {
                auto out = open_out(m_out);
                write_mesh(out, mesh);
            } else {
                write_mesh(std::cout, mesh);
            }
            return kExitOk;
        });
    }

    return kExitOk;
}
