#pragma once

// Structured triangulation of star-shaped domains.  The reference disk is
// meshed with concentric rings (8j vertices on ring j) joined by a
// mirror-symmetric ladder pattern, then mapped radially onto
// r = R (1 + eps psi(theta)).  For symmetric domains the vertex coordinates
// of quadrants two to four are produced by sign flips of quadrant one, so
// the mesh is closed under the reflections theta -> -theta and
// theta -> pi - theta exactly (bit for bit).
//
// An optional boundary grading appends rings that double the angular
// resolution, shrinking the boundary polygon error to O(h^4) for
// quartic-accuracy quadratic-element runs.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "robinstab/errors.hpp"
#include "robinstab/geometry.hpp"

namespace robinstab {

struct TriMesh {
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;       // CCW
    std::vector<std::array<int, 2>> boundary_edges;  // CCW along the boundary
    double h = 0.0;                                  // measured max edge length
    bool symmetric = false;
};

struct MeshOptions {
    int grade_depth = 0;          // angular doubling layers near the boundary
    double min_angle_deg = 20.0;  // quality threshold
    bool check_quality = true;
};

inline double mesh_area(const TriMesh& m) {
    double area = 0.0;
    for (const auto& t : m.triangles) {
        const auto& a = m.vertices[t[0]];
        const auto& b = m.vertices[t[1]];
        const auto& c = m.vertices[t[2]];
        area += 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
    }
    return area;
}

inline double mesh_perimeter(const TriMesh& m) {
    double per = 0.0;
    for (const auto& e : m.boundary_edges) {
        const auto& a = m.vertices[e[0]];
        const auto& b = m.vertices[e[1]];
        per += std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    return per;
}

inline double mesh_min_angle_deg(const TriMesh& m) {
    double worst = 180.0;
    for (const auto& t : m.triangles) {
        for (int i = 0; i < 3; ++i) {
            const auto& p = m.vertices[t[i]];
            const auto& q = m.vertices[t[(i + 1) % 3]];
            const auto& r = m.vertices[t[(i + 2) % 3]];
            const double ux = q[0] - p[0], uy = q[1] - p[1];
            const double vx = r[0] - p[0], vy = r[1] - p[1];
            const double dot = ux * vx + uy * vy;
            const double cross = ux * vy - uy * vx;
            worst = std::min(worst, std::atan2(std::fabs(cross), dot) * 180.0 / kPi);
        }
    }
    return worst;
}

inline double mesh_max_edge(const TriMesh& m) {
    double h = 0.0;
    for (const auto& t : m.triangles) {
        for (int i = 0; i < 3; ++i) {
            const auto& a = m.vertices[t[i]];
            const auto& b = m.vertices[t[(i + 1) % 3]];
            h = std::fmax(h, std::hypot(b[0] - a[0], b[1] - a[1]));
        }
    }
    return h;
}

namespace detail {

inline void orient_ccw(std::array<int, 3>& t,
                       const std::vector<std::array<double, 2>>& v) {
    const auto& a = v[t[0]];
    const auto& b = v[t[1]];
    const auto& c = v[t[2]];
    const double cr = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if (cr < 0.0) std::swap(t[1], t[2]);
}

// Vertices of one ring with N points (N divisible by 8) at reference radius
// rho in [0, 1].  Symmetric domains get quadrant-mirrored coordinates.
inline void emit_ring(const StarDomain2D& d, int N, double rho,
                      std::vector<std::array<double, 2>>& out) {
    const int q = N / 4;
    if (d.symmetric()) {
        std::vector<std::array<double, 2>> quad(q + 1);
        for (int i = 0; i <= q; ++i) {
            const double theta = 2.0 * kPi * i / N;
            const double rr = rho * d.radius(theta);
            if (i == 0)
                quad[i] = {rr, 0.0};
            else if (i == q)
                quad[i] = {0.0, rr};
            else
                quad[i] = {rr * std::cos(theta), rr * std::sin(theta)};
        }
        for (int i = 0; i < N; ++i) {
            if (i <= q)
                out.push_back(quad[i]);
            else if (i <= N / 2)
                out.push_back({-quad[N / 2 - i][0], quad[N / 2 - i][1]});
            else {
                // mirror of index N - i across the x axis; that index is < N/2
                const int j = N - i;
                const auto base = (j <= q)
                                      ? quad[j]
                                      : std::array<double, 2>{-quad[N / 2 - j][0],
                                                              quad[N / 2 - j][1]};
                out.push_back({base[0], -base[1]});
            }
        }
    } else {
        for (int i = 0; i < N; ++i) {
            const double theta = 2.0 * kPi * i / N;
            const double rr = rho * d.radius(theta);
            out.push_back({rr * std::cos(theta), rr * std::sin(theta)});
        }
    }
}

// Ladder strip between ring (start_in, N_in) and ring (start_out, N_out)
// where N_out = N_in + 8: one extra point per 45-degree sector.
inline void strip_plus8(int start_in, int N_in, int start_out, int N_out,
                        std::vector<std::array<int, 3>>& tris) {
    const int j = N_in / 8;  // intervals per sector on the inner ring
    for (int s = 0; s < 8; ++s) {
        const auto in = [&](int i) { return start_in + (s * j + i) % N_in; };
        const auto out = [&](int i) { return start_out + (s * (j + 1) + i) % N_out; };
        for (int i = 0; i <= j; ++i)
            tris.push_back({in(i), out(i), out(i + 1)});
        for (int i = 0; i < j; ++i)
            tris.push_back({in(i), out(i + 1), in(i + 1)});
    }
}

// 1:2 doubling strip between ring (start_in, N) and ring (start_out, 2N).
inline void strip_double(int start_in, int N, int start_out,
                         std::vector<std::array<int, 3>>& tris) {
    for (int i = 0; i < N; ++i) {
        const int u0 = start_in + i;
        const int u1 = start_in + (i + 1) % N;
        const int w0 = start_out + 2 * i;
        const int w1 = start_out + 2 * i + 1;
        const int w2 = start_out + (2 * i + 2) % (2 * N);
        tris.push_back({u0, w0, w1});
        tris.push_back({u0, w1, u1});
        tris.push_back({u1, w1, w2});
    }
}

inline TriMesh build_structured(const StarDomain2D& d, int Nr, int grade_depth) {
    TriMesh m;
    m.symmetric = d.symmetric();

    // ring layout: interior rings 1..Nr (8j points), then grade_depth
    // doubling rings ending exactly on the boundary
    std::vector<double> rho;     // per ring
    std::vector<int> counts;     // per ring
    double inner_top = 1.0;
    std::vector<double> widths(grade_depth);
    if (grade_depth > 0) {
        double total = 0.0;
        for (int l = 0; l < grade_depth; ++l) {
            widths[l] = 0.7 * kPi / (4.0 * Nr * (1 << (l + 1)));
            total += widths[l];
        }
        inner_top = 1.0 - total;
    }
    for (int j = 1; j <= Nr; ++j) {
        rho.push_back(inner_top * j / Nr);
        counts.push_back(8 * j);
    }
    double acc = inner_top;
    for (int l = 0; l < grade_depth; ++l) {
        acc += widths[l];
        rho.push_back(l + 1 == grade_depth ? 1.0 : acc);
        counts.push_back(8 * Nr * (1 << (l + 1)));
    }

    m.vertices.push_back({0.0, 0.0});
    std::vector<int> ring_start(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) {
        ring_start[j] = static_cast<int>(m.vertices.size());
        emit_ring(d, counts[j], rho[j], m.vertices);
    }

    // center fan
    for (int s = 0; s < 8; ++s)
        m.triangles.push_back({0, ring_start[0] + s, ring_start[0] + (s + 1) % 8});
    // strips
    for (std::size_t j = 0; j + 1 < rho.size(); ++j) {
        if (counts[j + 1] == counts[j] + 8)
            strip_plus8(ring_start[j], counts[j], ring_start[j + 1], counts[j + 1],
                        m.triangles);
        else
            strip_double(ring_start[j], counts[j], ring_start[j + 1], m.triangles);
    }
    for (auto& t : m.triangles) detail::orient_ccw(t, m.vertices);

    const int bstart = ring_start.back();
    const int bcount = counts.back();
    for (int i = 0; i < bcount; ++i)
        m.boundary_edges.push_back({bstart + i, bstart + (i + 1) % bcount});

    m.h = mesh_max_edge(m);
    return m;
}

} // namespace detail

/// Conforming triangulation with boundary vertices exactly on
/// r = R (1 + eps psi(theta)) and max edge <= h_target.
inline TriMesh triangulate(const StarDomain2D& d, double h_target,
                           const MeshOptions& opt = {}) {
    if (!(h_target > 0.0) || !(h_target < d.R() / 4.0))
        throw std::invalid_argument("triangulate: need 0 < h_target < R/4");
    int Nr = std::max(3, static_cast<int>(
                             std::ceil(d.R() * (1.0 + d.eps() * d.psi_sup_bound()) /
                                       h_target)));
    TriMesh m;
    for (int attempt = 0; attempt < 8; ++attempt) {
        m = detail::build_structured(d, Nr, opt.grade_depth);
        if (m.h <= h_target) break;
        Nr = static_cast<int>(std::ceil(Nr * m.h / h_target)) + 1;
    }
    if (m.h > h_target)
        throw MeshQualityError("triangulate: could not reach target edge length");
    if (opt.check_quality) {
        const double ang = mesh_min_angle_deg(m);
        if (ang < opt.min_angle_deg)
            throw MeshQualityError("triangulate: min angle " + std::to_string(ang) +
                                   " deg below threshold");
    }
    return m;
}

/// Grading depth that makes the boundary polygon error O(h^4): final arc
/// spacing ~ h^2 / (2 R).
inline int grade_depth_for_quartic(double h, double R) {
    const double d = std::log2(kPi * R / (2.0 * h));
    return std::max(0, static_cast<int>(std::ceil(d)));
}

/// Split every triangle in four through the edge midpoints.  The domain (the
/// polygon) is unchanged, so the refined P1 space contains the coarse one.
inline TriMesh uniform_refine(const TriMesh& m) {
    TriMesh f;
    f.symmetric = m.symmetric;
    f.vertices = m.vertices;
    std::unordered_map<std::uint64_t, int> midpoint;
    const auto mid = [&](int a, int b) {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
            static_cast<std::uint64_t>(std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int idx = static_cast<int>(f.vertices.size());
        f.vertices.push_back({0.5 * (m.vertices[a][0] + m.vertices[b][0]),
                              0.5 * (m.vertices[a][1] + m.vertices[b][1])});
        midpoint.emplace(key, idx);
        return idx;
    };
    for (const auto& t : m.triangles) {
        const int ab = mid(t[0], t[1]);
        const int bc = mid(t[1], t[2]);
        const int ca = mid(t[2], t[0]);
        f.triangles.push_back({t[0], ab, ca});
        f.triangles.push_back({t[1], bc, ab});
        f.triangles.push_back({t[2], ca, bc});
        f.triangles.push_back({ab, bc, ca});
    }
    for (const auto& e : m.boundary_edges) {
        const int c = mid(e[0], e[1]);
        f.boundary_edges.push_back({e[0], c});
        f.boundary_edges.push_back({c, e[1]});
    }
    f.h = mesh_max_edge(f);
    return f;
}

/// Vertex permutation of the reflection that flips the given coordinate
/// (axis 'x': (x,y) -> (-x,y); axis 'y': (x,y) -> (x,-y)).  Requires a mesh
/// built with the symmetry flag; matching is exact.
inline std::vector<int> vertex_reflection(const TriMesh& m, char axis) {
    if (axis != 'x' && axis != 'y')
        throw std::invalid_argument("vertex_reflection: axis must be 'x' or 'y'");
    const auto canon = [](double v) { return v == 0.0 ? 0.0 : v; };
    const auto key = [&](double x, double y) {
        const auto hx = std::bit_cast<std::uint64_t>(canon(x));
        const auto hy = std::bit_cast<std::uint64_t>(canon(y));
        return hx ^ (hy * 0x9e3779b97f4a7c15ULL + (hy << 7));
    };
    std::unordered_multimap<std::uint64_t, int> lut;
    lut.reserve(m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        lut.emplace(key(m.vertices[i][0], m.vertices[i][1]), static_cast<int>(i));
    std::vector<int> perm(m.vertices.size(), -1);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        const double rx = axis == 'x' ? -m.vertices[i][0] : m.vertices[i][0];
        const double ry = axis == 'y' ? -m.vertices[i][1] : m.vertices[i][1];
        const auto range = lut.equal_range(key(rx, ry));
        for (auto it = range.first; it != range.second; ++it) {
            const auto& v = m.vertices[it->second];
            if (canon(v[0]) == canon(rx) && canon(v[1]) == canon(ry)) {
                perm[i] = it->second;
                break;
            }
        }
        if (perm[i] < 0)
            throw std::invalid_argument(
                "vertex_reflection: mesh is not closed under the reflection");
    }
    return perm;
}

/// Plain-text mesh dump: vertex / triangle / boundary-edge sections.
inline void write_mesh(std::ostream& os, const TriMesh& m) {
    char buf[64];
    os << "vertices " << m.vertices.size() << "\n";
    for (const auto& v : m.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v[0], v[1]);
        os << buf;
    }
    os << "triangles " << m.triangles.size() << "\n";
    for (const auto& t : m.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "boundary_edges " << m.boundary_edges.size() << "\n";
    for (const auto& e : m.boundary_edges) os << e[0] << " " << e[1] << "\n";
    std::snprintf(buf, sizeof buf, "h %.17g\n", m.h);
    os << buf;
}

inline TriMesh read_mesh(std::istream& is) {
    TriMesh m;
    std::string tag;
    std::size_t n = 0;
    if (!(is >> tag >> n) || tag != "vertices") throw ParseError("mesh: bad vertex header");
    m.vertices.resize(n);
    for (auto& v : m.vertices)
        if (!(is >> v[0] >> v[1])) throw ParseError("mesh: bad vertex line");
    if (!(is >> tag >> n) || tag != "triangles") throw ParseError("mesh: bad triangle header");
    m.triangles.resize(n);
    for (auto& t : m.triangles)
        if (!(is >> t[0] >> t[1] >> t[2])) throw ParseError("mesh: bad triangle line");
    if (!(is >> tag >> n) || tag != "boundary_edges")
        throw ParseError("mesh: bad boundary header");
    m.boundary_edges.resize(n);
    for (auto& e : m.boundary_edges)
        if (!(is >> e[0] >> e[1])) throw ParseError("mesh: bad boundary line");
    if (!(is >> tag >> m.h) || tag != "h") throw ParseError("mesh: bad h line");
    return m;
}

} // namespace robinstab
