#pragma once

// Finite-element discretization of the Robin quadratic form
//   a(u, v) = Int grad u . grad v dx + alpha Int_boundary u v ds
// with linear (order 1) or quadratic (order 2) triangles on straight
// elements; all local integrals are exact for the polynomial bases.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "robinstab/errors.hpp"
#include "robinstab/mesh.hpp"

namespace robinstab {

/// Global numbering: vertices first, then (for order 2) one node per edge in
/// deterministic first-seen order over the triangle list.
struct DofMap {
    int order = 1;
    int n_vertices = 0;
    int dof_count = 0;
    std::map<std::pair<int, int>, int> edge_index;                // P2 only
    std::vector<std::array<double, 2>> positions;                 // node coords

    int edge_dof(int a, int b) const {
        const auto it = edge_index.find(std::minmax(a, b));
        if (it == edge_index.end())
            throw std::invalid_argument("DofMap: unknown edge");
        return n_vertices + it->second;
    }
};

inline DofMap make_dof_map(const TriMesh& mesh, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("make_dof_map: order must be 1 or 2");
    DofMap dm;
    dm.order = order;
    dm.n_vertices = static_cast<int>(mesh.vertices.size());
    dm.positions = mesh.vertices;
    if (order == 1) {
        dm.dof_count = dm.n_vertices;
        return dm;
    }
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const auto key = std::minmax(t[e], t[(e + 1) % 3]);
            if (dm.edge_index.emplace(key, static_cast<int>(dm.edge_index.size())).second) {
                dm.positions.push_back(
                    {0.5 * (mesh.vertices[key.first][0] + mesh.vertices[key.second][0]),
                     0.5 * (mesh.vertices[key.first][1] + mesh.vertices[key.second][1])});
            }
        }
    }
    dm.dof_count = dm.n_vertices + static_cast<int>(dm.edge_index.size());
    return dm;
}

struct DiscreteOperator {
    Eigen::SparseMatrix<double> A;  // stiffness + alpha * boundary mass
    Eigen::SparseMatrix<double> M;  // volume mass (SPD)
    int dof_count = 0;
    int order = 1;
    double alpha = 0.0;
    DofMap dofs;
};

namespace detail {

// degree-5 Dunavant rule on the reference triangle (exact for the P2 mass)
struct TriQP {
    double l1, l2, l3, w;
};

inline const std::array<TriQP, 7>& tri_rule_deg5() {
    static const double a = (6.0 + std::sqrt(15.0)) / 21.0;
    static const double b = (6.0 - std::sqrt(15.0)) / 21.0;
    static const double wa = (155.0 + std::sqrt(15.0)) / 1200.0;
    static const double wb = (155.0 - std::sqrt(15.0)) / 1200.0;
    static const std::array<TriQP, 7> rule = {{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
        {1.0 - 2.0 * a, a, a, wa},
        {a, 1.0 - 2.0 * a, a, wa},
        {a, a, 1.0 - 2.0 * a, wa},
        {1.0 - 2.0 * b, b, b, wb},
        {b, 1.0 - 2.0 * b, b, wb},
        {b, b, 1.0 - 2.0 * b, wb},
    }};
    return rule;
}

// P2 shape values and barycentric-gradient coefficients at (l1,l2,l3):
// N_i = l_i (2 l_i - 1), N_{3+k} = 4 l_a l_b for edges (1,2), (2,0), (0,1)
inline void p2_shapes(double l1, double l2, double l3, double N[6], double dN[6][3]) {
    const double l[3] = {l1, l2, l3};
    for (int i = 0; i < 3; ++i) {
        N[i] = l[i] * (2.0 * l[i] - 1.0);
        for (int k = 0; k < 3; ++k) dN[i][k] = (k == i) ? 4.0 * l[i] - 1.0 : 0.0;
    }
    const int ea[3] = {1, 2, 0}, eb[3] = {2, 0, 1};
    for (int e = 0; e < 3; ++e) {
        N[3 + e] = 4.0 * l[ea[e]] * l[eb[e]];
        for (int k = 0; k < 3; ++k)
            dN[3 + e][k] = 4.0 * ((k == ea[e] ? l[eb[e]] : 0.0) +
                                  (k == eb[e] ? l[ea[e]] : 0.0));
    }
}

} // namespace detail

inline DiscreteOperator assemble(const TriMesh& mesh, double alpha, int order) {
    DiscreteOperator op;
    op.order = order;
    op.alpha = alpha;
    op.dofs = make_dof_map(mesh, order);
    op.dof_count = op.dofs.dof_count;

    std::vector<Eigen::Triplet<double>> tA, tM;
    tA.reserve(mesh.triangles.size() * (order == 1 ? 9 : 36));
    tM.reserve(tA.capacity());

    for (const auto& t : mesh.triangles) {
        const auto& p0 = mesh.vertices[t[0]];
        const auto& p1 = mesh.vertices[t[1]];
        const auto& p2 = mesh.vertices[t[2]];
        const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) -
                           (p1[1] - p0[1]) * (p2[0] - p0[0]);
        if (det <= 0.0) throw std::runtime_error("assemble: inverted element");
        const double area = 0.5 * det;
        // gradients of the barycentric coordinates
        const double gl[3][2] = {
            {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det},
            {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det},
            {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det},
        };
        if (order == 1) {
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    const double kij =
                        area * (gl[i][0] * gl[j][0] + gl[i][1] * gl[j][1]);
                    tA.emplace_back(t[i], t[j], kij);
                    tM.emplace_back(t[i], t[j], area / 12.0 * (i == j ? 2.0 : 1.0));
                }
            }
        } else {
            int gdof[6] = {t[0], t[1], t[2],
                           op.dofs.edge_dof(t[1], t[2]),
                           op.dofs.edge_dof(t[2], t[0]),
                           op.dofs.edge_dof(t[0], t[1])};
            double K[6][6] = {}, Me[6][6] = {};
            for (const auto& qp : detail::tri_rule_deg5()) {
                double N[6], dN[6][3];
                detail::p2_shapes(qp.l1, qp.l2, qp.l3, N, dN);
                double gx[6], gy[6];
                for (int i = 0; i < 6; ++i) {
                    gx[i] = dN[i][0] * gl[0][0] + dN[i][1] * gl[1][0] + dN[i][2] * gl[2][0];
                    gy[i] = dN[i][0] * gl[0][1] + dN[i][1] * gl[1][1] + dN[i][2] * gl[2][1];
                }
                const double w = qp.w * 2.0 * area;
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) {
                        K[i][j] += w * (gx[i] * gx[j] + gy[i] * gy[j]);
                        Me[i][j] += w * N[i] * N[j];
                    }
            }
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) {
                    tA.emplace_back(gdof[i], gdof[j], K[i][j]);
                    tM.emplace_back(gdof[i], gdof[j], Me[i][j]);
                }
        }
    }

    // Robin boundary mass, scaled by alpha
    for (const auto& e : mesh.boundary_edges) {
        const auto& a = mesh.vertices[e[0]];
        const auto& b = mesh.vertices[e[1]];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        if (order == 1) {
            const double c = alpha * len / 6.0;
            tA.emplace_back(e[0], e[0], 2.0 * c);
            tA.emplace_back(e[1], e[1], 2.0 * c);
            tA.emplace_back(e[0], e[1], c);
            tA.emplace_back(e[1], e[0], c);
        } else {
            // 1-D quadratic segment mass: L/30 * [4 -1 2; -1 4 2; 2 2 16]
            const int g[3] = {e[0], e[1], op.dofs.edge_dof(e[0], e[1])};
            const double c = alpha * len / 30.0;
            const double Mb[3][3] = {{4, -1, 2}, {-1, 4, 2}, {2, 2, 16}};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    tA.emplace_back(g[i], g[j], c * Mb[i][j]);
        }
    }

    const int n = op.dof_count;
    Eigen::SparseMatrix<double> A(n, n), M(n, n);
    A.setFromTriplets(tA.begin(), tA.end());
    M.setFromTriplets(tM.begin(), tM.end());
    // kill assembly round-off asymmetry so A is symmetric by construction
    op.A = 0.5 * (Eigen::SparseMatrix<double>(A.transpose()) + A);
    op.M = 0.5 * (Eigen::SparseMatrix<double>(M.transpose()) + M);
    return op;
}

} // namespace robinstab
