#pragma once

// Lowest eigenpairs of the symmetric pencil A v = lambda M v.  Small systems
// go through a dense generalized solver; larger ones use shift-invert
// Lanczos in the M-inner product with full reorthogonalization.  The shift
// is placed strictly below lambda_1 using the inertia of the LDLT
// factorization of A - sigma M (number of negative pivots = number of pencil
// eigenvalues below sigma), so the factored matrix is positive definite.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "robinstab/errors.hpp"
#include "robinstab/fem.hpp"

namespace robinstab {

struct SpectrumResult {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // M-orthonormal columns
    Eigen::VectorXd residuals;     // ||A v - lambda M v|| / ||M v||
};

namespace detail {

inline Eigen::VectorXd lcg_vector(int n) {
    Eigen::VectorXd v(n);
    std::uint64_t state = 0x2545F4914F6CDD1DULL;
    for (int i = 0; i < n; ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        v[i] = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    return v;
}

inline Eigen::VectorXd true_residuals(const DiscreteOperator& op,
                                      const Eigen::VectorXd& vals,
                                      const Eigen::MatrixXd& vecs) {
    Eigen::VectorXd res(vals.size());
    for (int i = 0; i < vals.size(); ++i) {
        const Eigen::VectorXd mv = op.M * vecs.col(i);
        res[i] = (op.A * vecs.col(i) - vals[i] * mv).norm() / mv.norm();
    }
    return res;
}

inline SpectrumResult solve_dense(const DiscreteOperator& op, int m) {
    const Eigen::MatrixXd A(op.A);
    const Eigen::MatrixXd M(op.M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
    if (es.info() != Eigen::Success)
        throw SolverError("solve_lowest: dense generalized solve failed", 1.0);
    SpectrumResult out;
    out.eigenvalues = es.eigenvalues().head(m);
    out.eigenvectors = es.eigenvectors().leftCols(m);
    out.residuals = true_residuals(op, out.eigenvalues, out.eigenvectors);
    return out;
}

inline SpectrumResult solve_lanczos(const DiscreteOperator& op, int m, double tol) {
    const int n = op.dof_count;
    using SpMat = Eigen::SparseMatrix<double>;

    // shift below lambda_1, certified by LDLT inertia
    double sigma = -1.0;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool ok = false;
    for (int attempt = 0; attempt < 12 && !ok; ++attempt) {
        SpMat K = op.A - sigma * op.M;
        ldlt.compute(K);
        if (ldlt.info() == Eigen::Success) {
            const auto& D = ldlt.vectorD();
            const double dmax = D.maxCoeff();
            if (D.minCoeff() > 1e-12 * dmax && dmax > 0.0) ok = true;
        }
        if (!ok) sigma *= 4.0;
    }
    if (!ok) throw SolverError("solve_lowest: could not place shift below spectrum", 1.0);

    const int max_basis = std::min(n, std::max(90, 12 * m + 60));
    Eigen::MatrixXd V(n, max_basis + 1);
    std::vector<double> diag, off;

    Eigen::VectorXd v = lcg_vector(n);
    v /= std::sqrt(v.dot(op.M * v));
    V.col(0) = v;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
    double beta_prev = 0.0;
    SpectrumResult best;
    double best_res = 1e300;

    for (int j = 0; j < max_basis; ++j) {
        Eigen::VectorXd w = ldlt.solve(op.M * V.col(j));
        w -= beta_prev * prev;
        const double alpha = w.dot(op.M * V.col(j));
        w -= alpha * V.col(j);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd proj = V.leftCols(j + 1).transpose() * (op.M * w);
            w -= V.leftCols(j + 1) * proj;
        }
        diag.push_back(alpha);
        double beta = std::sqrt(std::fmax(0.0, w.dot(op.M * w)));
        if (beta < 1e-14) {
            // invariant subspace: inject a fresh deterministic direction
            w = lcg_vector(n).cwiseProduct(Eigen::VectorXd::Constant(n, 1.0));
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXd proj = V.leftCols(j + 1).transpose() * (op.M * w);
                w -= V.leftCols(j + 1) * proj;
            }
            beta = std::sqrt(std::fmax(0.0, w.dot(op.M * w)));
            if (beta < 1e-14) break;
        }
        off.push_back(beta);
        prev = V.col(j);
        beta_prev = beta;
        V.col(j + 1) = w / beta;

        const int k = j + 1;
        if (k < m + 2 || (k % 8 != 0 && k != max_basis)) continue;

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            T(i, i) = diag[i];
            if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = off[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> te(T);
        // largest theta of (A - sigma M)^{-1} M  <=>  smallest pencil lambda
        std::vector<int> order(k);
        for (int i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return te.eigenvalues()[a] > te.eigenvalues()[b];
        });
        bool bounds_ok = true;
        for (int i = 0; i < m; ++i) {
            const double theta = te.eigenvalues()[order[i]];
            if (theta <= 0.0) { bounds_ok = false; break; }
            const double bound = beta * std::fabs(te.eigenvectors()(k - 1, order[i]));
            if (bound > 0.01 * tol * theta) { bounds_ok = false; break; }
        }
        if (!bounds_ok && k != max_basis) continue;

        Eigen::MatrixXd X(n, m);
        Eigen::VectorXd lam(m);
        for (int i = 0; i < m; ++i) {
            const double theta = te.eigenvalues()[order[i]];
            lam[i] = sigma + 1.0 / theta;
            X.col(i) = V.leftCols(k) * te.eigenvectors().col(order[i]);
        }
        // ascending in lambda
        for (int i = 0; i < m / 2; ++i) {
            std::swap(lam[i], lam[m - 1 - i]);
            X.col(i).swap(X.col(m - 1 - i));
        }
        // M-orthonormal cleanup
        for (int i = 0; i < m; ++i) {
            for (int l = 0; l < i; ++l)
                X.col(i) -= X.col(l).dot(op.M * X.col(i)) * X.col(l);
            X.col(i) /= std::sqrt(X.col(i).dot(op.M * X.col(i)));
        }
        SpectrumResult cand;
        cand.eigenvalues = lam;
        cand.eigenvectors = X;
        cand.residuals = true_residuals(op, lam, X);
        const double worst = cand.residuals.maxCoeff();
        if (worst < best_res) {
            best_res = worst;
            best = std::move(cand);
        }
        if (best_res <= tol) return best;
    }
    if (best_res <= tol) return best;
    throw SolverError("solve_lowest: Lanczos did not reach tolerance", best_res);
}

} // namespace detail

/// The m algebraically smallest eigenpairs of A v = lambda M v, ascending,
/// with M-orthonormal eigenvectors and residuals ||Av - lambda Mv||/||Mv||
/// at or below tol.  Deterministic for fixed inputs.
inline SpectrumResult solve_lowest(const DiscreteOperator& op, int m, double tol) {
    if (m < 1 || m > op.dof_count)
        throw std::invalid_argument("solve_lowest: need 1 <= m <= dof_count");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_lowest: tol must be > 0");
    if (op.dof_count <= 600) {
        SpectrumResult r = detail::solve_dense(op, m);
        if (r.residuals.maxCoeff() > tol)
            throw SolverError("solve_lowest: dense residual above tolerance",
                              r.residuals.maxCoeff());
        return r;
    }
    try {
        return detail::solve_lanczos(op, m, tol);
    } catch (const SolverError&) {
        if (op.dof_count <= 3000) {
            SpectrumResult r = detail::solve_dense(op, m);
            if (r.residuals.maxCoeff() <= tol) return r;
        }
        throw;
    }
}

/// Reflection permutation on the dofs of the given order (axis 'x' flips the
/// first coordinate, 'y' the second).  Mesh must be symmetry-built.
inline std::vector<int> dof_reflection(const TriMesh& mesh, int order, char axis) {
    const std::vector<int> vperm = vertex_reflection(mesh, axis);
    if (order == 1) return vperm;
    const DofMap dm = make_dof_map(mesh, order);
    std::vector<int> perm(dm.dof_count);
    for (int i = 0; i < dm.n_vertices; ++i) perm[i] = vperm[i];
    for (const auto& [edge, idx] : dm.edge_index) {
        const auto rkey = std::minmax(vperm[edge.first], vperm[edge.second]);
        const auto it = dm.edge_index.find(rkey);
        if (it == dm.edge_index.end())
            throw std::invalid_argument("dof_reflection: edge set not reflection-closed");
        perm[dm.n_vertices + idx] = dm.n_vertices + it->second;
    }
    return perm;
}

/// v composed with the reflection: out_i = v_{perm(i)}.
inline Eigen::VectorXd apply_reflection(const std::vector<int>& perm,
                                        const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (int i = 0; i < v.size(); ++i) out[i] = v[perm[i]];
    return out;
}

/// Indices [first, last] of the eigenvalue cluster containing position 1
/// (the lambda_2 group) at the given relative gap threshold.  Throws
/// ClusterError when the cluster cannot be delimited with the computed set.
inline std::pair<int, int> lambda2_cluster(const Eigen::VectorXd& vals,
                                           double gap_threshold = 1e-3) {
    const int n = static_cast<int>(vals.size());
    if (n < 3) throw ClusterError("lambda2_cluster: need at least 3 eigenvalues");
    const auto rel_gap = [&](int i) {
        const double scale = std::fmax(std::fabs(vals[i + 1]), std::fabs(vals[i]));
        return (vals[i + 1] - vals[i]) / std::fmax(scale, 1e-30);
    };
    if (rel_gap(0) <= gap_threshold)
        throw ClusterError("lambda2_cluster: lambda_1 not separated from lambda_2");
    int last = 1;
    while (last + 1 < n && rel_gap(last) <= gap_threshold) ++last;
    if (last == n - 1)
        throw ClusterError("lambda2_cluster: cluster reaches the last computed pair");
    return {1, last};
}

/// min over unit vectors v in the discrete lambda_2 eigenspace of
/// ||v + v o reflection||_M / ||v||_M; near zero certifies an eigenfunction
/// anti-symmetric across the chosen axis.
inline double antisymmetry_defect(const SpectrumResult& res, const TriMesh& mesh,
                                  const DiscreteOperator& op, char axis) {
    const auto [first, last] = lambda2_cluster(res.eigenvalues);
    const std::vector<int> perm = dof_reflection(mesh, op.order, axis);
    const int k = last - first + 1;
    Eigen::MatrixXd W(op.dof_count, k);
    for (int i = 0; i < k; ++i) {
        const Eigen::VectorXd v = res.eigenvectors.col(first + i);
        W.col(i) = v + apply_reflection(perm, v);
    }
    const Eigen::MatrixXd G = W.transpose() * (op.M * W);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(G);
    return std::sqrt(std::fmax(0.0, ge.eigenvalues().minCoeff()));
}

/// Convenience overload: infers the element order from the eigenvector size
/// and reassembles the mass matrix from the mesh.
inline double antisymmetry_defect(const SpectrumResult& res, const TriMesh& mesh,
                                  char axis) {
    const int rows = static_cast<int>(res.eigenvectors.rows());
    const int order = rows == static_cast<int>(mesh.vertices.size()) ? 1 : 2;
    const DiscreteOperator op = assemble(mesh, 0.0, order);
    if (op.dof_count != rows)
        throw std::invalid_argument("antisymmetry_defect: result does not match mesh");
    return antisymmetry_defect(res, mesh, op, axis);
}

} // namespace robinstab
