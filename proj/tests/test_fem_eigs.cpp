#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "robinstab/ball_spectrum.hpp"
#include "robinstab/eigensolver.hpp"
#include "robinstab/fem.hpp"
#include "robinstab/mesh.hpp"

using namespace robinstab;

namespace {

constexpr double kDiskLambda2 = 1.840369060844358;  // alpha = -0.5, R = 1

double disk_lambda2_fem(double h, int order, double alpha = -0.5) {
    const auto disk = make_star_domain(1.0, 0.0, {}, true);
    MeshOptions opt;
    if (order == 2) opt.grade_depth = grade_depth_for_quartic(h, 1.0);
    const TriMesh mesh = triangulate(disk, h, opt);
    const DiscreteOperator op = assemble(mesh, alpha, order);
    return solve_lowest(op, 3, 1e-7).eigenvalues[1];
}

} // namespace

TEST_CASE("assembled forms reproduce perimeter and area on constants") {
    const auto dom = make_star_domain(1.0, 0.1, {{4, 1.0}}, true);
    const TriMesh mesh = triangulate(dom, 0.1);
    for (int order : {1, 2}) {
        const DiscreteOperator op = assemble(mesh, -0.37, order);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.dof_count);
        INFO("order " << order);
        CHECK(ones.dot(op.A * ones) ==
              Catch::Approx(-0.37 * mesh_perimeter(mesh)).margin(1e-12));
        CHECK(ones.dot(op.M * ones) == Catch::Approx(mesh_area(mesh)).margin(1e-12));
        // symmetric by construction
        const Eigen::SparseMatrix<double> diff =
            Eigen::SparseMatrix<double>(op.A.transpose()) - op.A;
        CHECK((diff.coeffs().size() == 0 || diff.coeffs().cwiseAbs().maxCoeff() == 0.0));
    }
}

TEST_CASE("Neumann kernel: alpha = 0 gives a zero mode of constants") {
    const auto disk = make_star_domain(1.0, 0.0, {}, true);
    const TriMesh mesh = triangulate(disk, 0.2);
    for (int order : {1, 2}) {
        const DiscreteOperator op = assemble(mesh, 0.0, order);
        const auto res = solve_lowest(op, 3, 1e-8);
        INFO("order " << order);
        CHECK(std::fabs(res.eigenvalues[0]) <= 1e-9);
        CHECK(res.eigenvalues[1] > 1.0);
    }
}

TEST_CASE("disk eigenvalues: multiplicity pair and solver contracts") {
    const auto disk = make_star_domain(1.0, 0.0, {}, true);
    const TriMesh mesh = triangulate(disk, 0.05);
    const DiscreteOperator op = assemble(mesh, -0.5, 1);
    const auto res = solve_lowest(op, 4, 1e-7);

    CHECK(res.eigenvalues[0] < 0.0);               // lambda_1 < 0 for alpha < 0
    CHECK(res.eigenvalues[1] > 0.0);
    // ascending
    for (int i = 0; i + 1 < 4; ++i) CHECK(res.eigenvalues[i] <= res.eigenvalues[i + 1]);
    // the double pair is split only by round-off on the symmetric mesh
    CHECK((res.eigenvalues[2] - res.eigenvalues[1]) / res.eigenvalues[1] <= 1e-3);
    // residual contract
    CHECK(res.residuals.maxCoeff() <= 1e-7);
    // M-orthonormality
    const Eigen::MatrixXd G =
        res.eigenvectors.transpose() * (op.M * res.eigenvectors);
    CHECK((G - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
    // analytic lambda_1 of the disk
    CHECK(res.eigenvalues[0] ==
          Catch::Approx(lambda1_ball(BallSpec(2, 1.0), -0.5)).margin(4e-3));

    CHECK_THROWS_AS(solve_lowest(op, 0, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(solve_lowest(op, 3, -1.0), std::invalid_argument);
}

TEST_CASE("dense and Lanczos routes agree") {
    const auto disk = make_star_domain(1.0, 0.0, {}, true);
    const TriMesh mesh = triangulate(disk, 0.24);  // small: dense path
    const DiscreteOperator op = assemble(mesh, -0.5, 1);
    REQUIRE(op.dof_count <= 600);
    const auto dense = detail::solve_dense(op, 3);
    const auto lanczos = detail::solve_lanczos(op, 3, 1e-9);
    for (int i = 0; i < 3; ++i)
        CHECK(lanczos.eigenvalues[i] == Catch::Approx(dense.eigenvalues[i]).margin(1e-8));
}

TEST_CASE("P1 convergence to the analytic disk value") {
    double err_prev = -1.0;
    for (double h : {0.08, 0.04, 0.02}) {
        const double err = std::fabs(disk_lambda2_fem(h, 1) - kDiskLambda2);
        if (err_prev > 0.0) {
            const double order = std::log2(err_prev / err);
            INFO("h=" << h << " err=" << err << " order=" << order);
            CHECK(order >= 1.7);
            CHECK(order <= 2.3);
        }
        err_prev = err;
    }
}

TEST_CASE("P2 convergence on boundary-graded meshes") {
    double err_prev = -1.0;
    for (double h : {0.2, 0.1, 0.05}) {
        const double err = std::fabs(disk_lambda2_fem(h, 2) - kDiskLambda2);
        if (err_prev > 0.0) {
            const double order = std::log2(err_prev / err);
            INFO("h=" << h << " err=" << err << " order=" << order);
            CHECK(order >= 3.4);
            CHECK(order <= 4.6);
        }
        err_prev = err;
    }
}

TEST_CASE("Galerkin monotonicity under nested refinement") {
    const auto disk = make_star_domain(1.0, 0.0, {}, true);
    TriMesh mesh = triangulate(disk, 0.25);
    double prev = 1e300;
    for (int level = 0; level < 3; ++level) {
        const DiscreteOperator op = assemble(mesh, -0.5, 1);
        const double l2 = solve_lowest(op, 3, 1e-8).eigenvalues[1];
        INFO("level " << level);
        CHECK(l2 <= prev + 1e-10);
        prev = l2;
        if (level < 2) mesh = uniform_refine(mesh);
    }
}

TEST_CASE("scaling relation on FEM meshes") {
    const auto dom = make_star_domain(1.0, 0.1, {{4, 1.0}}, true);
    const TriMesh mesh = triangulate(dom, 0.08);
    TriMesh scaled = mesh;
    for (auto& v : scaled.vertices) { v[0] *= 2.0; v[1] *= 2.0; }
    scaled.h *= 2.0;
    const auto res1 = solve_lowest(assemble(mesh, -0.5, 1), 3, 1e-8);
    const auto res2 = solve_lowest(assemble(scaled, -0.25, 1), 3, 1e-8);
    for (int k = 0; k < 2; ++k) {
        INFO("k=" << k + 1);
        CHECK(4.0 * res2.eigenvalues[k] ==
              Catch::Approx(res1.eigenvalues[k]).epsilon(1e-6));
    }
}

TEST_CASE("antisymmetry defect on the disk") {
    const auto disk = make_star_domain(1.0, 0.0, {}, true);
    const TriMesh mesh = triangulate(disk, 0.06);
    const DiscreteOperator op = assemble(mesh, -0.5, 1);
    const auto res = solve_lowest(op, 5, 1e-8);
    for (char axis : {'x', 'y'}) {
        INFO("axis " << axis);
        CHECK(antisymmetry_defect(res, mesh, op, axis) <= 1e-6);
    }
    // the overload that reassembles M agrees
    CHECK(antisymmetry_defect(res, mesh, 'x') ==
          Catch::Approx(antisymmetry_defect(res, mesh, op, 'x')).margin(1e-10));
}

TEST_CASE("antisymmetry defect on the cos 4 theta domain, P1 and P2") {
    const auto dom = make_star_domain(1.0, 0.04, {{4, 1.0}}, true);
    const TriMesh mesh = triangulate(dom, 0.07);
    for (int order : {1, 2}) {
        const DiscreteOperator op = assemble(mesh, -0.5, order);
        const auto res = solve_lowest(op, 5, 1e-8);
        const double dx = antisymmetry_defect(res, mesh, op, 'x');
        const double dy = antisymmetry_defect(res, mesh, op, 'y');
        INFO("order " << order << " dx=" << dx << " dy=" << dy);
        CHECK(std::min(dx, dy) <= 1e-4);
    }
}

TEST_CASE("symmetrized vectors have the maximal reflection norm") {
    const auto dom = make_star_domain(1.0, 0.05, {{4, 1.0}}, true);
    const TriMesh mesh = triangulate(dom, 0.12);
    const DiscreteOperator op = assemble(mesh, -0.5, 1);
    const auto perm = dof_reflection(mesh, 1, 'x');
    Eigen::VectorXd v = detail::lcg_vector(op.dof_count);
    Eigen::VectorXd even = 0.5 * (v + apply_reflection(perm, v));
    const double num = (even + apply_reflection(perm, even)).dot(
        op.M * (even + apply_reflection(perm, even)));
    const double den = even.dot(op.M * even);
    CHECK(std::sqrt(num / den) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("cluster detection edge cases") {
    Eigen::VectorXd vals(4);
    vals << -1.0, 2.0, 2.0000001, 5.0;
    const auto [first, last] = lambda2_cluster(vals);
    CHECK(first == 1);
    CHECK(last == 2);
    // cluster running to the end of the computed set is ambiguous
    Eigen::VectorXd open_end(3);
    open_end << -1.0, 2.0, 2.0000001;
    CHECK_THROWS_AS(lambda2_cluster(open_end), ClusterError);
    // lambda_1 glued to lambda_2 is ambiguous as well
    Eigen::VectorXd glued(4);
    glued << 2.0, 2.0000001, 2.0000002, 5.0;
    CHECK_THROWS_AS(lambda2_cluster(glued), ClusterError);
}
