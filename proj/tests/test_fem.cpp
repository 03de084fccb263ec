#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tpat/error.hpp"
#include "tpat/fem.hpp"
#include "tpat/io.hpp"

using namespace tpat;

TEST_CASE("unit stiffness on the two-triangle mesh matches hand integration") {
  // Each right isosceles triangle contributes 1 at the right-angle vertex,
  // 1/2 at the other two, -1/2 along the legs and 0 along the hypotenuse.
  auto mesh = build_square_mesh(1);
  auto k = oracle::to_dense(assemble_stiffness(mesh, NodalField(4, 1.0)));
  oracle::MatrixXd expected(4, 4);
  expected << 1.0, -0.5, -0.5, 0.0,  //
      -0.5, 1.0, 0.0, -0.5,          //
      -0.5, 0.0, 1.0, -0.5,          //
      0.0, -0.5, -0.5, 1.0;
  CHECK((k - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stiffness: constants in the kernel, linear in gamma, symmetric, PSD") {
  std::mt19937_64 rng(3);
  for (int n : {1, 4, 12}) {
    auto mesh = build_square_mesh(n);
    NodalField gamma(oracle::random_field(rng, mesh.num_nodes(), 0.1, 3.0));
    auto k = assemble_stiffness(mesh, gamma);

    auto k1 = multiply(k, std::vector<double>(mesh.num_nodes(), 1.0));
    for (double v : k1) CHECK(std::abs(v) < 1e-12);

    NodalField g2 = gamma;
    for (auto& v : g2) v *= 2.0;
    auto kk = assemble_stiffness(mesh, g2);
    for (std::size_t i = 0; i < k.nnz(); ++i) CHECK(kk.val[i] == 2.0 * k.val[i]);

    CHECK(k.max_asymmetry() <= 1e-14 * k.max_abs());

    for (int trial = 0; trial < 5; ++trial) {
      auto x = oracle::random_field(rng, mesh.num_nodes(), -1.0, 1.0);
      auto kx = multiply(k, x);
      double xkx = 0.0, xx = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        xkx += x[i] * kx[i];
        xx += x[i] * x[i];
      }
      CHECK(xkx >= -1e-12 * xx);
    }
  }
}

TEST_CASE("stiffness matches the independent dense assembly") {
  std::mt19937_64 rng(5);
  auto mesh = build_square_mesh(6);
  auto gamma = oracle::random_field(rng, mesh.num_nodes(), 0.1, 3.0);
  auto k = oracle::to_dense(assemble_stiffness(mesh, NodalField(gamma)));
  auto ref = oracle::dense_stiffness(mesh, gamma);
  CHECK((k - ref).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("weighted mass") {
  SUBCASE("unit weight integrates to the domain area") {
    auto mesh = build_square_mesh(1);
    auto m = assemble_weighted_mass(mesh, NodalField(4, 1.0));
    double total = 0.0;
    for (double v : m.val) total += v;
    CHECK(total == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("constant weight scales the unweighted matrix") {
    auto mesh = build_square_mesh(3);
    auto m1 = assemble_weighted_mass(mesh, NodalField(mesh.num_nodes(), 1.0));
    auto mc = assemble_weighted_mass(mesh, NodalField(mesh.num_nodes(), 2.5));
    for (std::size_t i = 0; i < m1.nnz(); ++i) CHECK(mc.val[i] == doctest::Approx(2.5 * m1.val[i]).epsilon(1e-15));
  }
  SUBCASE("x-coordinate weight against high-order quadrature") {
    auto mesh = build_square_mesh(2);
    NodalField w(mesh.num_nodes());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = mesh.nodes()[i].x;
    auto m = oracle::to_dense(assemble_weighted_mass(mesh, w));

    oracle::MatrixXd ref = oracle::MatrixXd::Zero(mesh.num_nodes(), mesh.num_nodes());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          ref(tri[a], tri[b]) += oracle::integrate(mesh, t, [&](double x, double y) {
            auto l = oracle::barycentric(mesh, t, x, y);
            return x * l(a) * l(b);
          });
        }
      }
    }
    CHECK((m - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("positive weight gives a positive definite matrix") {
    std::mt19937_64 rng(9);
    auto mesh = build_square_mesh(4);
    auto m = oracle::to_dense(assemble_weighted_mass(mesh, NodalField(oracle::random_field(rng, mesh.num_nodes(), 0.1, 1.0))));
    Eigen::SelfAdjointEigenSolver<oracle::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * m.cwiseAbs().maxCoeff());
  }
  SUBCASE("dimension mismatch") {
    auto mesh = build_square_mesh(2);
    CHECK_THROWS_AS(assemble_weighted_mass(mesh, NodalField(3, 1.0)), ValidationError);
    CHECK_THROWS_AS(assemble_stiffness(mesh, NodalField(3, 1.0)), ValidationError);
  }
}

TEST_CASE("lumped mass sums to the area") {
  auto mesh = build_square_mesh(7);
  double s = 0.0;
  for (double v : lumped_mass(mesh)) s += v;
  CHECK(s == doctest::Approx(4.0).epsilon(1e-13));
}

namespace {

BoundaryValues boundary_from(const Mesh& mesh, double (*g)(double, double)) {
  BoundaryValues bv;
  for (int b : mesh.boundary_nodes()) bv[b] = g(mesh.nodes()[b].x, mesh.nodes()[b].y);
  return bv;
}

}  // namespace

TEST_CASE("Dirichlet elimination") {
  SUBCASE("all-boundary mesh reproduces the data") {
    auto mesh = build_square_mesh(1);
    auto k = assemble_stiffness(mesh, NodalField(4, 1.0));
    BoundaryValues bv{{0, 1.0}, {1, 2.0}, {2, 3.0}, {3, 4.0}};
    auto [a, b] = apply_dirichlet(mesh, k, std::vector<double>(4, 0.0), bv);
    auto u = solve_linear(a, b);
    CHECK(u == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  }
  SUBCASE("homogeneous values zero the boundary rows and keep symmetry") {
    auto mesh = build_square_mesh(3);
    auto k = assemble_stiffness(mesh, NodalField(mesh.num_nodes(), 1.0));
    BoundaryValues bv;
    for (int b : mesh.boundary_nodes()) bv[b] = 0.0;
    auto [a, b] = apply_dirichlet(mesh, k, std::vector<double>(mesh.num_nodes(), 1.0), bv);
    for (int node : mesh.boundary_nodes()) CHECK(b[node] == 0.0);
    CHECK(a.max_asymmetry() == 0.0);
  }
  SUBCASE("linear exact solution is reproduced by P1") {
    auto mesh = build_square_mesh(4);
    auto k = assemble_stiffness(mesh, NodalField(mesh.num_nodes(), 1.0));
    auto [a, b] = apply_dirichlet(mesh, k, std::vector<double>(mesh.num_nodes(), 0.0),
                                  boundary_from(mesh, [](double x, double) { return x; }));
    auto u = solve_linear(a, b, 1e-14);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - mesh.nodes()[i].x) < 1e-12);
  }
  SUBCASE("value on an interior node is rejected") {
    auto mesh = build_square_mesh(2);
    auto k = assemble_stiffness(mesh, NodalField(9, 1.0));
    CHECK_THROWS_AS(apply_dirichlet(mesh, k, std::vector<double>(9, 0.0), {{4, 1.0}}), ValidationError);
  }
}

TEST_CASE("solve_linear") {
  SUBCASE("identity") {
    auto a = oracle::from_dense(oracle::MatrixXd::Identity(5, 5));
    std::vector<double> b{1, -2, 3, 0.5, 7};
    auto x = solve_linear(a, b);
    for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-14));
  }
  SUBCASE("2x2 by hand") {
    oracle::MatrixXd d(2, 2);
    d << 2, 1, 1, 2;
    auto x = solve_linear(oracle::from_dense(d), std::vector<double>{3, 3}, 1e-14);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("random SPD against dense Cholesky") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    oracle::MatrixXd b(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) b(i, j) = nd(rng);
    oracle::MatrixXd spd = b * b.transpose() + 50.0 * oracle::MatrixXd::Identity(50, 50);
    oracle::VectorXd rhs(50);
    for (int i = 0; i < 50; ++i) rhs(i) = nd(rng);
    const double tol = 1e-10;
    LinearSolveInfo info;
    auto x = solve_linear(oracle::from_dense(spd), std::span<const double>(rhs.data(), 50), tol, &info);
    oracle::VectorXd ref = spd.llt().solve(rhs);
    oracle::VectorXd xv = Eigen::Map<oracle::VectorXd>(x.data(), 50);
    CHECK((spd * xv - rhs).norm() / rhs.norm() <= tol);
    CHECK((xv - ref).norm() / ref.norm() < 1e-8);
    CHECK(info.relative_residual <= tol);
  }
  SUBCASE("non-convergence reports the residual") {
    oracle::MatrixXd d(2, 2);
    d << 1, 2, 2, 1;  // indefinite
    CHECK_THROWS_WITH_AS(solve_linear(oracle::from_dense(d), std::vector<double>{1, 0}),
                         doctest::Contains("residual"), SolverError);
  }
}

TEST_CASE("h-refinement: second-order L2 convergence on a manufactured problem") {
  // -lap u + u = f with u = exp(x + y), f = -exp(x + y).
  auto exact = [](double x, double y) { return std::exp(x + y); };
  std::vector<double> errs;
  for (int n : {8, 16, 32}) {
    auto mesh = build_square_mesh(n);
    const std::size_t nn = mesh.num_nodes();
    auto k = assemble_stiffness(mesh, NodalField(nn, 1.0));
    auto lm = lumped_mass(mesh);
    std::vector<double> rhs(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      const auto& p = mesh.nodes()[i];
      k.val[k.find(static_cast<int>(i), static_cast<int>(i))] += lm[i];
      rhs[i] = -lm[i] * exact(p.x, p.y);
    }
    BoundaryValues bv;
    for (int b : mesh.boundary_nodes()) bv[b] = exact(mesh.nodes()[b].x, mesh.nodes()[b].y);
    auto [a, b] = apply_dirichlet(mesh, k, rhs, bv);
    auto u = solve_linear(a, b, 1e-13);
    NodalField err(nn);
    for (std::size_t i = 0; i < nn; ++i) err[i] = u[i] - exact(mesh.nodes()[i].x, mesh.nodes()[i].y);
    errs.push_back(l2_norm(mesh, err));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double rate = std::log2(errs[i - 1] / errs[i]);
    CAPTURE(rate);
    CHECK(rate >= 1.8);
    CHECK(rate <= 2.2);
  }
}

TEST_CASE("NodalField CSV") {
  auto p = std::filesystem::temp_directory_path() / "tpat_test_field.csv";
  NodalField f(std::vector<double>{0.1, -2.5e-300, 3.0, 1.0 / 3.0});
  save_field(f, p);
  CHECK(tpat::read_text_file(p).rfind("node,value\n0,0.1\n", 0) == 0);
  CHECK(load_field(p) == f);
}
