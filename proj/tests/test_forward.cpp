#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tpat/forward.hpp"
#include "tpat/metrics.hpp"

using namespace tpat;

namespace {

CoefficientSet constant_coeffs(std::size_t n, double gamma, double sigma, double mu) {
  return {NodalField(n, 1.0), NodalField(n, gamma), NodalField(n, sigma), NodalField(n, mu)};
}

CoefficientSet random_coeffs(std::mt19937_64& rng, const Mesh& mesh) {
  return {NodalField(oracle::smooth_random_field(rng, mesh, 0.5, 2.0)),
          NodalField(oracle::smooth_random_field(rng, mesh, 0.02, 0.3)),
          NodalField(oracle::smooth_random_field(rng, mesh, 0.01, 1.0)),
          NodalField(oracle::smooth_random_field(rng, mesh, 0.01, 0.5))};
}

}  // namespace

TEST_CASE("zero source gives the zero solution") {
  auto mesh = build_square_mesh(6);
  auto c = constant_coeffs(mesh.num_nodes(), 0.1, 0.2, 0.3);
  auto sol = solve_semilinear(mesh, c, BoundarySource::constant(mesh, 0.0));
  for (double v : sol.u) CHECK(v == 0.0);
  CHECK(sol.report.converged);
}

TEST_CASE("mu = 0 reduces to the linear problem") {
  std::mt19937_64 rng(2);
  auto mesh = build_square_mesh(10);
  auto c = random_coeffs(rng, mesh);
  c.mu = NodalField(mesh.num_nodes(), 0.0);
  auto g = BoundarySource::from_function(mesh, [](double x, double y) { return 1.0 + 0.3 * x - 0.2 * y; });
  auto sol = solve_semilinear(mesh, c, g);

  // Independent dense linear solve.
  auto k = oracle::dense_stiffness(mesh, c.gamma.values());
  auto m = oracle::dense_lumped(mesh);
  const int n = static_cast<int>(mesh.num_nodes());
  oracle::MatrixXd a = k;
  for (int i = 0; i < n; ++i) a(i, i) += m(i) * c.sigma[i];
  oracle::VectorXd rhs = oracle::VectorXd::Zero(n);
  const auto& bn = mesh.boundary_nodes();
  for (std::size_t b = 0; b < bn.size(); ++b) {
    a.row(bn[b]).setZero();
    a(bn[b], bn[b]) = 1.0;
    rhs(bn[b]) = g.values[b];
  }
  oracle::VectorXd ref = a.partialPivLu().solve(rhs);
  for (int i = 0; i < n; ++i) CHECK(std::abs(sol.u[i] - ref(i)) < 1e-10);
}

TEST_CASE("n=2, constant coefficients, g = 1 matches dense Newton") {
  auto mesh = build_square_mesh(2);
  auto c = constant_coeffs(9, 0.1, 0.3, 0.5);
  auto g = BoundarySource::constant(mesh, 1.0);
  auto sol = solve_semilinear(mesh, c, g);
  auto ref = oracle::dense_newton(mesh, c.gamma.values(), c.sigma.values(), c.mu.values(), g.values);
  for (int i = 0; i < 9; ++i) CHECK(std::abs(sol.u[i] - ref(i)) < 1e-10);
}

TEST_CASE("random coefficients match dense Newton") {
  std::mt19937_64 rng(11);
  auto mesh = build_square_mesh(5);
  for (int trial = 0; trial < 3; ++trial) {
    auto c = random_coeffs(rng, mesh);
    auto g = BoundarySource::from_function(mesh, [](double x, double y) { return 2.0 + std::sin(x) * y; });
    auto sol = solve_semilinear(mesh, c, g);
    auto ref = oracle::dense_newton(mesh, c.gamma.values(), c.sigma.values(), c.mu.values(), g.values);
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) CHECK(std::abs(sol.u[i] - ref(i)) < 1e-10);
  }
}

TEST_CASE("Newton residual history is monotone") {
  std::mt19937_64 rng(4);
  auto mesh = build_square_mesh(16);
  auto c = random_coeffs(rng, mesh);
  for (auto& v : c.mu) v *= 20.0;
  auto sol = solve_semilinear(mesh, c, BoundarySource::constant(mesh, 5.0));
  const auto& h = sol.report.residual_history;
  REQUIRE(h.size() >= 2);
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] < h[i - 1]);
  CHECK(sol.report.converged);
  CHECK(h.back() <= NewtonConfig{}.residual_tol);
}

TEST_CASE("iteration cap raises NewtonError with the report") {
  auto mesh = build_square_mesh(8);
  auto c = constant_coeffs(mesh.num_nodes(), 0.1, 0.5, 1.0);
  NewtonConfig cfg;
  cfg.max_iterations = 1;
  cfg.residual_tol = 1e-30;
  try {
    solve_semilinear(mesh, c, BoundarySource::constant(mesh, 3.0), cfg);
    FAIL("expected NewtonError");
  } catch (const NewtonError& e) {
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().residual_history.size() >= 1);
  }
}

TEST_CASE("solutions obey the maximum, positivity and comparison properties") {
  std::mt19937_64 rng(8);
  auto mesh = build_square_mesh(12);
  for (int trial = 0; trial < 5; ++trial) {
    auto c = random_coeffs(rng, mesh);
    auto g1 = BoundarySource::from_function(mesh, [](double x, double) { return 0.5 + 0.2 * (x + 1.0); });
    auto g2 = g1;
    for (auto& v : g2.values) v += 0.3;
    auto u1 = solve_semilinear(mesh, c, g1).u;
    auto u2 = solve_semilinear(mesh, c, g2).u;
    CHECK(check_max_principle(mesh, u1, g1).pass);
    CHECK(check_positivity(mesh, u1, g1, 0.5).pass);
    CHECK(check_comparison(mesh, u2, u1).pass);
  }
}

TEST_CASE("compute_datum arithmetic") {
  auto one = [](double v) { return NodalField(1, v); };
  CHECK(compute_datum({one(1), one(1), one(2), one(3)}, one(2))[0] == 16.0);
  CHECK(compute_datum({one(1), one(1), one(2), one(3)}, one(0))[0] == 0.0);
  CHECK(compute_datum({one(1), one(1), one(1), one(1)}, one(-1))[0] == -2.0);
}

TEST_CASE("add_noise") {
  NodalField h(1000, 1.0);
  CHECK(add_noise(h, 0.0, 7) == h);

  auto noisy = add_noise(h, 5.0, 7);
  const double bound = std::sqrt(3.0) * 0.05;
  for (double v : noisy) {
    CHECK(v >= 1.0 - bound);
    CHECK(v <= 1.0 + bound);
  }
  CHECK(add_noise(h, 5.0, 7) == noisy);
  CHECK_FALSE(add_noise(h, 5.0, 8) == noisy);

  NodalField big(1000000, 1.0);
  auto m = add_noise(big, 2.0, 12345);
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= static_cast<double>(m.size());
  double var = 0.0;
  for (double v : m) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(m.size() - 1));
  CHECK(sd == doctest::Approx(0.02).epsilon(0.01));

  CHECK_THROWS_AS(add_noise(h, -1.0, 1), ValidationError);
}

TEST_CASE("derive_seed gives distinct streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 3) == derive_seed(1, 3));
}

TEST_CASE("boundary source validation") {
  auto mesh = build_square_mesh(2);
  auto g = BoundarySource::constant(mesh, 0.5);
  CHECK_NOTHROW(g.require_positive(0.5));
  CHECK_THROWS_AS(g.require_positive(0.6), ValidationError);
  BoundarySource bad{{1.0, 2.0}};
  auto c = constant_coeffs(9, 0.1, 0.1, 0.1);
  CHECK_THROWS_AS(solve_semilinear(mesh, c, bad), ValidationError);
}
