#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tpat/metrics.hpp"
#include "tpat/pipeline.hpp"
#include "tpat/recon_direct.hpp"

using namespace tpat;

namespace {

NodalField one(double v) { return NodalField(1, v); }

}  // namespace

TEST_CASE("recover_field reproduces the forward solution from noiseless data") {
  std::mt19937_64 rng(1);
  auto mesh = build_square_mesh(16);
  CoefficientSet c{NodalField(oracle::smooth_random_field(rng, mesh, 0.5, 1.5)),
                   NodalField(oracle::smooth_random_field(rng, mesh, 0.05, 0.3)),
                   NodalField(oracle::smooth_random_field(rng, mesh, 0.05, 0.5)),
                   NodalField(oracle::smooth_random_field(rng, mesh, 0.01, 0.2))};
  auto g = BoundarySource::from_function(mesh, [](double x, double y) { return 1.0 + 0.2 * x - 0.1 * y; });
  auto u = solve_semilinear(mesh, c, g).u;
  auto h = compute_datum(c, u);
  auto us = recover_field(mesh, c.gruneisen, c.gamma, h, g);
  NodalField diff(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) diff[i] = us[i] - u[i];
  CHECK(l2_norm(mesh, diff) <= 1e-8 * l2_norm(mesh, u));

  SUBCASE("scaling H and Gruneisen together changes nothing") {
    NodalField h2 = h, gr2 = c.gruneisen;
    for (auto& v : h2) v *= 2.0;
    for (auto& v : gr2) v *= 2.0;
    CHECK(recover_field(mesh, gr2, c.gamma, h2, g) == us);
  }
}

TEST_CASE("zero datum with constant source gives a constant field") {
  auto mesh = build_square_mesh(8);
  const std::size_t n = mesh.num_nodes();
  auto us = recover_field(mesh, NodalField(n, 1.0), NodalField(n, 0.3), NodalField(n, 0.0),
                          BoundarySource::constant(mesh, 0.7));
  for (double v : us) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("pointwise formulas") {
  CHECK(recover_sigma(one(16), one(1), one(2), one(3))[0] == doctest::Approx(2.0));
  CHECK(recover_sigma(one(3), one(1.5), one(4), one(0))[0] == doctest::Approx(3.0 / 6.0));
  CHECK(recover_mu(one(16), one(1), one(2), one(2))[0] == doctest::Approx(3.0));
  // sigma_known = H / (Gruneisen u) leaves nothing for mu.
  CHECK(recover_mu(one(5), one(2), one(1.25), one(2.0))[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("densities below the floor are rejected with the node") {
  NodalField u(std::vector<double>{1.0, 1e-14, 2.0});
  NodalField h(3, 1.0), gr(3, 1.0), other(3, 0.1);
  CHECK_THROWS_WITH_AS(recover_sigma(h, gr, u, other), doctest::Contains("node(s): 1"), ValidationError);
  CHECK_THROWS_AS(recover_mu(h, gr, u, other), ValidationError);
}

TEST_CASE("fit_line") {
  double s = 0.0, m = 0.0;
  std::vector<double> a{1.0, 2.0}, r{0.3, 0.5};
  REQUIRE(fit_line(a, r, s, m));
  CHECK(s == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m == doctest::Approx(0.2).epsilon(1e-14));

  // Overdetermined consistent system.
  std::vector<double> a4{0.5, 1.0, 2.0, 4.0}, r4(4);
  for (int j = 0; j < 4; ++j) r4[j] = 0.07 + 0.013 * a4[j];
  REQUIRE(fit_line(a4, r4, s, m));
  CHECK(s == doctest::Approx(0.07).epsilon(1e-13));
  CHECK(m == doctest::Approx(0.013).epsilon(1e-13));

  // Least squares against the dense normal equations.
  std::vector<double> rn{0.1, 0.4, 0.2, 0.9};
  REQUIRE(fit_line(a4, rn, s, m));
  oracle::MatrixXd A(4, 2);
  oracle::VectorXd b(4);
  for (int j = 0; j < 4; ++j) {
    A(j, 0) = 1.0;
    A(j, 1) = a4[j];
    b(j) = rn[j];
  }
  oracle::VectorXd x = A.colPivHouseholderQr().solve(b);
  CHECK(s == doctest::Approx(x(0)).epsilon(1e-12));
  CHECK(m == doctest::Approx(x(1)).epsilon(1e-12));

  std::vector<double> flat{1.0, 1.0}, rf{0.3, 0.4};
  CHECK_FALSE(fit_line(flat, rf, s, m));
}

TEST_CASE("noiseless pair reconstruction of the default phantom") {
  auto cfg = default_config();
  auto clean = generate_clean_data(cfg);
  auto data = make_datum_set(clean, clean.truth.mesh, clean.truth.sources, 0.0, 1);
  auto rec = recover_pair(clean.truth.mesh, clean.truth.coeffs.gruneisen, clean.truth.coeffs.gamma, data);
  CHECK(relative_l2_error(rec.sigma, clean.truth.coeffs.sigma, clean.truth.mesh) <= 0.5);
  CHECK(relative_l2_error(rec.mu, clean.truth.coeffs.mu, clean.truth.mesh) <= 0.5);
  CHECK(rec.num_flagged() == 0);
  for (double c : rec.condition) CHECK(std::isfinite(c));

  SUBCASE("single-unknown recoveries") {
    auto mu = recover_mu_multi(clean.truth.mesh, clean.truth.coeffs.gruneisen, clean.truth.coeffs.gamma, data,
                               clean.truth.coeffs.sigma);
    auto sigma = recover_sigma_multi(clean.truth.mesh, clean.truth.coeffs.gruneisen, clean.truth.coeffs.gamma, data,
                                     clean.truth.coeffs.mu);
    CHECK(relative_l2_error(mu, clean.truth.coeffs.mu, clean.truth.mesh) <= 0.5);
    CHECK(relative_l2_error(sigma, clean.truth.coeffs.sigma, clean.truth.mesh) <= 0.5);
  }
}

TEST_CASE("nodes without spread are flagged and filled from a neighbour") {
  // With H = 0 the recovered densities are the harmonic extensions 1 and
  // 1 + x/2, which coincide on the line x = 0.
  const int n = 8;
  auto mesh = build_square_mesh(n);
  const std::size_t nn = mesh.num_nodes();
  DatumSet data;
  data.sources = {BoundarySource::constant(mesh, 1.0),
                  BoundarySource::from_function(mesh, [](double x, double) { return 1.0 + 0.5 * x; })};
  data.data = {NodalField(nn, 0.0), NodalField(nn, 0.0)};
  auto rec = recover_pair(mesh, NodalField(nn, 1.0), NodalField(nn, 1.0), data);
  CHECK(rec.num_flagged() == static_cast<std::size_t>(n + 1));
  for (std::size_t i = 0; i < nn; ++i) {
    const bool on_line = std::abs(mesh.nodes()[i].x) < 1e-12;
    CHECK(static_cast<bool>(rec.flagged[i]) == on_line);
    if (on_line) {
      CHECK(rec.sigma[i] == rec.sigma[i - 1]);
      CHECK(rec.mu[i] == rec.mu[i - 1]);
    }
  }
  auto csv = rec.condition_csv();
  CHECK(csv.rfind("node,condition,flag\n", 0) == 0);
  CHECK(csv.find(",1\n") != std::string::npos);
}

TEST_CASE("pair reconstruction input validation") {
  auto mesh = build_square_mesh(2);
  DatumSet one_source;
  one_source.sources = {BoundarySource::constant(mesh, 1.0)};
  one_source.data = {NodalField(9, 0.1)};
  CHECK_THROWS_AS(recover_pair(mesh, NodalField(9, 1.0), NodalField(9, 1.0), one_source), ValidationError);

  DatumSet bad;
  bad.sources = {BoundarySource::constant(mesh, 1.0), BoundarySource::constant(mesh, 2.0)};
  bad.data = {NodalField(9, 0.1)};
  CHECK_THROWS_AS(bad.validate(mesh), ValidationError);
}

TEST_CASE("clipped companions") {
  auto cfg = default_config();
  cfg.mesh_n = cfg.data_mesh_n = 12;
  auto clean = generate_clean_data(cfg);
  auto data = make_datum_set(clean, clean.truth.mesh, clean.truth.sources, 5.0, 3);
  auto rec = recover_pair(clean.truth.mesh, clean.truth.coeffs.gruneisen, clean.truth.coeffs.gamma, data);
  for (std::size_t i = 0; i < rec.sigma.size(); ++i) {
    CHECK(rec.sigma_clipped[i] == std::max(rec.sigma[i], 0.0));
    CHECK(rec.mu_clipped[i] == std::max(rec.mu[i], 0.0));
  }
}
