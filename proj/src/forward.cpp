#include "tpat/forward.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tpat/io.hpp"
#include "tpat/kernels.hpp"

namespace tpat {

namespace k = kernels::parallel;

BoundarySource BoundarySource::from_function(const Mesh& mesh, const std::function<double(double, double)>& g) {
  BoundarySource s;
  s.values.reserve(mesh.boundary_nodes().size());
  for (int b : mesh.boundary_nodes()) {
    const Point& p = mesh.nodes()[b];
    s.values.push_back(g(p.x, p.y));
  }
  return s;
}

BoundarySource BoundarySource::constant(const Mesh& mesh, double c) {
  return {std::vector<double>(mesh.boundary_nodes().size(), c)};
}

BoundarySource BoundarySource::trace(const Mesh& mesh, const NodalField& f) {
  check_size(mesh, f, "BoundarySource::trace");
  BoundarySource s;
  for (int b : mesh.boundary_nodes()) s.values.push_back(f[b]);
  return s;
}

BoundaryValues BoundarySource::to_map(const Mesh& mesh) const {
  const auto& nodes = mesh.boundary_nodes();
  if (values.size() != nodes.size()) {
    throw ValidationError("boundary source has " + std::to_string(values.size()) + " values, mesh has " +
                          std::to_string(nodes.size()) + " boundary nodes");
  }
  BoundaryValues m;
  for (std::size_t i = 0; i < nodes.size(); ++i) m.emplace_hint(m.end(), nodes[i], values[i]);
  return m;
}

double BoundarySource::min() const { return *std::min_element(values.begin(), values.end()); }
double BoundarySource::max() const { return *std::max_element(values.begin(), values.end()); }

void BoundarySource::require_positive(double epsilon) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= epsilon && epsilon > 0.0)) {
      throw ValidationError("boundary source value " + format_double(values[i]) + " at boundary entry " +
                            std::to_string(i) + " is below " + format_double(epsilon));
    }
  }
}

SemilinearOperator::SemilinearOperator(const Mesh& mesh, const CoefficientSet& coeffs)
    : mesh_(&mesh), coeffs_(&coeffs) {
  // Zero absorption keeps the Jacobian positive definite.
  coeffs.validate(mesh.num_nodes(), 1e-12, 1e12, 0.0);
  stiffness_ = assemble_stiffness(mesh, coeffs.gamma);
  lumped_ = lumped_mass(mesh);
}

std::vector<double> SemilinearOperator::residual(std::span<const double> u) const {
  std::vector<double> r(u.size());
  k::spmv(stiffness_, u, r);
  const auto& s = coeffs_->sigma;
  const auto& m = coeffs_->mu;
  const long n = static_cast<long>(u.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) r[i] += lumped_[i] * (s[i] + m[i] * std::abs(u[i])) * u[i];
  for (int b : mesh_->boundary_nodes()) r[b] = 0.0;
  return r;
}

SparseMatrix SemilinearOperator::jacobian(std::span<const double> u) const {
  SparseMatrix j = stiffness_;
  const auto& s = coeffs_->sigma;
  const auto& m = coeffs_->mu;
  for (std::size_t i = 0; i < u.size(); ++i) {
    j.val[j.find(static_cast<int>(i), static_cast<int>(i))] += lumped_[i] * (s[i] + 2.0 * m[i] * std::abs(u[i]));
  }
  return j;
}

std::vector<double> SemilinearOperator::solve_linearized(std::span<const double> u, std::span<const double> rhs,
                                                         double tol) const {
  BoundaryValues zero;
  for (int b : mesh_->boundary_nodes()) zero.emplace_hint(zero.end(), b, 0.0);
  auto [a, b] = apply_dirichlet(*mesh_, jacobian(u), std::vector<double>(rhs.begin(), rhs.end()), zero);
  return solve_linear(a, b, tol);
}

ForwardSolution solve_semilinear(const Mesh& mesh, const CoefficientSet& coeffs, const BoundarySource& g,
                                 const NewtonConfig& cfg) {
  SemilinearOperator op(mesh, coeffs);
  return solve_semilinear(op, g, cfg);
}

ForwardSolution solve_semilinear(const SemilinearOperator& op, const BoundarySource& g, const NewtonConfig& cfg) {
  if (!(cfg.residual_tol > 0.0) || cfg.max_iterations < 1 || !(cfg.damping > 0.0 && cfg.damping < 1.0)) {
    throw ValidationError("NewtonConfig: need residual_tol > 0, max_iterations >= 1, damping in (0, 1)");
  }
  const Mesh& mesh = op.mesh();
  const CoefficientSet& c = op.coeffs();
  const std::size_t n = mesh.num_nodes();
  const BoundaryValues bc = g.to_map(mesh);

  // Linear initial iterate (mu = 0).
  SparseMatrix lin = op.stiffness();
  for (std::size_t i = 0; i < n; ++i) {
    lin.val[lin.find(static_cast<int>(i), static_cast<int>(i))] += op.lumped()[i] * c.sigma[i];
  }
  auto [a0, b0] = apply_dirichlet(mesh, std::move(lin), std::vector<double>(n, 0.0), bc);
  std::vector<double> u = solve_linear(a0, b0, cfg.linear_tol);
  for (const auto& [node, value] : bc) u[node] = value;

  SolverReport report;
  std::vector<double> r = op.residual(u);
  double rnorm = std::sqrt(k::dot(r, r));
  report.residual_history.push_back(rnorm);

  while (rnorm > cfg.residual_tol) {
    if (report.iterations >= cfg.max_iterations) {
      throw NewtonError("solve_semilinear: no convergence after " + std::to_string(report.iterations) +
                            " iterations, residual " + format_double(rnorm),
                        report);
    }
    std::vector<double> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = -r[i];
    std::vector<double> step = op.solve_linearized(u, neg, cfg.linear_tol);

    double alpha = 1.0;
    std::vector<double> trial(n), rtrial;
    double tnorm = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * step[i];
      rtrial = op.residual(trial);
      tnorm = std::sqrt(k::dot(rtrial, rtrial));
      if (tnorm < rnorm) break;
      alpha *= cfg.damping;
      if (alpha < 1e-10) {
        throw NewtonError("solve_semilinear: line search stalled at residual " + format_double(rnorm), report);
      }
    }
    u.swap(trial);
    r.swap(rtrial);
    rnorm = tnorm;
    ++report.iterations;
    report.residual_history.push_back(rnorm);
  }
  report.converged = true;
  return {NodalField(std::move(u)), std::move(report)};
}

NodalField compute_datum(const CoefficientSet& coeffs, const NodalField& u) {
  const std::size_t n = u.size();
  if (coeffs.gruneisen.size() != n || coeffs.sigma.size() != n || coeffs.mu.size() != n) {
    throw ValidationError("compute_datum: coefficient and solution sizes differ");
  }
  NodalField h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = coeffs.gruneisen[i] * (coeffs.sigma[i] * u[i] + coeffs.mu[i] * std::abs(u[i]) * u[i]);
  }
  return h;
}

NodalField add_noise(const NodalField& h, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0)) throw ValidationError("add_noise: noise level must be >= 0, got " + format_double(epsilon));
  if (epsilon == 0.0) return h;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 engine(seq);
  const double amp = std::sqrt(3.0) * epsilon * 1e-2;
  NodalField out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    // 53 random bits -> [0, 1) -> [-1, 1)
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    out[i] = h[i] * (1.0 + amp * (2.0 * unit - 1.0));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace tpat
