#include "tpat/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tpat/error.hpp"
#include "tpat/io.hpp"
#include "tpat/kernels.hpp"

namespace tpat {

CoefficientSet perturbed(const CoefficientSet& coeffs, const CoefficientPerturbation& pert, double t) {
  CoefficientSet c = coeffs;
  auto add = [t](NodalField& f, const NodalField& d) {
    if (d.size() == 0) return;
    if (d.size() != f.size()) throw ValidationError("perturbed: perturbation size mismatch");
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += t * d[i];
  };
  add(c.gamma, pert.d_gamma);
  add(c.sigma, pert.d_sigma);
  add(c.mu, pert.d_mu);
  return c;
}

NodalField solve_sensitivity(const Mesh& mesh, const CoefficientSet& coeffs, const NodalField& u,
                             const CoefficientPerturbation& pert, double tol) {
  const std::size_t n = mesh.num_nodes();
  check_size(mesh, u, "solve_sensitivity: u");
  check_size(mesh, pert.d_gamma, "solve_sensitivity: d_gamma");
  check_size(mesh, pert.d_sigma, "solve_sensitivity: d_sigma");
  check_size(mesh, pert.d_mu, "solve_sensitivity: d_mu");
  SemilinearOperator op(mesh, coeffs);

  // Weak form of div(d_gamma grad u) is -K(d_gamma) u.
  SparseMatrix kd = mesh_pattern(mesh);
  kernels::parallel::assemble_stiffness(mesh, pert.d_gamma.span(), kd);
  std::vector<double> rhs = multiply(kd, u.span());
  const auto& lm = op.lumped();
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = -(rhs[i] + lm[i] * (pert.d_sigma[i] * u[i] + pert.d_mu[i] * std::abs(u[i]) * u[i]));
  }
  return NodalField(op.solve_linearized(u.span(), rhs, tol));
}

NodalField datum_derivative(const CoefficientSet& coeffs, const NodalField& u, const NodalField& v,
                            const CoefficientPerturbation& pert) {
  const std::size_t n = u.size();
  if (v.size() != n || pert.d_sigma.size() != n || pert.d_mu.size() != n || coeffs.sigma.size() != n) {
    throw ValidationError("datum_derivative: field sizes differ");
  }
  NodalField dh(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double au = std::abs(u[i]);
    dh[i] = coeffs.gruneisen[i] * (pert.d_sigma[i] * u[i] + pert.d_mu[i] * au * u[i] +
                                   (coeffs.sigma[i] + 2.0 * coeffs.mu[i] * au) * v[i]);
  }
  return dh;
}

BoundaryTraces boundary_traces(const Mesh& mesh, const NodalField& dh1, const NodalField& dh2,
                               const BoundarySource& g1, const BoundarySource& g2, const NodalField& gruneisen) {
  check_size(mesh, dh1, "boundary_traces: dH1");
  check_size(mesh, dh2, "boundary_traces: dH2");
  check_size(mesh, gruneisen, "boundary_traces: Gruneisen");
  const auto& nodes = mesh.boundary_nodes();
  if (g1.values.size() != nodes.size() || g2.values.size() != nodes.size()) {
    throw ValidationError("boundary_traces: sources do not match the boundary");
  }
  BoundaryTraces out;
  out.d_sigma.resize(nodes.size());
  out.d_mu.resize(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int node = nodes[k];
    const double a = g1.values[k], b = g2.values[k];
    if (!(a > 0.0 && b > 0.0)) {
      throw ValidationError("boundary_traces: source not strictly positive at node " + std::to_string(node));
    }
    const double spread = std::abs(b) - std::abs(a);
    if (!(std::abs(spread) >= 1e-8 * std::max(std::abs(a), std::abs(b)))) {
      throw ValidationError("boundary_traces: ill-conditioned trace at node " + std::to_string(node) +
                            " (|g2| - |g1| = " + format_double(spread) + ")");
    }
    const double denom = gruneisen[node] * a * b * spread;
    out.d_sigma[k] = (dh1[node] * std::abs(b) * b - dh2[node] * std::abs(a) * a) / denom;
    out.d_mu[k] = (dh2[node] * a - dh1[node] * b) / denom;
  }
  return out;
}

}  // namespace tpat
