#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tpat/error.hpp"
#include "tpat/fem.hpp"
#include "tpat/field.hpp"
#include "tpat/mesh.hpp"
#include "tpat/sparse.hpp"

namespace tpat {

/// Photon source g on the boundary, one value per entry of mesh.boundary_nodes().
struct BoundarySource {
  std::vector<double> values;

  static BoundarySource from_function(const Mesh& mesh, const std::function<double(double, double)>& g);
  static BoundarySource constant(const Mesh& mesh, double c);

  /// Boundary trace of a nodal field.
  static BoundarySource trace(const Mesh& mesh, const NodalField& f);

  BoundaryValues to_map(const Mesh& mesh) const;
  double min() const;
  double max() const;
  /// Throws ValidationError unless every value is >= epsilon > 0.
  void require_positive(double epsilon) const;
};

struct NewtonConfig {
  double residual_tol = 1e-10;
  int max_iterations = 50;
  double damping = 0.5;
  /// Relative tolerance of the inner linear solves.
  double linear_tol = 1e-12;
};

struct SolverReport {
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
};

/// Newton failure; carries the diagnostics gathered so far.
class NewtonError : public SolverError {
 public:
  NewtonError(const std::string& what, SolverReport report) : SolverError(what), report_(std::move(report)) {}
  const SolverReport& report() const { return report_; }

 private:
  SolverReport report_;
};

/// Discrete operator of -div(gamma grad u) + sigma u + mu |u| u.
///
/// Diffusion is the P1 stiffness matrix; the zeroth-order terms use vertex
/// quadrature (lumped mass L), so
///   R(u) = K u + L (sigma + mu |u|) u,
///   J(u) = K + L diag(sigma + 2 mu |u|).
/// J is the exact derivative of R and is symmetric positive definite.
class SemilinearOperator {
 public:
  SemilinearOperator(const Mesh& mesh, const CoefficientSet& coeffs);

  const Mesh& mesh() const { return *mesh_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const std::vector<double>& lumped() const { return lumped_; }
  const CoefficientSet& coeffs() const { return *coeffs_; }

  /// Residual with boundary rows zeroed.
  std::vector<double> residual(std::span<const double> u) const;
  SparseMatrix jacobian(std::span<const double> u) const;

  /// Solves J(u) v = rhs with v = 0 on the boundary (rhs boundary rows ignored).
  std::vector<double> solve_linearized(std::span<const double> u, std::span<const double> rhs,
                                       double tol = kDefaultLinearTol) const;

 private:
  const Mesh* mesh_;
  const CoefficientSet* coeffs_;
  SparseMatrix stiffness_;
  std::vector<double> lumped_;
};

struct ForwardSolution {
  NodalField u;
  SolverReport report;
};

/// Damped Newton solve of the semilinear boundary value problem, u = g on the
/// boundary. Starts from the solution of the linear problem with mu = 0.
ForwardSolution solve_semilinear(const Mesh& mesh, const CoefficientSet& coeffs, const BoundarySource& g,
                                 const NewtonConfig& cfg = {});
ForwardSolution solve_semilinear(const SemilinearOperator& op, const BoundarySource& g, const NewtonConfig& cfg = {});

/// H = Gruneisen * (sigma u + mu |u| u), nodewise.
NodalField compute_datum(const CoefficientSet& coeffs, const NodalField& u);

/// Multiplies each value by (1 + sqrt(3) * epsilon * 1e-2 * r), r ~ U[-1, 1],
/// drawn from a generator seeded with `seed`.
NodalField add_noise(const NodalField& h, double epsilon, std::uint64_t seed);

/// Seed of the independent noise stream for datum `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tpat
