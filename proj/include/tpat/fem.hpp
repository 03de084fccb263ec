#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "tpat/field.hpp"
#include "tpat/mesh.hpp"
#include "tpat/sparse.hpp"

namespace tpat {

/// Gruneisen, diffusion, single-photon and two-photon absorption coefficients.
struct CoefficientSet {
  NodalField gruneisen;
  NodalField gamma;
  NodalField sigma;
  NodalField mu;

  /// Throws ValidationError unless all four fields have `n` entries, lie below
  /// `upper`, and lie above `lower` (`absorption_lower` for sigma and mu).
  void validate(std::size_t n, double lower, double upper, double absorption_lower) const;
  void validate(std::size_t n, double lower = 1e-12, double upper = 1e12) const {
    validate(n, lower, upper, lower);
  }
};

/// Throws ValidationError if `field` does not have one value per node.
void check_size(const Mesh& mesh, const NodalField& field, const char* name);

/// K[i][j] = int gamma grad(phi_i) . grad(phi_j), gamma piecewise linear.
SparseMatrix assemble_stiffness(const Mesh& mesh, const NodalField& gamma);

/// M[i][j] = int w phi_i phi_j, w piecewise linear, exact quadrature.
SparseMatrix assemble_weighted_mass(const Mesh& mesh, const NodalField& weight);

/// Row sums of the unweighted mass matrix, int phi_i.
std::vector<double> lumped_mass(const Mesh& mesh);

using BoundaryValues = std::map<int, double>;

/// Symmetric elimination of Dirichlet values: constrained rows and columns
/// become identity, known columns move to the right-hand side.
std::pair<SparseMatrix, std::vector<double>> apply_dirichlet(const Mesh& mesh, SparseMatrix a, std::vector<double> b,
                                                             const BoundaryValues& values);

struct LinearSolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
};

inline constexpr double kDefaultLinearTol = 1e-10;

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Throws SolverError (message carries the final residual) if the relative
/// residual does not reach `tol` within the iteration cap.
std::vector<double> solve_linear(const SparseMatrix& a, std::span<const double> b, double tol = kDefaultLinearTol,
                                 LinearSolveInfo* info = nullptr);

/// sqrt(f^T M f) with the consistent mass matrix.
double l2_norm(const Mesh& mesh, const NodalField& f);

/// NodalField CSV: header "node,value", one row per node.
void save_field(const NodalField& field, const std::filesystem::path& path);
NodalField load_field(const std::filesystem::path& path);
std::string field_to_csv(const NodalField& field);

}  // namespace tpat
