#pragma once

#include <string>
#include <vector>

#include "tpat/fem.hpp"
#include "tpat/field.hpp"
#include "tpat/forward.hpp"
#include "tpat/lbfgs.hpp"
#include "tpat/recon_direct.hpp"

namespace tpat {

/// Which absorption coefficients the least-squares loop updates.
enum class Unknowns { kBoth, kSigmaOnly, kMuOnly };

struct LsqConfig {
  double kappa = 0.0;
  double grad_tol = 1e-6;
  int max_bfgs_iterations = 300;
  int history_size = 10;
  double bound_floor = 1e-3;
  double bound_ceiling = 2.0;
  Unknowns unknowns = Unknowns::kBoth;
  NewtonConfig newton{};

  void validate() const;
};

struct ObjectiveValue {
  double value = 0.0;
  double misfit = 0.0;
  double regularization = 0.0;  ///< R, before multiplication by kappa
  std::vector<double> per_source_misfits;
};

struct GradientFields {
  NodalField g_sigma;  ///< Riesz representers in the lumped-mass L2 inner product
  NodalField g_mu;
};

/// Regularized output least squares
///   Phi = 1/2 sum_j |z_j|_M^2 + kappa/2 (sigma^T K1 sigma + mu^T K1 mu),
///   z_j = Gruneisen (sigma u_j + mu |u_j| u_j) - H_j,
/// with M the consistent mass matrix and K1 the unit-coefficient stiffness.
class LsqProblem {
 public:
  LsqProblem(const Mesh& mesh, NodalField gruneisen, NodalField gamma, DatumSet data, double kappa,
             NewtonConfig newton = {});

  const Mesh& mesh() const { return *mesh_; }
  const DatumSet& data() const { return data_; }
  double kappa() const { return kappa_; }
  const std::vector<double>& lumped() const { return lumped_; }

  CoefficientSet coefficients(const NodalField& sigma, const NodalField& mu) const;

  /// J forward solves. Throws SolverError naming the source on failure.
  ObjectiveValue objective(const NodalField& sigma, const NodalField& mu) const;

  /// Objective and adjoint-state gradient.
  ObjectiveValue evaluate(const NodalField& sigma, const NodalField& mu, GradientFields& grad) const;

 private:
  std::vector<NodalField> forward_all(const CoefficientSet& c) const;

  const Mesh* mesh_;
  NodalField gruneisen_;
  NodalField gamma_;
  DatumSet data_;
  double kappa_;
  NewtonConfig newton_;
  SparseMatrix mass_;
  SparseMatrix unit_stiffness_;
  std::vector<double> lumped_;
};

/// Adjoint solve: J(u_j) v = -Gruneisen (sigma + 2 mu |u_j|) M z_j, v = 0 on
/// the boundary.
NodalField solve_adjoint(const Mesh& mesh, const CoefficientSet& coeffs, const NodalField& u, const NodalField& z);

/// Free-function forms.
ObjectiveValue objective(const Mesh& mesh, const CoefficientSet& coeffs, const DatumSet& data, double kappa);
GradientFields gradient(const Mesh& mesh, const CoefficientSet& coeffs, const DatumSet& data, double kappa);

struct LsqReport {
  std::vector<LbfgsIteration> history;
  bool converged = false;
  std::string stop_reason;
  int iterations() const { return history.empty() ? 0 : history.back().iteration; }
  /// CSV "iteration,objective,grad_norm,step_length".
  std::string to_csv() const;
};

struct LsqResult {
  NodalField sigma;
  NodalField mu;
  LsqReport report;
};

/// Projected L-BFGS minimization of Phi starting from (sigma0, mu0). The
/// coefficient not listed in cfg.unknowns stays at its initial value.
LsqResult run_lsq(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma, const DatumSet& data,
                  const NodalField& sigma0, const NodalField& mu0, const LsqConfig& cfg);

/// Default regularization weight: 1e-8 times the squared data scale max|H|.
double default_kappa(const DatumSet& data);

}  // namespace tpat
