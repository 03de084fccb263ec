#pragma once

#include <vector>

#include "tpat/fem.hpp"
#include "tpat/field.hpp"
#include "tpat/forward.hpp"

namespace tpat {

/// Direction (d_gamma, d_sigma, d_mu) in coefficient space.
struct CoefficientPerturbation {
  NodalField d_gamma;
  NodalField d_sigma;
  NodalField d_mu;

  static CoefficientPerturbation zero(std::size_t n) {
    return {NodalField(n), NodalField(n), NodalField(n)};
  }
};

/// coeffs + t * pert (Gruneisen unchanged).
CoefficientSet perturbed(const CoefficientSet& coeffs, const CoefficientPerturbation& pert, double t);

/// Derivative of the forward solution in direction `pert`: solves
///   J(u) v = -( K(d_gamma) u + L (d_sigma u + d_mu |u| u) ),  v = 0 on the boundary.
NodalField solve_sensitivity(const Mesh& mesh, const CoefficientSet& coeffs, const NodalField& u,
                             const CoefficientPerturbation& pert, double tol = kDefaultLinearTol);

/// dH = Gruneisen (d_sigma u + d_mu |u| u + (sigma + 2 mu |u|) v).
NodalField datum_derivative(const CoefficientSet& coeffs, const NodalField& u, const NodalField& v,
                            const CoefficientPerturbation& pert);

struct BoundaryTraces {
  std::vector<double> d_sigma;  ///< per mesh.boundary_nodes() entry
  std::vector<double> d_mu;
};

/// Recovers (d_sigma, d_mu) on the boundary from two linearized data, using
/// v = 0 there so dH_j = Gruneisen (g_j d_sigma + |g_j| g_j d_mu).
/// Throws ValidationError naming the node when |g2| - |g1| is not at least
/// 1e-8 max(|g1|, |g2|) in magnitude, or when a source is not strictly positive.
BoundaryTraces boundary_traces(const Mesh& mesh, const NodalField& dh1, const NodalField& dh2,
                               const BoundarySource& g1, const BoundarySource& g2, const NodalField& gruneisen);

}  // namespace tpat
