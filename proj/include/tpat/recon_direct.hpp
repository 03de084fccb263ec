#pragma once

#include <cstdint>
#include <vector>

#include "tpat/fem.hpp"
#include "tpat/field.hpp"
#include "tpat/forward.hpp"

namespace tpat {

/// Internal data H_j paired with the boundary sources g_j that produced them.
struct DatumSet {
  std::vector<BoundarySource> sources;
  std::vector<NodalField> data;
  double noise_level = 0.0;
  std::uint64_t seed = 0;

  /// Throws ValidationError unless the lists are non-empty, equally long and
  /// every datum has one value per node.
  void validate(const Mesh& mesh) const;
};

/// Positivity floor applied to recovered photon densities.
inline constexpr double kDensityFloor = 1e-12;

/// Solves -div(gamma grad u) = -H / Gruneisen with u = g on the boundary.
/// The load uses the same vertex quadrature as the forward operator, so data
/// computed from a forward solve on the same mesh reproduce u.
NodalField recover_field(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma, const NodalField& h,
                         const BoundarySource& g);

/// sigma = H / (Gruneisen u) - mu |u|. Throws ValidationError listing the
/// offending nodes if u falls below `floor` anywhere.
NodalField recover_sigma(const NodalField& h, const NodalField& gruneisen, const NodalField& u_star,
                         const NodalField& mu_known, double floor = kDensityFloor);

/// mu = H / (Gruneisen u |u|) - sigma / |u|.
NodalField recover_mu(const NodalField& h, const NodalField& gruneisen, const NodalField& u_star,
                      const NodalField& sigma_known, double floor = kDensityFloor);

/// Multi-source variants: recover every u_j*, then fit the single unknown by
/// pointwise least squares over all sources.
NodalField recover_sigma_multi(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma,
                               const DatumSet& data, const NodalField& mu_known);
NodalField recover_mu_multi(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma,
                            const DatumSet& data, const NodalField& sigma_known);

struct PairReconstruction {
  NodalField sigma;
  NodalField mu;
  NodalField sigma_clipped;  ///< max(sigma, 0)
  NodalField mu_clipped;
  std::vector<double> condition;  ///< 2-norm condition number of the per-node J x 2 system
  std::vector<char> flagged;      ///< spread of |u_j*| below threshold; value filled from a neighbour
  std::vector<NodalField> u_star;

  std::size_t num_flagged() const;
  /// CSV "node,condition,flag".
  std::string condition_csv() const;
};

/// Relative spread threshold on {|u_j*|} at a node.
inline constexpr double kSpreadThreshold = 1e-6;

/// Pointwise least squares for (sigma, mu) from
///   sigma + mu |u_j*| = H_j / (Gruneisen u_j*),  j = 1..J.
/// Requires J >= 2. Nodes with degenerate spread are flagged and filled from
/// the nearest well-conditioned node.
PairReconstruction recover_pair(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma,
                                const DatumSet& data);

/// Solves the per-node fit for given rows (a_j, r_j): minimizes sum (s + m a_j - r_j)^2.
/// Returns false if the a_j have no spread.
bool fit_line(std::span<const double> a, std::span<const double> r, double& s, double& m);

}  // namespace tpat
