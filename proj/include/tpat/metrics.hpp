#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tpat/field.hpp"
#include "tpat/forward.hpp"
#include "tpat/mesh.hpp"

namespace tpat {

/// 100 * ||r - t||_L2 / ||t||_L2, L2 norms from the consistent mass matrix.
/// Throws ValidationError when ||t|| = 0.
double relative_l2_error(const NodalField& reconstructed, const NodalField& truth, const Mesh& mesh);

inline constexpr double kMaxPrincipleTol = 1e-8;

struct PropertyReport {
  bool applicable = true;
  bool pass = true;
  double value = 0.0;   ///< max interior u, min u, or min difference depending on the check
  double bound = 0.0;   ///< the quantity compared against
  int node = -1;        ///< where `value` is attained (first offending node on failure)
  std::string message;

  std::string to_text() const;
  std::string to_csv_row(const std::string& check) const;
};

/// sup over interior nodes of u <= sup of g + 1e-8. Requires g >= 0.
PropertyReport check_max_principle(const Mesh& mesh, const NodalField& u, const BoundarySource& g);

/// When min g >= epsilon > 0: pass iff min u > 0. Not applicable when the
/// source is not bounded below by a positive epsilon.
PropertyReport check_positivity(const Mesh& mesh, const NodalField& u, const BoundarySource& g, double epsilon);

/// Pass iff u_high > u_low at every interior node.
PropertyReport check_comparison(const Mesh& mesh, const NodalField& u_high, const NodalField& u_low);

/// (F(x + t d) - F(x - t d)) / (2 t)
double fd_directional_derivative(const std::function<double(std::span<const double>)>& f,
                                 std::span<const double> point, std::span<const double> direction, double step);

}  // namespace tpat
