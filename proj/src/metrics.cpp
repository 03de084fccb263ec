#include "tpat/metrics.hpp"

#include <cmath>
#include <limits>

#include "tpat/error.hpp"
#include "tpat/fem.hpp"
#include "tpat/io.hpp"

namespace tpat {

double relative_l2_error(const NodalField& reconstructed, const NodalField& truth, const Mesh& mesh) {
  check_size(mesh, reconstructed, "relative_l2_error: reconstruction");
  check_size(mesh, truth, "relative_l2_error: truth");
  NodalField diff(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) diff[i] = reconstructed[i] - truth[i];
  const double denom = l2_norm(mesh, truth);
  if (denom == 0.0) throw ValidationError("relative_l2_error: true field has zero L2 norm");
  return 100.0 * l2_norm(mesh, diff) / denom;
}

std::string PropertyReport::to_text() const {
  if (!applicable) return "not applicable: " + message;
  return std::string(pass ? "PASS" : "FAIL") + " value=" + format_double(value) + " bound=" + format_double(bound) +
         " node=" + std::to_string(node) + (message.empty() ? "" : " (" + message + ")");
}

std::string PropertyReport::to_csv_row(const std::string& check) const {
  return check + "," + (applicable ? "1" : "0") + "," + (pass ? "1" : "0") + "," + format_double(value) + "," +
         format_double(bound) + "," + std::to_string(node);
}

PropertyReport check_max_principle(const Mesh& mesh, const NodalField& u, const BoundarySource& g) {
  check_size(mesh, u, "check_max_principle");
  PropertyReport rep;
  if (g.min() < 0.0) {
    rep.applicable = false;
    rep.message = "boundary source has negative values";
    return rep;
  }
  rep.bound = g.max();
  rep.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (mesh.is_boundary(static_cast<int>(i))) continue;
    if (u[i] > rep.value) {
      rep.value = u[i];
      rep.node = static_cast<int>(i);
    }
  }
  rep.pass = rep.node < 0 || rep.value <= rep.bound + kMaxPrincipleTol;
  if (!rep.pass) rep.message = "interior maximum exceeds boundary maximum";
  return rep;
}

PropertyReport check_positivity(const Mesh& mesh, const NodalField& u, const BoundarySource& g, double epsilon) {
  check_size(mesh, u, "check_positivity");
  PropertyReport rep;
  rep.bound = 0.0;
  if (!(epsilon > 0.0) || g.min() < epsilon) {
    rep.applicable = false;
    rep.message = "source not bounded below by a positive epsilon";
    return rep;
  }
  rep.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < rep.value) {
      rep.value = u[i];
      rep.node = static_cast<int>(i);
    }
  }
  rep.pass = rep.value > 0.0;
  if (!rep.pass) rep.message = "non-positive photon density";
  return rep;
}

PropertyReport check_comparison(const Mesh& mesh, const NodalField& u_high, const NodalField& u_low) {
  check_size(mesh, u_high, "check_comparison");
  check_size(mesh, u_low, "check_comparison");
  PropertyReport rep;
  rep.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u_high.size(); ++i) {
    if (mesh.is_boundary(static_cast<int>(i))) continue;
    const double d = u_high[i] - u_low[i];
    if (d < rep.value) {
      rep.value = d;
      rep.node = static_cast<int>(i);
    }
  }
  rep.pass = rep.node < 0 || rep.value > 0.0;
  if (!rep.pass) rep.message = "ordering of solutions violated";
  return rep;
}

double fd_directional_derivative(const std::function<double(std::span<const double>)>& f,
                                 std::span<const double> point, std::span<const double> direction, double step) {
  if (point.size() != direction.size()) throw ValidationError("fd_directional_derivative: size mismatch");
  std::vector<double> plus(point.begin(), point.end()), minus(point.begin(), point.end());
  for (std::size_t i = 0; i < point.size(); ++i) {
    plus[i] += step * direction[i];
    minus[i] -= step * direction[i];
  }
  return (f(plus) - f(minus)) / (2.0 * step);
}

}  // namespace tpat
