#include "tpat/fem.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "tpat/error.hpp"
#include "tpat/io.hpp"
#include "tpat/kernels.hpp"

namespace tpat {

namespace k = kernels::parallel;

void check_size(const Mesh& mesh, const NodalField& field, const char* name) {
  if (field.size() != mesh.num_nodes()) {
    throw ValidationError(std::string(name) + ": field has " + std::to_string(field.size()) + " values, mesh has " +
                          std::to_string(mesh.num_nodes()) + " nodes");
  }
}

void CoefficientSet::validate(std::size_t n, double lower, double upper, double absorption_lower) const {
  auto check = [&](const NodalField& f, const char* name, double lower) {
    if (f.size() != n) {
      throw ValidationError(std::string(name) + ": expected " + std::to_string(n) + " values, got " +
                            std::to_string(f.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(f[i] >= lower && f[i] <= upper)) {
        throw ValidationError(std::string(name) + " = " + format_double(f[i]) + " at node " + std::to_string(i) +
                              " outside [" + format_double(lower) + ", " + format_double(upper) + "]");
      }
    }
  };
  check(gruneisen, "gruneisen", lower);
  check(gamma, "gamma", lower);
  check(sigma, "sigma", absorption_lower);
  check(mu, "mu", absorption_lower);
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const NodalField& gamma) {
  check_size(mesh, gamma, "assemble_stiffness");
  SparseMatrix m = mesh_pattern(mesh);
  k::assemble_stiffness(mesh, gamma.span(), m);
  return m;
}

SparseMatrix assemble_weighted_mass(const Mesh& mesh, const NodalField& weight) {
  check_size(mesh, weight, "assemble_weighted_mass");
  for (double w : weight) {
    if (!std::isfinite(w)) throw ValidationError("assemble_weighted_mass: non-finite weight");
  }
  SparseMatrix m = mesh_pattern(mesh);
  k::assemble_weighted_mass(mesh, weight.span(), m);
  return m;
}

std::vector<double> lumped_mass(const Mesh& mesh) {
  // Gather per node in ascending triangle order, same as the assembly kernels.
  std::vector<double> m(mesh.num_nodes(), 0.0);
  const auto& incident = mesh.node_triangles();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int t : incident[i]) m[i] += mesh.area(static_cast<std::size_t>(t)) / 3.0;
  }
  return m;
}

std::pair<SparseMatrix, std::vector<double>> apply_dirichlet(const Mesh& mesh, SparseMatrix a, std::vector<double> b,
                                                             const BoundaryValues& values) {
  if (a.dim != mesh.num_nodes() || b.size() != a.dim) {
    throw ValidationError("apply_dirichlet: matrix/vector dimensions do not match the mesh");
  }
  std::vector<char> fixed(a.dim, 0);
  std::vector<double> g(a.dim, 0.0);
  for (const auto& [node, value] : values) {
    if (node < 0 || static_cast<std::size_t>(node) >= a.dim || !mesh.is_boundary(node)) {
      throw ValidationError("apply_dirichlet: node " + std::to_string(node) + " is not a boundary node");
    }
    fixed[node] = 1;
    g[node] = value;
  }
  for (std::size_t i = 0; i < a.dim; ++i) {
    if (fixed[i]) continue;
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      if (fixed[a.col[p]]) {
        b[i] -= a.val[p] * g[a.col[p]];
        a.val[p] = 0.0;
      }
    }
  }
  for (std::size_t i = 0; i < a.dim; ++i) {
    if (!fixed[i]) continue;
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      a.val[p] = (a.col[p] == static_cast<int>(i)) ? 1.0 : 0.0;
    }
    b[i] = g[i];
  }
  return {std::move(a), std::move(b)};
}

std::vector<double> solve_linear(const SparseMatrix& a, std::span<const double> b, double tol,
                                 LinearSolveInfo* info) {
  const std::size_t n = a.dim;
  if (b.size() != n) throw ValidationError("solve_linear: right-hand side has wrong length");
  std::vector<double> x(n, 0.0);
  const double bnorm = std::sqrt(k::dot(b, b));
  if (info) *info = {};
  if (bnorm == 0.0) return x;

  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = a.at(static_cast<int>(i), static_cast<int>(i));
    if (!(d > 0.0)) throw SolverError("solve_linear: non-positive diagonal at row " + std::to_string(i));
    inv_diag[i] = 1.0 / d;
  }

  std::vector<double> r(b.begin(), b.end()), z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = k::dot(r, z);
  double rel = 1.0;
  const int max_iter = std::max<int>(1000, 10 * static_cast<int>(n));
  for (int it = 1; it <= max_iter; ++it) {
    k::spmv(a, p, ap);
    const double pap = k::dot(p, ap);
    if (!(pap > 0.0)) {
      throw SolverError("solve_linear: matrix not positive definite (p^T A p = " + format_double(pap) +
                        "), relative residual " + format_double(rel));
    }
    const double alpha = rz / pap;
    k::axpy(alpha, p, x);
    k::axpy(-alpha, ap, r);
    rel = std::sqrt(k::dot(r, r)) / bnorm;
    if (rel <= tol) {
      if (info) *info = {it, rel};
      return x;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = k::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverError("solve_linear: no convergence in " + std::to_string(max_iter) +
                    " iterations, relative residual " + format_double(rel));
}

double l2_norm(const Mesh& mesh, const NodalField& f) {
  check_size(mesh, f, "l2_norm");
  SparseMatrix m = assemble_weighted_mass(mesh, NodalField(mesh.num_nodes(), 1.0));
  std::vector<double> mf = multiply(m, f.span());
  return std::sqrt(std::max(0.0, k::dot(f.span(), mf)));
}

std::string field_to_csv(const NodalField& field) {
  std::string s = "node,value\n";
  for (std::size_t i = 0; i < field.size(); ++i) s += std::to_string(i) + "," + format_double(field[i]) + "\n";
  return s;
}

void save_field(const NodalField& field, const std::filesystem::path& path) {
  write_text_file(path, field_to_csv(field));
}

NodalField load_field(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  int line_no = 1;
  auto fail = [&](const std::string& msg) {
    throw ValidationError(path.string() + " line " + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line)) fail("empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "node,value") fail("expected header 'node,value'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected 'node,value'");
    std::size_t node = 0;
    double value = 0.0;
    auto r1 = std::from_chars(line.data(), line.data() + comma, node);
    auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), value);
    if (r1.ec != std::errc{} || r1.ptr != line.data() + comma || r2.ec != std::errc{} ||
        r2.ptr != line.data() + line.size()) {
      fail("malformed row");
    }
    if (node != values.size()) fail("node index " + std::to_string(node) + " out of order");
    values.push_back(value);
  }
  return NodalField(std::move(values));
}

}  // namespace tpat
