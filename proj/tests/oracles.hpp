#pragma once

// Independent reference computations for tests: dense assembly written from
// scratch, tensor Gauss quadrature on triangles, dense Newton, random fields.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tpat/fem.hpp"
#include "tpat/mesh.hpp"
#include "tpat/sparse.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd to_dense(const tpat::SparseMatrix& a) {
  MatrixXd d = MatrixXd::Zero(a.dim, a.dim);
  for (std::size_t i = 0; i < a.dim; ++i) {
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) d(i, a.col[k]) = a.val[k];
  }
  return d;
}

/// CSR with a full pattern, for feeding dense test matrices to solve_linear.
inline tpat::SparseMatrix from_dense(const MatrixXd& d) {
  tpat::SparseMatrix a;
  a.dim = static_cast<std::size_t>(d.rows());
  a.row_ptr.push_back(0);
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      a.col.push_back(j);
      a.val.push_back(d(i, j));
    }
    a.row_ptr.push_back(static_cast<int>(a.col.size()));
  }
  return a;
}

/// Barycentric coordinates of (x, y) in triangle t, via a 3x3 solve.
inline Eigen::Vector3d barycentric(const tpat::Mesh& mesh, std::size_t t, double x, double y) {
  const auto& tri = mesh.triangles()[t];
  Eigen::Matrix3d m;
  for (int a = 0; a < 3; ++a) {
    const auto& p = mesh.nodes()[tri[a]];
    m(0, a) = 1.0;
    m(1, a) = p.x;
    m(2, a) = p.y;
  }
  return m.colPivHouseholderQr().solve(Eigen::Vector3d(1.0, x, y));
}

/// Integrates f(x, y, t) over triangle t with a collapsed tensor Gauss-Legendre rule.
inline double integrate(const tpat::Mesh& mesh, std::size_t t, const std::function<double(double, double)>& f) {
  static const std::array<double, 5> xg = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                           0.9061798459386640};
  static const std::array<double, 5> wg = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};
  const auto& tri = mesh.triangles()[t];
  const auto& p0 = mesh.nodes()[tri[0]];
  const auto& p1 = mesh.nodes()[tri[1]];
  const auto& p2 = mesh.nodes()[tri[2]];
  const double jac = std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double u = 0.5 * (xg[i] + 1.0);
      const double v = 0.5 * (xg[j] + 1.0);
      // Duffy map of the unit square onto the reference triangle.
      const double r = u, q = v * (1.0 - u);
      const double x = p0.x + r * (p1.x - p0.x) + q * (p2.x - p0.x);
      const double y = p0.y + r * (p1.y - p0.y) + q * (p2.y - p0.y);
      s += 0.25 * wg[i] * wg[j] * (1.0 - u) * f(x, y);
    }
  }
  return s * jac;
}

/// Dense P1 stiffness written out directly from the barycentric gradients.
inline MatrixXd dense_stiffness(const tpat::Mesh& mesh, const std::vector<double>& gamma) {
  const int n = static_cast<int>(mesh.num_nodes());
  MatrixXd k = MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    Eigen::Matrix3d m;
    for (int a = 0; a < 3; ++a) {
      m(a, 0) = 1.0;
      m(a, 1) = mesh.nodes()[tri[a]].x;
      m(a, 2) = mesh.nodes()[tri[a]].y;
    }
    const Eigen::Matrix3d c = m.inverse();  // column a holds the coefficients of phi_a
    const double area = 0.5 * std::abs(m.determinant());
    const double g = (gamma[tri[0]] + gamma[tri[1]] + gamma[tri[2]]) / 3.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k(tri[a], tri[b]) += g * area * (c(1, a) * c(1, b) + c(2, a) * c(2, b));
      }
    }
  }
  return k;
}

inline VectorXd dense_lumped(const tpat::Mesh& mesh) {
  VectorXd m = VectorXd::Zero(mesh.num_nodes());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangles()[t]) m(v) += mesh.area(t) / 3.0;
  }
  return m;
}

/// Full Newton on the dense system
///   boundary rows: u_b - g_b = 0,
///   interior rows: (K u)_i + m_i (sigma_i + mu_i |u_i|) u_i = 0.
inline VectorXd dense_newton(const tpat::Mesh& mesh, const std::vector<double>& gamma,
                             const std::vector<double>& sigma, const std::vector<double>& mu,
                             const std::vector<double>& boundary_values, double tol = 1e-14) {
  const int n = static_cast<int>(mesh.num_nodes());
  const MatrixXd k = dense_stiffness(mesh, gamma);
  const VectorXd m = dense_lumped(mesh);
  VectorXd g = VectorXd::Zero(n);
  std::vector<char> bnd(n, 0);
  const auto& bn = mesh.boundary_nodes();
  for (std::size_t i = 0; i < bn.size(); ++i) {
    bnd[bn[i]] = 1;
    g(bn[i]) = boundary_values[i];
  }
  VectorXd u = g;
  for (int it = 0; it < 100; ++it) {
    VectorXd r = k * u;
    MatrixXd jac = k;
    for (int i = 0; i < n; ++i) {
      if (bnd[i]) {
        r(i) = u(i) - g(i);
        jac.row(i).setZero();
        jac(i, i) = 1.0;
      } else {
        r(i) += m(i) * (sigma[i] + mu[i] * std::abs(u(i))) * u(i);
        jac(i, i) += m(i) * (sigma[i] + 2.0 * mu[i] * std::abs(u(i)));
      }
    }
    if (r.norm() < tol) break;
    u -= jac.partialPivLu().solve(r);
  }
  return u;
}

inline std::vector<double> random_field(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

/// Smooth random field a + b x + c y + d sin(e x) cos(f y), scaled into [lo, hi].
inline std::vector<double> smooth_random_field(std::mt19937_64& rng, const tpat::Mesh& mesh, double lo, double hi) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const double b = d(rng), c = d(rng), e = 1.0 + 2.0 * std::abs(d(rng)), f = 1.0 + 2.0 * std::abs(d(rng));
  std::vector<double> v(mesh.num_nodes());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = mesh.nodes()[i];
    // value in [-1, 1]
    v[i] = (b * p.x + c * p.y + std::sin(e * p.x) * std::cos(f * p.y)) / 3.0;
    v[i] = lo + (hi - lo) * 0.5 * (v[i] + 1.0);
  }
  return v;
}

}  // namespace oracle
