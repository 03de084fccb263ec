#include "tpat/kernels.hpp"

#include <algorithm>
#include <vector>

namespace tpat::kernels {

LocalMatrix local_stiffness(const Mesh& mesh, std::size_t t, std::span<const double> coef) {
  const auto& tri = mesh.triangles()[t];
  const auto& p = mesh.nodes();
  const double area = mesh.area(t);
  std::array<double, 3> gx{}, gy{};
  for (int a = 0; a < 3; ++a) {
    const Point& pb = p[tri[(a + 1) % 3]];
    const Point& pc = p[tri[(a + 2) % 3]];
    gx[a] = (pb.y - pc.y) / (2.0 * area);
    gy[a] = (pc.x - pb.x) / (2.0 * area);
  }
  const double mean = (coef[tri[0]] + coef[tri[1]] + coef[tri[2]]) / 3.0;
  LocalMatrix k{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) k[a][b] = mean * area * (gx[a] * gx[b] + gy[a] * gy[b]);
  }
  return k;
}

LocalMatrix local_weighted_mass(const Mesh& mesh, std::size_t t, std::span<const double> weight) {
  const auto& tri = mesh.triangles()[t];
  const double area = mesh.area(t);
  // Integral of l_a l_b l_c over the triangle is area/60 times the product of
  // factorials of the index multiplicities (1, 2 or 6).
  LocalMatrix m{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) {
        int f = 1;
        if (a == b && b == c) {
          f = 6;
        } else if (a == b || b == c || a == c) {
          f = 2;
        }
        s += f * weight[tri[c]];
      }
      m[a][b] = s * area / 60.0;
    }
  }
  return m;
}

namespace {

template <class Local>
void scatter(const Mesh& mesh, Local local, SparseMatrix& out) {
  std::fill(out.val.begin(), out.val.end(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const LocalMatrix e = local(t);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) out.val[out.find(tri[a], tri[b])] += e[a][b];
    }
  }
}

// Element matrices are computed once in parallel, then each row gathers its
// contributions in ascending triangle order, matching `scatter` bit for bit.
template <class Local>
void gather(const Mesh& mesh, Local local, SparseMatrix& out) {
  const long nt = static_cast<long>(mesh.num_triangles());
  std::vector<LocalMatrix> elems(static_cast<std::size_t>(nt));
#pragma omp parallel for schedule(static)
  for (long t = 0; t < nt; ++t) elems[static_cast<std::size_t>(t)] = local(static_cast<std::size_t>(t));

  const long n = static_cast<long>(mesh.num_nodes());
  const auto& incident = mesh.node_triangles();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    for (int k = out.row_ptr[i]; k < out.row_ptr[i + 1]; ++k) out.val[k] = 0.0;
    for (int t : incident[i]) {
      const auto& tri = mesh.triangles()[t];
      int a = 0;
      while (tri[a] != i) ++a;
      const LocalMatrix& e = elems[static_cast<std::size_t>(t)];
      for (int b = 0; b < 3; ++b) out.val[out.find(static_cast<int>(i), tri[b])] += e[a][b];
    }
  }
}

}  // namespace

namespace serial {

void assemble_stiffness(const Mesh& mesh, std::span<const double> coef, SparseMatrix& out) {
  scatter(mesh, [&](std::size_t t) { return local_stiffness(mesh, t, coef); }, out);
}

void assemble_weighted_mass(const Mesh& mesh, std::span<const double> weight, SparseMatrix& out) {
  scatter(mesh, [&](std::size_t t) { return local_weighted_mass(mesh, t, weight); }, out);
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < a.dim; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace serial

namespace parallel {

void assemble_stiffness(const Mesh& mesh, std::span<const double> coef, SparseMatrix& out) {
  gather(mesh, [&](std::size_t t) { return local_stiffness(mesh, t, coef); }, out);
}

void assemble_weighted_mass(const Mesh& mesh, std::span<const double> weight, SparseMatrix& out) {
  gather(mesh, [&](std::size_t t) { return local_weighted_mass(mesh, t, weight); }, out);
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  const long n = static_cast<long>(a.dim);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const long nblocks = static_cast<long>((n + kReduceBlock - 1) / kReduceBlock);
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < nblocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace parallel

}  // namespace tpat::kernels
