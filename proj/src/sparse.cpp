#include "tpat/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tpat/kernels.hpp"

namespace tpat {

int SparseMatrix::find(int i, int j) const {
  auto first = col.begin() + row_ptr[i];
  auto last = col.begin() + row_ptr[i + 1];
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<int>(it - col.begin());
}

double SparseMatrix::at(int i, int j) const {
  int k = find(i, j);
  return k < 0 ? 0.0 : val[k];
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (auto& v : out.val) v *= s;
  return out;
}

SparseMatrix SparseMatrix::plus(const SparseMatrix& other) const {
  if (other.row_ptr != row_ptr || other.col != col) {
    throw std::invalid_argument("SparseMatrix::plus: sparsity patterns differ");
  }
  SparseMatrix out = *this;
  for (std::size_t k = 0; k < val.size(); ++k) out.val[k] += other.val[k];
  return out;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::max_asymmetry() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      m = std::max(m, std::abs(val[k] - at(col[k], static_cast<int>(i))));
    }
  }
  return m;
}

SparseMatrix mesh_pattern(const Mesh& mesh) {
  const std::size_t n = mesh.num_nodes();
  std::vector<std::vector<int>> adj(n);
  for (const auto& t : mesh.triangles()) {
    for (int a : t) {
      for (int b : t) adj[a].push_back(b);
    }
  }
  SparseMatrix m;
  m.dim = n;
  m.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    if (row.empty()) row.push_back(static_cast<int>(i));
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<int>(row.size());
  }
  m.col.reserve(m.row_ptr[n]);
  for (const auto& row : adj) m.col.insert(m.col.end(), row.begin(), row.end());
  m.val.assign(m.col.size(), 0.0);
  return m;
}

void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  kernels::parallel::spmv(a, x, y);
}

std::vector<double> multiply(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.dim);
  multiply(a, x, y);
  return y;
}

}  // namespace tpat
