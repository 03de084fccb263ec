#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tpat/mesh.hpp"

namespace tpat {

/// Compressed sparse row matrix. Columns within a row are sorted ascending.
struct SparseMatrix {
  std::size_t dim = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }

  /// Position of (i, j) in `val`, or -1 if outside the pattern.
  int find(int i, int j) const;
  double at(int i, int j) const;

  /// Same pattern, every value scaled.
  SparseMatrix scaled(double s) const;

  /// Entrywise sum; patterns must match.
  SparseMatrix plus(const SparseMatrix& other) const;

  double max_abs() const;
  double max_asymmetry() const;
};

/// Sparsity pattern of P1 couplings on `mesh` with zeroed values.
SparseMatrix mesh_pattern(const Mesh& mesh);

/// y = A x
void multiply(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> multiply(const SparseMatrix& a, std::span<const double> x);

}  // namespace tpat
