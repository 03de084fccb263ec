#pragma once

// Data-parallel kernels. Each kernel has a serial reference and an OpenMP
// version. The parallel versions produce results that do not depend on the
// thread count: assembly gathers per row in ascending triangle order (the same
// order the serial scatter uses), and reductions sum fixed-size blocks in
// index order.

#include <array>
#include <span>

#include "tpat/mesh.hpp"
#include "tpat/sparse.hpp"

namespace tpat::kernels {

using LocalMatrix = std::array<std::array<double, 3>, 3>;

/// Element stiffness for a linear coefficient: mean(coef) * area * grad_a . grad_b.
LocalMatrix local_stiffness(const Mesh& mesh, std::size_t t, std::span<const double> coef);

/// Element mass weighted by a linear field, exact for the cubic integrand.
LocalMatrix local_weighted_mass(const Mesh& mesh, std::size_t t, std::span<const double> weight);

/// Block length for deterministic reductions.
inline constexpr std::size_t kReduceBlock = 512;

namespace serial {

void assemble_stiffness(const Mesh& mesh, std::span<const double> coef, SparseMatrix& out);
void assemble_weighted_mass(const Mesh& mesh, std::span<const double> weight, SparseMatrix& out);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace parallel {

void assemble_stiffness(const Mesh& mesh, std::span<const double> coef, SparseMatrix& out);
void assemble_weighted_mass(const Mesh& mesh, std::span<const double> weight, SparseMatrix& out);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace parallel

}  // namespace tpat::kernels
