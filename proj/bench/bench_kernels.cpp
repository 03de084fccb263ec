// Serial vs OpenMP timings of the assembly and linear-algebra kernels, plus one
// forward solve. Usage: tpat_bench [n] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "tpat/forward.hpp"
#include "tpat/kernels.hpp"
#include "tpat/mesh.hpp"
#include "tpat/sparse.hpp"

using namespace tpat;
namespace k = tpat::kernels;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-22s %12.3f %12.3f %9.2fx\n", name, 1e3 * serial, 1e3 * parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 256;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  if (n < 1 || repeats < 1) {
    std::fprintf(stderr, "usage: tpat_bench [n >= 1] [repeats >= 1]\n");
    return 1;
  }
  const Mesh mesh = build_square_mesh(n);
  const std::size_t nn = mesh.num_nodes();
  std::vector<double> coef(nn), x(nn), y(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    coef[i] = 1.0 + 0.5 * mesh.nodes()[i].x * mesh.nodes()[i].y;
    x[i] = 1.0 / static_cast<double>(i + 1);
  }
  SparseMatrix a = mesh_pattern(mesh), b = mesh_pattern(mesh);

  std::printf("mesh n=%d: %zu nodes, %zu nonzeros, %d threads, best of %d\n", n, nn, a.nnz(), omp_get_max_threads(),
              repeats);
  std::printf("%-22s %12s %12s %10s\n", "kernel", "serial ms", "parallel ms", "speedup");

  row("assemble_stiffness", best_of(repeats, [&] { k::serial::assemble_stiffness(mesh, coef, a); }),
      best_of(repeats, [&] { k::parallel::assemble_stiffness(mesh, coef, b); }));
  row("assemble_mass", best_of(repeats, [&] { k::serial::assemble_weighted_mass(mesh, coef, a); }),
      best_of(repeats, [&] { k::parallel::assemble_weighted_mass(mesh, coef, b); }));
  row("spmv", best_of(repeats, [&] { k::serial::spmv(a, x, y); }),
      best_of(repeats, [&] { k::parallel::spmv(a, x, y); }));
  volatile double sink = 0.0;
  row("dot", best_of(repeats, [&] { sink = k::serial::dot(x, coef); }),
      best_of(repeats, [&] { sink = k::parallel::dot(x, coef); }));
  row("axpy", best_of(repeats, [&] { k::serial::axpy(1e-9, x, y); }),
      best_of(repeats, [&] { k::parallel::axpy(1e-9, x, y); }));
  (void)sink;

  CoefficientSet c{NodalField(nn, 1.0), NodalField(coef), NodalField(nn, 0.2), NodalField(nn, 0.1)};
  for (auto& v : c.gamma) v *= 0.1;
  const auto g = BoundarySource::constant(mesh, 2.0);
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const double t1 = best_of(1, [&] { solve_semilinear(mesh, c, g); });
  omp_set_num_threads(threads);
  const double tp = best_of(1, [&] { solve_semilinear(mesh, c, g); });
  row("forward solve", t1, tp);
  return 0;
}
