#include "tpat/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tpat/error.hpp"
#include "tpat/fem.hpp"
#include "tpat/io.hpp"

namespace tpat {

namespace {

// Uniform bucket grid over the bounding box; each bucket lists the triangles
// whose bounding boxes overlap it.
class TriangleLocator {
 public:
  explicit TriangleLocator(const Mesh& mesh) : mesh_(mesh) {
    const auto& p = mesh.nodes();
    for (const auto& q : p) {
      xmin_ = std::min(xmin_, q.x);
      xmax_ = std::max(xmax_, q.x);
      ymin_ = std::min(ymin_, q.y);
      ymax_ = std::max(ymax_, q.y);
    }
    dim_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()) / 2.0)));
    buckets_.assign(static_cast<std::size_t>(dim_) * dim_, {});
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      double bx0 = p[tri[0]].x, bx1 = bx0, by0 = p[tri[0]].y, by1 = by0;
      for (int v : tri) {
        bx0 = std::min(bx0, p[v].x);
        bx1 = std::max(bx1, p[v].x);
        by0 = std::min(by0, p[v].y);
        by1 = std::max(by1, p[v].y);
      }
      for (int j = cell_y(by0); j <= cell_y(by1); ++j) {
        for (int i = cell_x(bx0); i <= cell_x(bx1); ++i) buckets_[i + j * dim_].push_back(static_cast<int>(t));
      }
    }
  }

  /// Triangle index and barycentric weights of the triangle that best contains q.
  bool locate(const Point& q, int& tri, std::array<double, 3>& bary) const {
    const double tol = 1e-10;
    double best = -std::numeric_limits<double>::infinity();
    for (int t : buckets_[cell_x(q.x) + cell_y(q.y) * dim_]) {
      std::array<double, 3> l = barycentric(t, q);
      const double worst = std::min({l[0], l[1], l[2]});
      if (worst > best) {
        best = worst;
        tri = t;
        bary = l;
      }
    }
    return best >= -tol;
  }

 private:
  int cell_x(double x) const { return clampi(static_cast<int>((x - xmin_) / (xmax_ - xmin_) * dim_)); }
  int cell_y(double y) const { return clampi(static_cast<int>((y - ymin_) / (ymax_ - ymin_) * dim_)); }
  int clampi(int i) const { return std::clamp(i, 0, dim_ - 1); }

  std::array<double, 3> barycentric(int t, const Point& q) const {
    const auto& tri = mesh_.triangles()[t];
    const auto& p = mesh_.nodes();
    const double a = signed_area(p[tri[0]], p[tri[1]], p[tri[2]]);
    return {signed_area(q, p[tri[1]], p[tri[2]]) / a, signed_area(p[tri[0]], q, p[tri[2]]) / a,
            signed_area(p[tri[0]], p[tri[1]], q) / a};
  }

  const Mesh& mesh_;
  double xmin_ = std::numeric_limits<double>::infinity(), xmax_ = -std::numeric_limits<double>::infinity();
  double ymin_ = std::numeric_limits<double>::infinity(), ymax_ = -std::numeric_limits<double>::infinity();
  int dim_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace

NodalField transfer_field(const Mesh& from, const NodalField& field, const Mesh& to) {
  check_size(from, field, "transfer_field");
  if (&from == &to || from == to) return field;
  TriangleLocator loc(from);
  NodalField out(to.num_nodes());
  for (std::size_t i = 0; i < to.num_nodes(); ++i) {
    int t = -1;
    std::array<double, 3> l{};
    if (!loc.locate(to.nodes()[i], t, l)) {
      throw ValidationError("transfer_field: target node " + std::to_string(i) + " at (" +
                            format_double(to.nodes()[i].x) + ", " + format_double(to.nodes()[i].y) +
                            ") lies outside the source mesh");
    }
    const auto& tri = from.triangles()[t];
    out[i] = l[0] * field[tri[0]] + l[1] * field[tri[1]] + l[2] * field[tri[2]];
  }
  return out;
}

}  // namespace tpat
