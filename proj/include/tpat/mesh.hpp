#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace tpat {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Conforming triangulation of a planar polygon.
///
/// Triangles are stored counterclockwise. The boundary is described both as a
/// list of edges and as a sorted node set; `is_boundary` gives O(1) lookup.
/// Instances are immutable once built.
class Mesh {
 public:
  Mesh() = default;

  /// Validates and normalizes the raw listing. Clockwise triangles are
  /// reoriented; degenerate triangles, out-of-range indices, and boundary
  /// edges that disagree with the triangle topology throw ValidationError.
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles, std::vector<Edge> boundary_edges);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& boundary_edges() const { return boundary_edges_; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  bool is_boundary(int node) const { return boundary_flag_[static_cast<std::size_t>(node)] != 0; }

  double area(std::size_t t) const;
  double total_area() const;

  /// Incident triangles per node, each list ascending by triangle index.
  const std::vector<std::vector<int>>& node_triangles() const { return node_triangles_; }

  bool operator==(const Mesh& other) const {
    return nodes_ == other.nodes_ && triangles_ == other.triangles_ &&
           boundary_edges_ == other.boundary_edges_;
  }

 private:
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> boundary_edges_;
  std::vector<int> boundary_nodes_;
  std::vector<char> boundary_flag_;
  std::vector<std::vector<int>> node_triangles_;
};

/// Signed area of (a, b, c); positive for counterclockwise order.
double signed_area(const Point& a, const Point& b, const Point& c);

/// Structured mesh of (-1,1)^2 with n cells per side, each cell split along
/// its lower-left to upper-right diagonal. Node (i, j) has index i + j*(n+1).
Mesh build_square_mesh(int n);

/// Text format:
///   nodes N        / N lines "x y"
///   triangles T    / T lines "i j k"   (0-based)
///   boundary_edges B / B lines "i j"
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh load_mesh(const std::filesystem::path& path);

}  // namespace tpat
