#include "tpat/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <string>

#include "tpat/error.hpp"
#include "tpat/io.hpp"

namespace tpat {

namespace {

Edge sorted_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles, std::vector<Edge> boundary_edges)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), boundary_edges_(std::move(boundary_edges)) {
  const int n = static_cast<int>(nodes_.size());
  auto in_range = [n](int i) { return i >= 0 && i < n; };

  std::map<Edge, int> edge_count;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    auto& tri = triangles_[t];
    for (int v : tri) {
      if (!in_range(v)) {
        throw ValidationError("triangle " + std::to_string(t) + " references node " + std::to_string(v) +
                              " outside [0, " + std::to_string(n) + ")");
      }
    }
    double a = signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
    if (a == 0.0) throw ValidationError("triangle " + std::to_string(t) + " is degenerate");
    if (a < 0.0) std::swap(tri[1], tri[2]);
    for (int k = 0; k < 3; ++k) ++edge_count[sorted_edge(tri[k], tri[(k + 1) % 3])];
  }

  std::vector<Edge> topo_boundary;
  for (const auto& [e, c] : edge_count) {
    if (c > 2) {
      throw ValidationError("edge (" + std::to_string(e[0]) + ", " + std::to_string(e[1]) + ") shared by " +
                            std::to_string(c) + " triangles");
    }
    if (c == 1) topo_boundary.push_back(e);
  }

  std::vector<Edge> given;
  given.reserve(boundary_edges_.size());
  for (const auto& e : boundary_edges_) {
    if (!in_range(e[0]) || !in_range(e[1])) {
      throw ValidationError("boundary edge references node outside [0, " + std::to_string(n) + ")");
    }
    given.push_back(sorted_edge(e[0], e[1]));
  }
  std::sort(given.begin(), given.end());
  if (given != topo_boundary) {
    throw ValidationError("boundary edges do not match the edges owned by exactly one triangle");
  }

  boundary_flag_.assign(nodes_.size(), 0);
  for (const auto& e : boundary_edges_) {
    boundary_flag_[e[0]] = 1;
    boundary_flag_[e[1]] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (boundary_flag_[i]) boundary_nodes_.push_back(i);
  }

  node_triangles_.assign(nodes_.size(), {});
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int v : triangles_[t]) node_triangles_[v].push_back(static_cast<int>(t));
  }
}

double Mesh::area(std::size_t t) const {
  const auto& tri = triangles_[t];
  return signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
}

double Mesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) s += area(t);
  return s;
}

Mesh build_square_mesh(int n) {
  if (n < 1) throw ValidationError("build_square_mesh: subdivisions must be >= 1, got " + std::to_string(n));
  const int m = n + 1;
  auto id = [m](int i, int j) { return i + j * m; };

  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      // Pin the outer coordinates to exactly +-1.
      double x = (i == n) ? 1.0 : -1.0 + 2.0 * i / n;
      double y = (j == n) ? 1.0 : -1.0 + 2.0 * j / n;
      nodes.push_back({x, y});
    }
  }

  std::vector<Triangle> tris;
  tris.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int ll = id(i, j), lr = id(i + 1, j), ur = id(i + 1, j + 1), ul = id(i, j + 1);
      tris.push_back({ll, lr, ur});
      tris.push_back({ll, ur, ul});
    }
  }

  // Counterclockwise walk: bottom, right, top, left.
  std::vector<Edge> edges;
  edges.reserve(4 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) edges.push_back({id(i, 0), id(i + 1, 0)});
  for (int j = 0; j < n; ++j) edges.push_back({id(n, j), id(n, j + 1)});
  for (int i = n; i > 0; --i) edges.push_back({id(i, n), id(i - 1, n)});
  for (int j = n; j > 0; --j) edges.push_back({id(0, j), id(0, j - 1)});

  return Mesh(std::move(nodes), std::move(tris), std::move(edges));
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::string s;
  s += "nodes " + std::to_string(mesh.num_nodes()) + "\n";
  for (const auto& p : mesh.nodes()) s += format_double(p.x) + " " + format_double(p.y) + "\n";
  s += "triangles " + std::to_string(mesh.num_triangles()) + "\n";
  for (const auto& t : mesh.triangles()) {
    s += std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  }
  s += "boundary_edges " + std::to_string(mesh.boundary_edges().size()) + "\n";
  for (const auto& e : mesh.boundary_edges()) s += std::to_string(e[0]) + " " + std::to_string(e[1]) + "\n";
  write_text_file(path, s);
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::vector<std::string> next(std::size_t expected_tokens, const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto tok = split_ws(line);
      if (tok.empty()) continue;
      if (tok.size() != expected_tokens) fail(std::string("expected ") + what);
      return tok;
    }
    ++line_no_;
    fail(std::string("unexpected end of file, expected ") + what);
  }

  std::size_t header(const char* keyword) {
    auto tok = next(2, keyword);
    if (tok[0] != keyword) fail(std::string("expected header '") + keyword + " <count>'");
    return static_cast<std::size_t>(to_int(tok[1]));
  }

  long to_int(const std::string& s) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v < 0) fail("bad integer '" + s + "'");
    return v;
  }

  double to_double(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("bad number '" + s + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("mesh file line " + std::to_string(line_no_) + ": " + msg);
  }

  int line_no() const { return line_no_; }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

}  // namespace

Mesh load_mesh(const std::filesystem::path& path) {
  LineReader r(read_text_file(path));

  std::size_t nn = r.header("nodes");
  std::vector<Point> nodes(nn);
  for (auto& p : nodes) {
    auto tok = r.next(2, "'x y'");
    p = {r.to_double(tok[0]), r.to_double(tok[1])};
  }

  auto check_index = [&](long v) {
    if (v >= static_cast<long>(nn)) {
      r.fail("node index " + std::to_string(v) + " out of range for " + std::to_string(nn) + " nodes");
    }
    return static_cast<int>(v);
  };

  std::size_t nt = r.header("triangles");
  std::vector<Triangle> tris(nt);
  for (auto& t : tris) {
    auto tok = r.next(3, "'i j k'");
    for (int k = 0; k < 3; ++k) t[k] = check_index(r.to_int(tok[k]));
    const int line = r.line_no();
    if (signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) == 0.0) {
      throw ValidationError("mesh file line " + std::to_string(line) + ": degenerate triangle");
    }
  }

  std::size_t nb = r.header("boundary_edges");
  std::vector<Edge> edges(nb);
  for (auto& e : edges) {
    auto tok = r.next(2, "'i j'");
    e = {check_index(r.to_int(tok[0])), check_index(r.to_int(tok[1]))};
  }

  return Mesh(std::move(nodes), std::move(tris), std::move(edges));
}

}  // namespace tpat
