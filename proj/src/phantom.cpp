#include "tpat/phantom.hpp"

#include <charconv>
#include <cmath>

#include "tpat/error.hpp"
#include "tpat/io.hpp"

namespace tpat {

namespace {

double parse_number(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ValidationError("bad number '" + s + "' in '" + context + "'");
  }
  return v;
}

}  // namespace

Inclusion Inclusion::parse(const std::string& text) {
  auto tok = split_ws(text);
  if (tok.size() != 5) throw ValidationError("inclusion '" + text + "': expected '<shape> cx cy size value'");
  Inclusion inc;
  if (tok[0] == "disk") {
    inc.shape = Shape::kDisk;
  } else if (tok[0] == "square") {
    inc.shape = Shape::kSquare;
  } else if (tok[0] == "gaussian") {
    inc.shape = Shape::kGaussian;
  } else {
    throw ValidationError("inclusion '" + text + "': unknown shape '" + tok[0] + "'");
  }
  inc.cx = parse_number(tok[1], text);
  inc.cy = parse_number(tok[2], text);
  inc.size = parse_number(tok[3], text);
  inc.value = parse_number(tok[4], text);
  if (!(inc.size > 0.0)) throw ValidationError("inclusion '" + text + "': size must be positive");
  return inc;
}

std::string Inclusion::to_string() const {
  const char* name = shape == Shape::kDisk ? "disk" : shape == Shape::kSquare ? "square" : "gaussian";
  return std::string(name) + " " + format_double(cx) + " " + format_double(cy) + " " + format_double(size) + " " +
         format_double(value);
}

double PhantomSpec::evaluate(double x, double y) const {
  double v = background;
  for (const auto& inc : inclusions) {
    const double dx = x - inc.cx, dy = y - inc.cy;
    switch (inc.shape) {
      case Shape::kDisk:
        if (dx * dx + dy * dy <= inc.size * inc.size) v = inc.value;
        break;
      case Shape::kSquare:
        if (std::abs(dx) <= inc.size && std::abs(dy) <= inc.size) v = inc.value;
        break;
      case Shape::kGaussian:
        v += inc.value * std::exp(-(dx * dx + dy * dy) / (2.0 * inc.size * inc.size));
        break;
    }
  }
  return v;
}

NodalField PhantomSpec::sample(const Mesh& mesh) const {
  NodalField f(mesh.num_nodes());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = evaluate(mesh.nodes()[i].x, mesh.nodes()[i].y);
  return f;
}

SourceSpec SourceSpec::parse(const std::string& text) {
  auto tok = split_ws(text);
  if (tok.size() != 3) throw ValidationError("source '" + text + "': expected 'offset slope_x slope_y'");
  return {parse_number(tok[0], text), parse_number(tok[1], text), parse_number(tok[2], text)};
}

std::string SourceSpec::to_string() const {
  return format_double(offset) + " " + format_double(slope_x) + " " + format_double(slope_y);
}

BoundarySource SourceSpec::sample(const Mesh& mesh) const {
  return BoundarySource::from_function(mesh, [this](double x, double y) { return offset + slope_x * x + slope_y * y; });
}

}  // namespace tpat
