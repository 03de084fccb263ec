#pragma once

#include <string>
#include <vector>

#include "tpat/field.hpp"
#include "tpat/forward.hpp"
#include "tpat/mesh.hpp"

namespace tpat {

enum class Shape { kDisk, kSquare, kGaussian };

/// Disk and square inclusions overwrite the value inside them (later ones win);
/// Gaussian bumps add `value * exp(-r^2 / (2 size^2))` to the background.
struct Inclusion {
  Shape shape = Shape::kDisk;
  double cx = 0.0;
  double cy = 0.0;
  double size = 0.0;  ///< radius, half side length, or Gaussian width
  double value = 0.0;

  /// "disk cx cy radius value", "square cx cy half_side value", "gaussian cx cy width amplitude".
  static Inclusion parse(const std::string& text);
  std::string to_string() const;
};

struct PhantomSpec {
  double background = 1.0;
  std::vector<Inclusion> inclusions;

  double evaluate(double x, double y) const;
  NodalField sample(const Mesh& mesh) const;
};

/// g(x, y) = offset + slope_x x + slope_y y on the boundary.
struct SourceSpec {
  double offset = 1.0;
  double slope_x = 0.0;
  double slope_y = 0.0;

  /// "offset slope_x slope_y"
  static SourceSpec parse(const std::string& text);
  std::string to_string() const;
  BoundarySource sample(const Mesh& mesh) const;
};

}  // namespace tpat
