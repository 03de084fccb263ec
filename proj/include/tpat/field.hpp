#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tpat {

/// Piecewise-linear scalar field: one value per mesh node, in mesh order.
class NodalField {
 public:
  NodalField() = default;
  explicit NodalField(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit NodalField(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool operator==(const NodalField&) const = default;

 private:
  std::vector<double> values_;
};

}  // namespace tpat
