#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tpat/phantom.hpp"
#include "tpat/recon_lsq.hpp"

namespace tpat {

enum class Algorithm { kDirect, kLsq };

/// Everything needed to generate synthetic data and run a reconstruction.
///
/// INI layout (all sections optional, defaults below):
///
///   [mesh]        n, data_n (forward mesh; differs from n in crime-free mode)
///   [gruneisen] [gamma] [sigma] [mu]
///                 background = <value>
///                 inclusion<k> = <disk|square|gaussian> cx cy size value
///   [sources]     source<k> = offset slope_x slope_y
///   [noise]       levels = 0 1 2 5     seeds = 1 2 3
///   [algorithm]   name = direct | lsq
///   [lsq]         kappa, grad_tol, max_iterations, history, floor, ceiling,
///                 init_sigma, init_mu
///   [newton]      residual_tol, max_iterations, damping
///   [bounds]      lower, upper   (admissible coefficient range)
struct ExperimentConfig {
  int mesh_n = 32;
  int data_mesh_n = 32;
  PhantomSpec gruneisen;
  PhantomSpec gamma;
  PhantomSpec sigma;
  PhantomSpec mu;
  std::vector<SourceSpec> sources;
  std::vector<double> noise_levels{0.0};
  std::vector<std::uint64_t> seeds{1};
  Algorithm algorithm = Algorithm::kDirect;
  LsqConfig lsq;
  bool kappa_given = false;
  double init_sigma = -1.0;  ///< negative: midpoint of the projection bounds
  double init_mu = -1.0;
  double coeff_lower = 1e-3;
  double coeff_upper = 10.0;

  bool crime_free() const { return data_mesh_n != mesh_n; }

  /// Throws ValidationError naming the offending field.
  void validate() const;

  /// Canonical INI text; parse(to_ini()) reproduces the config.
  std::string to_ini() const;
};

/// Default phantom: smooth gamma with a Gaussian bump and a disk, sigma and mu
/// with disk and square inclusions, and four positive affine sources.
ExperimentConfig default_config();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace tpat
