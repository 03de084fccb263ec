#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tpat/config.hpp"
#include "tpat/fem.hpp"
#include "tpat/forward.hpp"
#include "tpat/mesh.hpp"
#include "tpat/recon_direct.hpp"
#include "tpat/recon_lsq.hpp"

namespace tpat {

inline constexpr const char* kVersion = "tpat 1.0.0";

/// True coefficients and sources sampled on one mesh.
struct Truth {
  Mesh mesh;
  CoefficientSet coeffs;
  std::vector<BoundarySource> sources;
};

/// Samples the configured phantom on build_square_mesh(n). Throws
/// ValidationError naming the coefficient if it leaves [lower, upper], or if a
/// source is not strictly positive.
Truth build_truth(const ExperimentConfig& cfg, int n);

/// Noise-free forward data on the data mesh.
struct CleanData {
  Truth truth;
  std::vector<ForwardSolution> solutions;
  std::vector<NodalField> data;
};

CleanData generate_clean_data(const ExperimentConfig& cfg);

/// Noisy data for one (noise level, seed), transferred to `target` when the
/// data mesh differs from it. Datum j uses the stream derive_seed(seed, j).
DatumSet make_datum_set(const CleanData& clean, const Mesh& target, const std::vector<BoundarySource>& target_sources,
                        double epsilon, std::uint64_t seed);

std::string noisy_datum_name(std::size_t source, double epsilon, std::uint64_t seed);

/// Writes mesh, u_j, H_j, noisy data for every (level, seed), a forward report
/// and a manifest. Returns the written file names (relative to out_dir).
std::vector<std::string> run_forward(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                     const std::string& command_line = {});

enum class Experiment { kI, kII, kIII, kIV };
Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct ErrorRow {
  std::string coefficient;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double error_percent = 0.0;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;

  /// Mean error over seeds for one (coefficient, level).
  double mean(const std::string& coefficient, double epsilon) const;
  /// CSV "experiment,coefficient,epsilon,seed,error_percent" followed by rows
  /// with seed "mean".
  std::string to_csv(Experiment which) const;
};

struct Reconstruction {
  NodalField sigma;
  NodalField mu;
  LsqReport lsq_report;  ///< empty for direct methods
  std::string condition_csv;
};

/// Runs one reconstruction of the given experiment type on a datum set.
Reconstruction reconstruct(Experiment which, const ExperimentConfig& cfg, const Truth& inversion,
                           const DatumSet& data);

/// LSQ settings with the default kappa and initial fields filled in.
LsqConfig resolved_lsq(const ExperimentConfig& cfg, Experiment which, const DatumSet& data);

/// Full sweep over noise levels and seeds. When out_dir is non-empty, writes
/// error_table.csv, the first seed's reconstructions per level, and a manifest.
ErrorTable run_experiment(Experiment which, const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                          const std::string& command_line = {});

std::string manifest_text(const ExperimentConfig& cfg, const std::string& command, const std::string& command_line);

}  // namespace tpat
