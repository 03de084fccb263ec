// Command-line front end.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 solver failure.

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "tpat/error.hpp"
#include "tpat/frechet.hpp"
#include "tpat/io.hpp"
#include "tpat/metrics.hpp"
#include "tpat/pipeline.hpp"
#include "tpat/transfer.hpp"

using namespace tpat;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

struct Common {
  std::string config;
  std::string out = "tpat_out";
  std::vector<std::uint64_t> seeds;
  std::vector<double> noise;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI configuration file (defaults built in)")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--threads", c.threads, "OpenMP threads (default: runtime setting)")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seeds, "noise seed(s), overriding [noise] seeds")->delimiter(',');
  cmd->add_option("--noise", c.noise, "noise levels in percent, overriding [noise] levels")->delimiter(',');
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
  if (!c.seeds.empty()) cfg.seeds = c.seeds;
  if (!c.noise.empty()) cfg.noise_levels = c.noise;
  cfg.validate();
  if (c.threads > 0) omp_set_num_threads(c.threads);
  return cfg;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

void print_table(const ErrorTable& t, Experiment which) {
  std::vector<std::pair<std::string, double>> seen;
  for (const auto& r : t.rows) {
    std::pair<std::string, double> k{r.coefficient, r.epsilon};
    if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
    seen.push_back(k);
    std::printf("experiment %s  %-5s  eps %-4s  mean error %.4g%%\n", to_string(which).c_str(), k.first.c_str(),
                format_double(k.second).c_str(), t.mean(k.first, k.second));
  }
}

int cmd_mesh(int n, const std::string& out) {
  const Mesh mesh = build_square_mesh(n);
  save_mesh(mesh, fs::path(out) / "mesh.txt");
  std::printf("mesh n=%d: %zu nodes, %zu triangles, %zu boundary nodes -> %s\n", n, mesh.num_nodes(),
              mesh.num_triangles(), mesh.boundary_nodes().size(), (fs::path(out) / "mesh.txt").c_str());
  return 0;
}

int cmd_forward(const Common& c, const std::string& cl) {
  const auto cfg = resolve(c);
  const auto files = run_forward(cfg, c.out, cl);
  std::printf("wrote %zu files to %s\n", files.size(), c.out.c_str());
  return 0;
}

int cmd_experiment(Experiment which, const Common& c, const std::string& cl) {
  const auto cfg = resolve(c);
  const auto table = run_experiment(which, cfg, c.out, cl);
  print_table(table, which);
  std::printf("error table: %s\n", (fs::path(c.out) / "error_table.csv").c_str());
  return 0;
}

// Reconstruction from the noisy datum files written by `forward`.
int cmd_recon_from_files(bool lsq, bool single, const Common& c, const std::string& data_dir) {
  const auto cfg = resolve(c);
  const Truth truth = build_truth(cfg, cfg.mesh_n);
  const Mesh data_mesh = load_mesh(fs::path(data_dir) / "mesh.txt");
  const Experiment which = lsq ? (single ? Experiment::kII : Experiment::kIV)
                               : (single ? Experiment::kI : Experiment::kIII);
  std::string csv = "experiment,coefficient,epsilon,seed,error_percent\n";
  for (auto seed : cfg.seeds) {
    for (double eps : cfg.noise_levels) {
      DatumSet d;
      d.noise_level = eps;
      d.seed = seed;
      d.sources = truth.sources;
      for (std::size_t j = 0; j < truth.sources.size(); ++j) {
        const NodalField h = load_field(fs::path(data_dir) / noisy_datum_name(j, eps, seed));
        check_size(data_mesh, h, "datum file");
        d.data.push_back(transfer_field(data_mesh, h, truth.mesh));
      }
      const Reconstruction rec = reconstruct(which, cfg, truth, d);
      const std::string tag = "_eps" + format_double(eps) + "_seed" + std::to_string(seed);
      save_field(rec.mu, fs::path(c.out) / ("mu" + tag + ".csv"));
      csv += to_string(which) + ",mu," + format_double(eps) + "," + std::to_string(seed) + "," +
             format_double(relative_l2_error(rec.mu, truth.coeffs.mu, truth.mesh)) + "\n";
      if (!single) {
        save_field(rec.sigma, fs::path(c.out) / ("sigma" + tag + ".csv"));
        csv += to_string(which) + ",sigma," + format_double(eps) + "," + std::to_string(seed) + "," +
               format_double(relative_l2_error(rec.sigma, truth.coeffs.sigma, truth.mesh)) + "\n";
      }
      if (!rec.condition_csv.empty()) write_text_file(fs::path(c.out) / ("condition" + tag + ".csv"), rec.condition_csv);
      if (!rec.lsq_report.history.empty()) {
        write_text_file(fs::path(c.out) / ("lsq_report" + tag + ".csv"), rec.lsq_report.to_csv());
      }
    }
  }
  write_text_file(fs::path(c.out) / "error_table.csv", csv);
  std::fputs(csv.c_str(), stdout);
  return 0;
}

int cmd_gradcheck(const Common& c, int directions, double tol) {
  const auto cfg = resolve(c);
  const CleanData clean = generate_clean_data(cfg);
  const Truth inv = cfg.crime_free() ? build_truth(cfg, cfg.mesh_n) : clean.truth;
  const double eps = cfg.noise_levels.back();
  const auto seed = cfg.seeds.front();
  const DatumSet data = make_datum_set(clean, inv.mesh, inv.sources, eps, seed);
  const LsqConfig l = resolved_lsq(cfg, Experiment::kIV, data);
  NewtonConfig newton = l.newton;
  newton.residual_tol = std::min(newton.residual_tol, 1e-13);
  newton.linear_tol = std::min(newton.linear_tol, 1e-14);
  const LsqProblem problem(inv.mesh, inv.coeffs.gruneisen, inv.coeffs.gamma, data, l.kappa, newton);

  // Evaluation point: the midpoint initial guess perturbed by a smooth bump.
  const double mid = 0.5 * (l.bound_floor + l.bound_ceiling);
  const std::size_t n = inv.mesh.num_nodes();
  NodalField sigma(n), mu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = inv.mesh.nodes()[i];
    sigma[i] = (cfg.init_sigma > 0.0 ? cfg.init_sigma : mid) * (1.0 + 0.2 * p.x * p.y);
    mu[i] = (cfg.init_mu > 0.0 ? cfg.init_mu : mid) * (1.0 + 0.2 * p.x);
  }
  GradientFields g;
  problem.evaluate(sigma, mu, g);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::string csv = "direction,coefficient,finite_difference,adjoint,relative_error\n";
  double worst = 0.0;
  for (int d = 0; d < directions; ++d) {
    for (int which = 0; which < 2; ++which) {
      const NodalField& x = which == 0 ? sigma : mu;
      const NodalField& gx = which == 0 ? g.g_sigma : g.g_mu;
      std::vector<double> dir(n);
      for (auto& v : dir) v = unit(rng);
      double scale = 0.0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      auto phi = [&](std::span<const double> y) {
        const NodalField f(std::vector<double>(y.begin(), y.end()));
        return which == 0 ? problem.objective(f, mu).value : problem.objective(sigma, f).value;
      };
      const double fd = fd_directional_derivative(phi, x.span(), dir, 1e-6 * scale);
      double ad = 0.0;
      for (std::size_t i = 0; i < n; ++i) ad += problem.lumped()[i] * gx[i] * dir[i];
      const double rel = std::abs(fd - ad) / std::max(std::abs(fd), 1e-300);
      worst = std::max(worst, rel);
      csv += std::to_string(d + 1) + "," + (which == 0 ? "sigma" : "mu") + "," + format_double(fd) + "," +
             format_double(ad) + "," + format_double(rel) + "\n";
    }
  }
  write_text_file(fs::path(c.out) / "gradcheck.csv", csv);
  std::printf("gradient check: %d directions per coefficient, worst relative error %.3g (tolerance %.3g): %s\n",
              directions, worst, tol, worst <= tol ? "PASS" : "FAIL");
  return worst <= tol ? 0 : kExitSolver;
}

int cmd_transfer(const std::string& from, const std::string& field, const std::string& to, int to_n,
                 const std::string& out) {
  const Mesh src = load_mesh(from);
  const NodalField f = load_field(field);
  check_size(src, f, "transfer: field");
  const Mesh dst = to.empty() ? build_square_mesh(to_n) : load_mesh(to);
  const NodalField t = transfer_field(src, f, dst);
  save_field(t, out);
  std::printf("transferred %zu -> %zu nodes: %s\n", src.num_nodes(), dst.num_nodes(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruction of single- and two-photon absorption coefficients from internal data"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  const std::string cl = command_line(argc, argv);

  int mesh_n = 32;
  std::string mesh_out = ".";
  auto* mesh = app.add_subcommand("mesh", "write the structured mesh of (-1,1)^2");
  mesh->add_option("--n", mesh_n, "cells per side")->check(CLI::PositiveNumber);
  mesh->add_option("--out", mesh_out, "output directory");

  Common fwd;
  auto* forward = app.add_subcommand("forward", "synthesize clean and noisy internal data");
  add_common(forward, fwd);

  Common rd;
  std::string rd_data;
  bool rd_mu_only = false;
  auto* recon_direct = app.add_subcommand("recon-direct", "direct reconstruction (pointwise formulas)");
  add_common(recon_direct, rd);
  recon_direct->add_option("--data", rd_data, "directory written by `forward` (default: synthesize in memory)")
      ->check(CLI::ExistingDirectory);
  recon_direct->add_flag("--mu-only", rd_mu_only, "recover mu with sigma known");

  Common rl;
  std::string rl_data;
  bool rl_mu_only = false;
  auto* recon_lsq = app.add_subcommand("recon-lsq", "regularized least-squares reconstruction");
  add_common(recon_lsq, rl);
  recon_lsq->add_option("--data", rl_data, "directory written by `forward` (default: synthesize in memory)")
      ->check(CLI::ExistingDirectory);
  recon_lsq->add_flag("--mu-only", rl_mu_only, "recover mu with sigma known");

  Common gc;
  int gc_dirs = 20;
  double gc_tol = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "compare the adjoint gradient with central differences");
  add_common(gradcheck, gc);
  gradcheck->add_option("--directions", gc_dirs, "random directions per coefficient")->check(CLI::PositiveNumber);
  gradcheck->add_option("--tol", gc_tol, "relative error tolerance");

  Common ex;
  std::string ex_which;
  auto* experiment = app.add_subcommand("experiment", "run experiment I, II, III or IV over noise levels and seeds");
  add_common(experiment, ex);
  experiment->add_option("which", ex_which, "I | II | III | IV")->required();

  std::string tr_from, tr_field, tr_to, tr_out = "transferred.csv";
  int tr_n = 0;
  auto* transfer = app.add_subcommand("transfer", "interpolate a nodal field onto another mesh");
  transfer->add_option("--from", tr_from, "source mesh file")->required()->check(CLI::ExistingFile);
  transfer->add_option("--field", tr_field, "field CSV on the source mesh")->required()->check(CLI::ExistingFile);
  auto* to_opt = transfer->add_option("--to", tr_to, "target mesh file")->check(CLI::ExistingFile);
  auto* to_n_opt = transfer->add_option("--to-n", tr_n, "target structured mesh size")->check(CLI::PositiveNumber);
  to_opt->excludes(to_n_opt);
  transfer->add_option("--out", tr_out, "output field CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*mesh) return cmd_mesh(mesh_n, mesh_out);
    if (*forward) return cmd_forward(fwd, cl);
    if (*recon_direct) {
      if (!rd_data.empty()) return cmd_recon_from_files(false, rd_mu_only, rd, rd_data);
      return cmd_experiment(rd_mu_only ? Experiment::kI : Experiment::kIII, rd, cl);
    }
    if (*recon_lsq) {
      if (!rl_data.empty()) return cmd_recon_from_files(true, rl_mu_only, rl, rl_data);
      return cmd_experiment(rl_mu_only ? Experiment::kII : Experiment::kIV, rl, cl);
    }
    if (*gradcheck) return cmd_gradcheck(gc, gc_dirs, gc_tol);
    if (*experiment) return cmd_experiment(parse_experiment(ex_which), ex, cl);
    if (*transfer) {
      if (tr_to.empty() && tr_n == 0) throw ValidationError("transfer: give --to or --to-n");
      return cmd_transfer(tr_from, tr_field, tr_to, tr_n, tr_out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    // File system and other runtime errors are problems with the input.
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
