#include "tpat/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "tpat/error.hpp"
#include "tpat/io.hpp"
#include "tpat/metrics.hpp"
#include "tpat/transfer.hpp"

namespace tpat {

Truth build_truth(const ExperimentConfig& cfg, int n) {
  Truth t{build_square_mesh(n), {}, {}};
  t.coeffs.gruneisen = cfg.gruneisen.sample(t.mesh);
  t.coeffs.gamma = cfg.gamma.sample(t.mesh);
  t.coeffs.sigma = cfg.sigma.sample(t.mesh);
  t.coeffs.mu = cfg.mu.sample(t.mesh);
  t.coeffs.validate(t.mesh.num_nodes(), cfg.coeff_lower, cfg.coeff_upper);
  for (std::size_t j = 0; j < cfg.sources.size(); ++j) {
    t.sources.push_back(cfg.sources[j].sample(t.mesh));
    if (!(t.sources.back().min() > 0.0)) {
      throw ValidationError("sources.source" + std::to_string(j + 1) + " is not strictly positive on the boundary");
    }
  }
  return t;
}

CleanData generate_clean_data(const ExperimentConfig& cfg) {
  CleanData c{build_truth(cfg, cfg.data_mesh_n), {}, {}};
  SemilinearOperator op(c.truth.mesh, c.truth.coeffs);
  const long nj = static_cast<long>(c.truth.sources.size());
  c.solutions.resize(static_cast<std::size_t>(nj));
  std::vector<std::string> errors(static_cast<std::size_t>(nj));
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nj; ++j) {
    try {
      c.solutions[j] = solve_semilinear(op, c.truth.sources[j], cfg.lsq.newton);
    } catch (const SolverError& e) {
      errors[j] = e.what();
    }
  }
  for (long j = 0; j < nj; ++j) {
    if (!errors[j].empty()) throw SolverError("forward solve for source " + std::to_string(j + 1) + ": " + errors[j]);
  }
  for (const auto& s : c.solutions) c.data.push_back(compute_datum(c.truth.coeffs, s.u));
  return c;
}

DatumSet make_datum_set(const CleanData& clean, const Mesh& target, const std::vector<BoundarySource>& target_sources,
                        double epsilon, std::uint64_t seed) {
  DatumSet d;
  d.noise_level = epsilon;
  d.seed = seed;
  d.sources = target_sources;
  for (std::size_t j = 0; j < clean.data.size(); ++j) {
    NodalField noisy = add_noise(clean.data[j], epsilon, derive_seed(seed, j));
    d.data.push_back(transfer_field(clean.truth.mesh, noisy, target));
  }
  return d;
}

std::string noisy_datum_name(std::size_t source, double epsilon, std::uint64_t seed) {
  return "H_" + std::to_string(source + 1) + "_eps" + format_double(epsilon) + "_seed" + std::to_string(seed) + ".csv";
}

std::string manifest_text(const ExperimentConfig& cfg, const std::string& command, const std::string& command_line) {
  std::string s = "# manifest\nversion = " + std::string(kVersion) + "\ncommand = " + command + "\n";
  if (!command_line.empty()) s += "command_line = " + command_line + "\n";
  s += "seeds =";
  for (auto seed : cfg.seeds) s += " " + std::to_string(seed);
  s += "\nnoise_stream = mt19937_64 seeded by seed_seq(seed, source_index)\n\n# config\n";
  s += cfg.to_ini();
  return s;
}

std::vector<std::string> run_forward(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                     const std::string& command_line) {
  cfg.validate();
  CleanData clean = generate_clean_data(cfg);
  std::vector<std::string> files;
  auto put = [&](const std::string& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    files.push_back(name);
  };

  save_mesh(clean.truth.mesh, out_dir / "mesh.txt");
  files.push_back("mesh.txt");
  std::string report = "source,iterations,final_residual,converged\n";
  for (std::size_t j = 0; j < clean.data.size(); ++j) {
    put("u_" + std::to_string(j + 1) + ".csv", field_to_csv(clean.solutions[j].u));
    put("H_" + std::to_string(j + 1) + ".csv", field_to_csv(clean.data[j]));
    const auto& r = clean.solutions[j].report;
    report += std::to_string(j + 1) + "," + std::to_string(r.iterations) + "," +
              format_double(r.residual_history.back()) + "," + (r.converged ? "1" : "0") + "\n";
  }
  for (auto seed : cfg.seeds) {
    for (double eps : cfg.noise_levels) {
      for (std::size_t j = 0; j < clean.data.size(); ++j) {
        put(noisy_datum_name(j, eps, seed), field_to_csv(add_noise(clean.data[j], eps, derive_seed(seed, j))));
      }
    }
  }
  put("forward_report.csv", report);
  put("manifest.txt", manifest_text(cfg, "forward", command_line));
  return files;
}

Experiment parse_experiment(const std::string& name) {
  if (name == "I" || name == "1") return Experiment::kI;
  if (name == "II" || name == "2") return Experiment::kII;
  if (name == "III" || name == "3") return Experiment::kIII;
  if (name == "IV" || name == "4") return Experiment::kIV;
  throw ValidationError("unknown experiment '" + name + "' (expected I, II, III or IV)");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kI:
      return "I";
    case Experiment::kII:
      return "II";
    case Experiment::kIII:
      return "III";
    case Experiment::kIV:
      return "IV";
  }
  return "?";
}

double ErrorTable::mean(const std::string& coefficient, double epsilon) const {
  double s = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.coefficient == coefficient && r.epsilon == epsilon) {
      s += r.error_percent;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("ErrorTable::mean: no rows for " + coefficient);
  return s / count;
}

std::string ErrorTable::to_csv(Experiment which) const {
  std::string s = "experiment,coefficient,epsilon,seed,error_percent\n";
  const std::string ex = to_string(which);
  for (const auto& r : rows) {
    s += ex + "," + r.coefficient + "," + format_double(r.epsilon) + "," + std::to_string(r.seed) + "," +
         format_double(r.error_percent) + "\n";
  }
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& r : rows) {
    std::pair<std::string, double> k{r.coefficient, r.epsilon};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  for (const auto& [coef, eps] : keys) {
    s += ex + "," + coef + "," + format_double(eps) + ",mean," + format_double(mean(coef, eps)) + "\n";
  }
  return s;
}

LsqConfig resolved_lsq(const ExperimentConfig& cfg, Experiment which, const DatumSet& data) {
  LsqConfig l = cfg.lsq;
  if (!cfg.kappa_given) l.kappa = default_kappa(data);
  l.unknowns = (which == Experiment::kII) ? Unknowns::kMuOnly : Unknowns::kBoth;
  return l;
}

Reconstruction reconstruct(Experiment which, const ExperimentConfig& cfg, const Truth& inv, const DatumSet& data) {
  const Mesh& mesh = inv.mesh;
  const auto& c = inv.coeffs;
  Reconstruction out;
  switch (which) {
    case Experiment::kI:
      out.sigma = c.sigma;
      out.mu = recover_mu_multi(mesh, c.gruneisen, c.gamma, data, c.sigma);
      break;
    case Experiment::kIII: {
      auto pair = recover_pair(mesh, c.gruneisen, c.gamma, data);
      out.sigma = std::move(pair.sigma);
      out.mu = std::move(pair.mu);
      out.condition_csv = pair.condition_csv();
      break;
    }
    case Experiment::kII:
    case Experiment::kIV: {
      const LsqConfig l = resolved_lsq(cfg, which, data);
      const double mid = 0.5 * (l.bound_floor + l.bound_ceiling);
      const NodalField mu0(mesh.num_nodes(), cfg.init_mu > 0.0 ? cfg.init_mu : mid);
      const NodalField sigma0 =
          which == Experiment::kII ? c.sigma : NodalField(mesh.num_nodes(), cfg.init_sigma > 0.0 ? cfg.init_sigma : mid);
      auto r = run_lsq(mesh, c.gruneisen, c.gamma, data, sigma0, mu0, l);
      out.sigma = std::move(r.sigma);
      out.mu = std::move(r.mu);
      out.lsq_report = std::move(r.report);
      break;
    }
  }
  return out;
}

ErrorTable run_experiment(Experiment which, const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                          const std::string& command_line) {
  cfg.validate();
  if ((which == Experiment::kIII) && cfg.sources.size() < 2) {
    throw ValidationError("experiment III needs at least 2 sources");
  }
  const CleanData clean = generate_clean_data(cfg);
  const Truth inv = cfg.crime_free() ? build_truth(cfg, cfg.mesh_n) : clean.truth;
  const bool both = which == Experiment::kIII || which == Experiment::kIV;

  struct Job {
    double eps;
    std::uint64_t seed;
    std::size_t seed_index;
    long same_as;  ///< noiseless data do not depend on the seed; reuse that job's result
  };
  std::vector<Job> jobs;
  for (double eps : cfg.noise_levels) {
    const long first = static_cast<long>(jobs.size());
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
      jobs.push_back({eps, cfg.seeds[s], s, (eps == 0.0 && s > 0) ? first : -1});
    }
  }
  const long nj = static_cast<long>(jobs.size());
  std::vector<Reconstruction> recs(static_cast<std::size_t>(nj));
  std::vector<std::string> errors(static_cast<std::size_t>(nj));
  std::vector<int> kinds(static_cast<std::size_t>(nj), 0);
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < nj; ++k) {
    if (jobs[k].same_as >= 0) continue;
    try {
      DatumSet d = make_datum_set(clean, inv.mesh, inv.sources, jobs[k].eps, jobs[k].seed);
      recs[k] = reconstruct(which, cfg, inv, d);
    } catch (const ValidationError& e) {
      errors[k] = e.what();
      kinds[k] = 1;
    } catch (const std::exception& e) {
      errors[k] = e.what();
      kinds[k] = 2;
    }
  }
  for (long k = 0; k < nj; ++k) {
    if (errors[k].empty()) continue;
    const std::string ctx = "experiment " + to_string(which) + " (eps " + format_double(jobs[k].eps) + ", seed " +
                            std::to_string(jobs[k].seed) + "): " + errors[k];
    if (kinds[k] == 1) throw ValidationError(ctx);
    throw SolverError(ctx);
  }

  for (long k = 0; k < nj; ++k) {
    if (jobs[k].same_as >= 0) recs[k] = recs[jobs[k].same_as];
  }

  ErrorTable table;
  for (long k = 0; k < nj; ++k) {
    if (both) {
      table.rows.push_back({"sigma", jobs[k].eps, jobs[k].seed, relative_l2_error(recs[k].sigma, inv.coeffs.sigma, inv.mesh)});
    }
    table.rows.push_back({"mu", jobs[k].eps, jobs[k].seed, relative_l2_error(recs[k].mu, inv.coeffs.mu, inv.mesh)});
  }

  if (!out_dir.empty()) {
    write_text_file(out_dir / "error_table.csv", table.to_csv(which));
    for (long k = 0; k < nj; ++k) {
      if (jobs[k].seed_index != 0) continue;
      const std::string tag = "_eps" + format_double(jobs[k].eps);
      if (both) save_field(recs[k].sigma, out_dir / ("sigma" + tag + ".csv"));
      save_field(recs[k].mu, out_dir / ("mu" + tag + ".csv"));
      if (!recs[k].condition_csv.empty()) write_text_file(out_dir / ("condition" + tag + ".csv"), recs[k].condition_csv);
      if (!recs[k].lsq_report.history.empty()) {
        write_text_file(out_dir / ("lsq_report" + tag + ".csv"), recs[k].lsq_report.to_csv());
      }
    }
    write_text_file(out_dir / "manifest.txt", manifest_text(cfg, "experiment " + to_string(which), command_line));
  }
  return table;
}

}  // namespace tpat
