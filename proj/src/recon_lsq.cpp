#include "tpat/recon_lsq.hpp"

#include <algorithm>
#include <cmath>

#include "tpat/error.hpp"
#include "tpat/io.hpp"
#include "tpat/kernels.hpp"

namespace tpat {

namespace k = kernels::parallel;

void LsqConfig::validate() const {
  if (!(kappa >= 0.0)) throw ValidationError("lsq: kappa must be >= 0");
  if (!(grad_tol > 0.0)) throw ValidationError("lsq: grad_tol must be > 0");
  if (max_bfgs_iterations < 0) throw ValidationError("lsq: max_bfgs_iterations must be >= 0");
  if (history_size < 1) throw ValidationError("lsq: history_size must be >= 1");
  if (!(bound_floor > 0.0) || !(bound_ceiling > bound_floor)) {
    throw ValidationError("lsq: need 0 < bound_floor < bound_ceiling");
  }
}

LsqProblem::LsqProblem(const Mesh& mesh, NodalField gruneisen, NodalField gamma, DatumSet data, double kappa,
                       NewtonConfig newton)
    : mesh_(&mesh),
      gruneisen_(std::move(gruneisen)),
      gamma_(std::move(gamma)),
      data_(std::move(data)),
      kappa_(kappa),
      newton_(newton) {
  check_size(mesh, gruneisen_, "LsqProblem: Gruneisen");
  check_size(mesh, gamma_, "LsqProblem: gamma");
  data_.validate(mesh);
  if (!(kappa_ >= 0.0)) throw ValidationError("LsqProblem: kappa must be >= 0");
  mass_ = assemble_weighted_mass(mesh, NodalField(mesh.num_nodes(), 1.0));
  unit_stiffness_ = assemble_stiffness(mesh, NodalField(mesh.num_nodes(), 1.0));
  lumped_ = lumped_mass(mesh);
}

CoefficientSet LsqProblem::coefficients(const NodalField& sigma, const NodalField& mu) const {
  return {gruneisen_, gamma_, sigma, mu};
}

std::vector<NodalField> LsqProblem::forward_all(const CoefficientSet& c) const {
  SemilinearOperator op(*mesh_, c);
  const long nj = static_cast<long>(data_.sources.size());
  std::vector<NodalField> u(static_cast<std::size_t>(nj));
  std::vector<std::string> errors(static_cast<std::size_t>(nj));
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nj; ++j) {
    try {
      u[j] = solve_semilinear(op, data_.sources[j], newton_).u;
    } catch (const SolverError& e) {
      errors[j] = e.what();
    }
  }
  for (long j = 0; j < nj; ++j) {
    if (!errors[j].empty()) throw SolverError("forward solve for source " + std::to_string(j) + ": " + errors[j]);
  }
  return u;
}

namespace {

double quad(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> ax(x.size());
  k::spmv(a, x, ax);
  return k::dot(x, ax);
}

}  // namespace

ObjectiveValue LsqProblem::objective(const NodalField& sigma, const NodalField& mu) const {
  const CoefficientSet c = coefficients(sigma, mu);
  const auto u = forward_all(c);
  ObjectiveValue out;
  for (std::size_t j = 0; j < u.size(); ++j) {
    NodalField h = compute_datum(c, u[j]);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] -= data_.data[j][i];
    const double mis = 0.5 * quad(mass_, h.span());
    out.per_source_misfits.push_back(mis);
    out.misfit += mis;
  }
  out.regularization = 0.5 * (quad(unit_stiffness_, sigma.span()) + quad(unit_stiffness_, mu.span()));
  out.value = out.misfit + kappa_ * out.regularization;
  return out;
}

NodalField solve_adjoint(const Mesh& mesh, const CoefficientSet& coeffs, const NodalField& u, const NodalField& z) {
  check_size(mesh, u, "solve_adjoint: u");
  check_size(mesh, z, "solve_adjoint: z");
  SemilinearOperator op(mesh, coeffs);
  SparseMatrix m = assemble_weighted_mass(mesh, NodalField(mesh.num_nodes(), 1.0));
  std::vector<double> rhs = multiply(m, z.span());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs[i] *= -coeffs.gruneisen[i] * (coeffs.sigma[i] + 2.0 * coeffs.mu[i] * std::abs(u[i]));
  }
  return NodalField(op.solve_linearized(u.span(), rhs, 1e-13));
}

ObjectiveValue LsqProblem::evaluate(const NodalField& sigma, const NodalField& mu, GradientFields& grad) const {
  const CoefficientSet c = coefficients(sigma, mu);
  SemilinearOperator op(*mesh_, c);
  const std::size_t n = mesh_->num_nodes();
  const long nj = static_cast<long>(data_.sources.size());

  std::vector<std::vector<double>> es(nj, std::vector<double>(n)), em(nj, std::vector<double>(n));
  std::vector<double> mis(static_cast<std::size_t>(nj));
  std::vector<std::string> errors(static_cast<std::size_t>(nj));
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nj; ++j) {
    try {
      const NodalField u = solve_semilinear(op, data_.sources[j], newton_).u;
      NodalField z = compute_datum(c, u);
      for (std::size_t i = 0; i < n; ++i) z[i] -= data_.data[j][i];
      std::vector<double> mz(n);
      k::spmv(mass_, z.span(), mz);
      mis[j] = 0.5 * k::dot(z.span(), mz);

      std::vector<double> rhs(n);
      for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = -gruneisen_[i] * (c.sigma[i] + 2.0 * c.mu[i] * std::abs(u[i])) * mz[i];
      }
      const auto v = op.solve_linearized(u.span(), rhs, 1e-13);
      for (std::size_t i = 0; i < n; ++i) {
        const double uu = std::abs(u[i]) * u[i];
        es[j][i] = gruneisen_[i] * u[i] * mz[i] + lumped_[i] * v[i] * u[i];
        em[j][i] = gruneisen_[i] * uu * mz[i] + lumped_[i] * v[i] * uu;
      }
    } catch (const SolverError& e) {
      errors[j] = e.what();
    }
  }
  for (long j = 0; j < nj; ++j) {
    if (!errors[j].empty()) throw SolverError("forward solve for source " + std::to_string(j) + ": " + errors[j]);
  }

  ObjectiveValue out;
  for (long j = 0; j < nj; ++j) {
    out.per_source_misfits.push_back(mis[j]);
    out.misfit += mis[j];
  }
  std::vector<double> ks(n), km(n);
  k::spmv(unit_stiffness_, sigma.span(), ks);
  k::spmv(unit_stiffness_, mu.span(), km);
  out.regularization = 0.5 * (k::dot(sigma.span(), ks) + k::dot(mu.span(), km));
  out.value = out.misfit + kappa_ * out.regularization;

  grad.g_sigma = NodalField(n);
  grad.g_mu = NodalField(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = kappa_ * ks[i], m = kappa_ * km[i];
    for (long j = 0; j < nj; ++j) {
      s += es[j][i];
      m += em[j][i];
    }
    grad.g_sigma[i] = s / lumped_[i];
    grad.g_mu[i] = m / lumped_[i];
  }
  return out;
}

ObjectiveValue objective(const Mesh& mesh, const CoefficientSet& coeffs, const DatumSet& data, double kappa) {
  LsqProblem p(mesh, coeffs.gruneisen, coeffs.gamma, data, kappa);
  return p.objective(coeffs.sigma, coeffs.mu);
}

GradientFields gradient(const Mesh& mesh, const CoefficientSet& coeffs, const DatumSet& data, double kappa) {
  LsqProblem p(mesh, coeffs.gruneisen, coeffs.gamma, data, kappa);
  GradientFields g;
  p.evaluate(coeffs.sigma, coeffs.mu, g);
  return g;
}

std::string LsqReport::to_csv() const {
  std::string s = "iteration,objective,grad_norm,step_length\n";
  for (const auto& h : history) {
    s += std::to_string(h.iteration) + "," + format_double(h.objective) + "," + format_double(h.grad_norm) + "," +
         format_double(h.step_length) + "\n";
  }
  return s;
}

double default_kappa(const DatumSet& data) {
  double scale = 0.0;
  for (const auto& h : data.data) {
    for (double v : h) scale = std::max(scale, std::abs(v));
  }
  return 1e-8 * scale * scale;
}

LsqResult run_lsq(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma, const DatumSet& data,
                  const NodalField& sigma0, const NodalField& mu0, const LsqConfig& cfg) {
  cfg.validate();
  check_size(mesh, sigma0, "run_lsq: initial sigma");
  check_size(mesh, mu0, "run_lsq: initial mu");
  LsqProblem problem(mesh, gruneisen, gamma, data, cfg.kappa, cfg.newton);
  const std::size_t n = mesh.num_nodes();
  const bool fit_sigma = cfg.unknowns != Unknowns::kMuOnly;
  const bool fit_mu = cfg.unknowns != Unknowns::kSigmaOnly;

  std::vector<double> x0, weights;
  if (fit_sigma) {
    x0.insert(x0.end(), sigma0.begin(), sigma0.end());
    weights.insert(weights.end(), problem.lumped().begin(), problem.lumped().end());
  }
  if (fit_mu) {
    x0.insert(x0.end(), mu0.begin(), mu0.end());
    weights.insert(weights.end(), problem.lumped().begin(), problem.lumped().end());
  }

  auto unpack = [&](std::span<const double> x, NodalField& s, NodalField& m) {
    std::size_t off = 0;
    s = sigma0;
    m = mu0;
    if (fit_sigma) {
      std::copy(x.begin(), x.begin() + static_cast<long>(n), s.begin());
      off = n;
    }
    if (fit_mu) std::copy(x.begin() + static_cast<long>(off), x.begin() + static_cast<long>(off + n), m.begin());
  };

  auto fn = [&](std::span<const double> x, std::span<double> g) {
    NodalField s, m;
    unpack(x, s, m);
    GradientFields gf;
    const double v = problem.evaluate(s, m, gf).value;
    std::size_t off = 0;
    if (fit_sigma) {
      std::copy(gf.g_sigma.begin(), gf.g_sigma.end(), g.begin());
      off = n;
    }
    if (fit_mu) std::copy(gf.g_mu.begin(), gf.g_mu.end(), g.begin() + static_cast<long>(off));
    return v;
  };

  LbfgsOptions opt;
  opt.grad_tol = cfg.grad_tol;
  opt.max_iterations = cfg.max_bfgs_iterations;
  opt.history = cfg.history_size;
  opt.lower = cfg.bound_floor;
  opt.upper = cfg.bound_ceiling;
  LbfgsResult r = minimize_lbfgsb(fn, std::move(x0), weights, opt);

  LsqResult out;
  unpack(r.x, out.sigma, out.mu);
  out.report.history = std::move(r.history);
  out.report.converged = r.converged;
  out.report.stop_reason = std::move(r.stop_reason);
  return out;
}

}  // namespace tpat
