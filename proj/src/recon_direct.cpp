#include "tpat/recon_direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tpat/error.hpp"
#include "tpat/io.hpp"

namespace tpat {

void DatumSet::validate(const Mesh& mesh) const {
  if (sources.empty()) throw ValidationError("DatumSet: no sources");
  if (sources.size() != data.size()) {
    throw ValidationError("DatumSet: " + std::to_string(sources.size()) + " sources but " +
                          std::to_string(data.size()) + " data");
  }
  for (const auto& h : data) check_size(mesh, h, "DatumSet datum");
  for (const auto& g : sources) {
    if (g.values.size() != mesh.boundary_nodes().size()) {
      throw ValidationError("DatumSet: source does not match the mesh boundary");
    }
  }
}

NodalField recover_field(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma, const NodalField& h,
                         const BoundarySource& g) {
  check_size(mesh, gruneisen, "recover_field: Gruneisen");
  check_size(mesh, h, "recover_field: H");
  const std::size_t n = mesh.num_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gruneisen[i] > 0.0)) throw ValidationError("recover_field: Gruneisen must be positive");
  }
  SparseMatrix k = assemble_stiffness(mesh, gamma);
  const auto lm = lumped_mass(mesh);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -lm[i] * h[i] / gruneisen[i];
  auto [a, b] = apply_dirichlet(mesh, std::move(k), std::move(rhs), g.to_map(mesh));
  auto u = solve_linear(a, b, 1e-12);
  for (int node : mesh.boundary_nodes()) u[node] = b[node];
  return NodalField(std::move(u));
}

namespace {

void require_floor(const NodalField& u, double floor, const char* who) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= floor)) bad.push_back(i);
  }
  if (bad.empty()) return;
  std::string msg = std::string(who) + ": photon density below positivity floor at " + std::to_string(bad.size()) +
                    " node(s):";
  for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 10); ++k) msg += " " + std::to_string(bad[k]);
  if (bad.size() > 10) msg += " ...";
  throw ValidationError(msg);
}

void require_same_size(std::initializer_list<const NodalField*> fields, const char* who) {
  const std::size_t n = (*fields.begin())->size();
  for (const auto* f : fields) {
    if (f->size() != n) throw ValidationError(std::string(who) + ": field sizes differ");
  }
}

std::vector<NodalField> recover_all(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma,
                                    const DatumSet& data) {
  data.validate(mesh);
  const long nj = static_cast<long>(data.data.size());
  std::vector<NodalField> u(static_cast<std::size_t>(nj));
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nj; ++j) u[j] = recover_field(mesh, gruneisen, gamma, data.data[j], data.sources[j]);
  for (const auto& uj : u) require_floor(uj, kDensityFloor, "recover");
  return u;
}

}  // namespace

NodalField recover_sigma(const NodalField& h, const NodalField& gruneisen, const NodalField& u_star,
                         const NodalField& mu_known, double floor) {
  require_same_size({&h, &gruneisen, &u_star, &mu_known}, "recover_sigma");
  require_floor(u_star, floor, "recover_sigma");
  NodalField s(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    s[i] = h[i] / (gruneisen[i] * u_star[i]) - mu_known[i] * std::abs(u_star[i]);
  }
  return s;
}

NodalField recover_mu(const NodalField& h, const NodalField& gruneisen, const NodalField& u_star,
                      const NodalField& sigma_known, double floor) {
  require_same_size({&h, &gruneisen, &u_star, &sigma_known}, "recover_mu");
  require_floor(u_star, floor, "recover_mu");
  NodalField m(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double au = std::abs(u_star[i]);
    m[i] = h[i] / (gruneisen[i] * u_star[i] * au) - sigma_known[i] / au;
  }
  return m;
}

NodalField recover_sigma_multi(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma,
                               const DatumSet& data, const NodalField& mu_known) {
  auto u = recover_all(mesh, gruneisen, gamma, data);
  check_size(mesh, mu_known, "recover_sigma_multi: mu");
  const std::size_t n = mesh.num_nodes();
  NodalField s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      acc += data.data[j][i] / (gruneisen[i] * u[j][i]) - mu_known[i] * std::abs(u[j][i]);
    }
    s[i] = acc / static_cast<double>(u.size());
  }
  return s;
}

NodalField recover_mu_multi(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma,
                            const DatumSet& data, const NodalField& sigma_known) {
  auto u = recover_all(mesh, gruneisen, gamma, data);
  check_size(mesh, sigma_known, "recover_mu_multi: sigma");
  const std::size_t n = mesh.num_nodes();
  NodalField m(n);
  // Least squares in mu of mu |u_j| = H_j / (Gruneisen u_j) - sigma.
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double a = std::abs(u[j][i]);
      num += a * (data.data[j][i] / (gruneisen[i] * u[j][i]) - sigma_known[i]);
      den += a * a;
    }
    m[i] = num / den;
  }
  return m;
}

bool fit_line(std::span<const double> a, std::span<const double> r, double& s, double& m) {
  const double nj = static_cast<double>(a.size());
  double amean = 0.0, rmean = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    amean += a[j];
    rmean += r[j];
  }
  amean /= nj;
  rmean /= nj;
  double saa = 0.0, sar = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    saa += (a[j] - amean) * (a[j] - amean);
    sar += (a[j] - amean) * (r[j] - rmean);
  }
  if (!(saa > 0.0)) return false;
  m = sar / saa;
  s = rmean - m * amean;
  return true;
}

std::size_t PairReconstruction::num_flagged() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
}

std::string PairReconstruction::condition_csv() const {
  std::string s = "node,condition,flag\n";
  for (std::size_t i = 0; i < condition.size(); ++i) {
    s += std::to_string(i) + "," + format_double(condition[i]) + "," + (flagged[i] ? "1" : "0") + "\n";
  }
  return s;
}

PairReconstruction recover_pair(const Mesh& mesh, const NodalField& gruneisen, const NodalField& gamma,
                                const DatumSet& data) {
  if (data.data.size() < 2) throw ValidationError("recover_pair: need at least 2 data sets");
  for (const auto& g : data.sources) g.require_positive(std::numeric_limits<double>::min());

  PairReconstruction out;
  out.u_star = recover_all(mesh, gruneisen, gamma, data);
  const std::size_t nj = data.data.size();
  const long n = static_cast<long>(mesh.num_nodes());
  out.sigma = NodalField(n);
  out.mu = NodalField(n);
  out.condition.assign(n, 0.0);
  out.flagged.assign(n, 0);

#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    std::vector<double> a(nj), r(nj);
    double amax = 0.0, amin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nj; ++j) {
      const double u = out.u_star[j][i];
      a[j] = std::abs(u);
      r[j] = data.data[j][i] / (gruneisen[i] * u);
      amax = std::max(amax, a[j]);
      amin = std::min(amin, a[j]);
    }
    // Eigenvalues of the 2x2 normal matrix [[J, sum a], [sum a, sum a^2]].
    double sa = 0.0, saa = 0.0;
    for (double v : a) {
      sa += v;
      saa += v * v;
    }
    const double tr = static_cast<double>(nj) + saa;
    const double det = static_cast<double>(nj) * saa - sa * sa;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double lmax = tr / 2.0 + disc;
    const double lmin = det / lmax;
    out.condition[i] = lmin > 0.0 ? std::sqrt(lmax / lmin) : std::numeric_limits<double>::infinity();

    double s = 0.0, m = 0.0;
    if (amax - amin < kSpreadThreshold * amax || !fit_line(a, r, s, m)) {
      out.flagged[i] = 1;
    } else {
      out.sigma[i] = s;
      out.mu[i] = m;
    }
  }

  if (out.num_flagged() == static_cast<std::size_t>(n)) {
    throw ValidationError("recover_pair: no node has enough spread in |u_j*| to separate sigma and mu");
  }
  if (out.num_flagged() > 0) {
    const auto& p = mesh.nodes();
    for (long i = 0; i < n; ++i) {
      if (!out.flagged[i]) continue;
      long best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (long k = 0; k < n; ++k) {
        if (out.flagged[k]) continue;
        const double dx = p[k].x - p[i].x, dy = p[k].y - p[i].y;
        const double d = dx * dx + dy * dy;
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      out.sigma[i] = out.sigma[best];
      out.mu[i] = out.mu[best];
    }
  }

  out.sigma_clipped = out.sigma;
  out.mu_clipped = out.mu;
  for (auto& v : out.sigma_clipped) v = std::max(v, 0.0);
  for (auto& v : out.mu_clipped) v = std::max(v, 0.0);
  return out;
}

}  // namespace tpat
