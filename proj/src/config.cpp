#include "tpat/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <map>
#include <sstream>

#include "tpat/error.hpp"
#include "tpat/io.hpp"

namespace tpat {

namespace pt = boost::property_tree;

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.gruneisen.background = 1.0;

  c.gamma.background = 0.1;
  c.gamma.inclusions = {Inclusion::parse("gaussian -0.4 0.4 0.35 0.05"), Inclusion::parse("disk 0.5 -0.5 0.2 0.15")};

  c.sigma.background = 0.1;
  c.sigma.inclusions = {Inclusion::parse("disk -0.5 0.5 0.25 0.2"), Inclusion::parse("square 0.4 -0.3 0.2 0.15")};

  c.mu.background = 0.025;
  c.mu.inclusions = {Inclusion::parse("disk 0.4 0.4 0.25 0.05"), Inclusion::parse("square -0.4 -0.4 0.2 0.04")};

  c.sources = {SourceSpec{0.5, 0.1, 0.0}, SourceSpec{1.0, 0.0, -0.1}, SourceSpec{2.0, 0.0, 0.1},
               SourceSpec{4.0, -0.1, 0.0}};
  c.noise_levels = {0.0, 1.0, 2.0, 5.0};
  c.seeds = {1};
  c.lsq.bound_floor = 1e-3;
  c.lsq.bound_ceiling = 0.5;
  return c;
}

void ExperimentConfig::validate() const {
  if (mesh_n < 1) throw ValidationError("mesh.n must be >= 1");
  if (data_mesh_n < 1) throw ValidationError("mesh.data_n must be >= 1");
  if (sources.empty()) throw ValidationError("sources: at least one source required");
  if (noise_levels.empty()) throw ValidationError("noise.levels: at least one level required");
  for (double e : noise_levels) {
    if (!(e >= 0.0)) throw ValidationError("noise.levels: levels must be >= 0");
  }
  if (seeds.empty()) throw ValidationError("noise.seeds: at least one seed required");
  if (!(coeff_lower > 0.0 && coeff_upper > coeff_lower)) throw ValidationError("bounds: need 0 < lower < upper");
  lsq.validate();
  if (!(lsq.newton.residual_tol > 0.0) || lsq.newton.max_iterations < 1 ||
      !(lsq.newton.damping > 0.0 && lsq.newton.damping < 1.0)) {
    throw ValidationError("newton: need residual_tol > 0, max_iterations >= 1, damping in (0, 1)");
  }
}

namespace {

std::string join(const auto& xs) {
  std::string s;
  for (const auto& x : xs) {
    if (!s.empty()) s += " ";
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(x)>>) {
      s += format_double(x);
    } else {
      s += std::to_string(x);
    }
  }
  return s;
}

void write_phantom(std::string& s, const char* name, const PhantomSpec& p) {
  s += std::string("[") + name + "]\n";
  s += "background = " + format_double(p.background) + "\n";
  for (std::size_t k = 0; k < p.inclusions.size(); ++k) {
    s += "inclusion" + std::to_string(k + 1) + " = " + p.inclusions[k].to_string() + "\n";
  }
  s += "\n";
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  const std::string& text = *node;
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw ValidationError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return v;
}

// Keys "<prefix><k>" in numeric order of k.
std::vector<std::string> numbered(const pt::ptree& section, const std::string& prefix) {
  std::vector<std::pair<int, std::string>> items;
  for (const auto& [key, child] : section) {
    if (key.rfind(prefix, 0) != 0) continue;
    const std::string idx = key.substr(prefix.size());
    int k = 0;
    auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
    if (ec != std::errc{} || p != idx.data() + idx.size()) {
      throw ValidationError("config key '" + key + "': expected " + prefix + "<number>");
    }
    items.emplace_back(k, child.data());
  }
  std::sort(items.begin(), items.end());
  std::vector<std::string> out;
  for (auto& [k, v] : items) out.push_back(std::move(v));
  return out;
}

void read_phantom(const pt::ptree& tree, const char* name, PhantomSpec& p) {
  auto section = tree.get_child_optional(name);
  if (!section) return;
  p.background = get<double>(*section, "background", p.background);
  auto inc = numbered(*section, "inclusion");
  if (!inc.empty()) {
    p.inclusions.clear();
    for (const auto& text : inc) p.inclusions.push_back(Inclusion::parse(text));
  }
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  for (const auto& tok : split_ws(normalized)) {
    T v{};
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
      throw ValidationError("config key '" + key + "': cannot parse '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::to_ini() const {
  std::string s;
  s += "[mesh]\nn = " + std::to_string(mesh_n) + "\ndata_n = " + std::to_string(data_mesh_n) + "\n\n";
  write_phantom(s, "gruneisen", gruneisen);
  write_phantom(s, "gamma", gamma);
  write_phantom(s, "sigma", sigma);
  write_phantom(s, "mu", mu);
  s += "[sources]\n";
  for (std::size_t k = 0; k < sources.size(); ++k) {
    s += "source" + std::to_string(k + 1) + " = " + sources[k].to_string() + "\n";
  }
  s += "\n[noise]\nlevels = " + join(noise_levels) + "\nseeds = " + join(seeds) + "\n\n";
  s += std::string("[algorithm]\nname = ") + (algorithm == Algorithm::kDirect ? "direct" : "lsq") + "\n\n";
  s += "[lsq]\n";
  if (kappa_given) s += "kappa = " + format_double(lsq.kappa) + "\n";
  s += "grad_tol = " + format_double(lsq.grad_tol) + "\n";
  s += "max_iterations = " + std::to_string(lsq.max_bfgs_iterations) + "\n";
  s += "history = " + std::to_string(lsq.history_size) + "\n";
  s += "floor = " + format_double(lsq.bound_floor) + "\n";
  s += "ceiling = " + format_double(lsq.bound_ceiling) + "\n";
  s += "init_sigma = " + format_double(init_sigma) + "\n";
  s += "init_mu = " + format_double(init_mu) + "\n\n";
  s += "[newton]\nresidual_tol = " + format_double(lsq.newton.residual_tol) + "\n";
  s += "max_iterations = " + std::to_string(lsq.newton.max_iterations) + "\n";
  s += "damping = " + format_double(lsq.newton.damping) + "\n\n";
  s += "[bounds]\nlower = " + format_double(coeff_lower) + "\nupper = " + format_double(coeff_upper) + "\n";
  return s;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  ExperimentConfig c = default_config();
  static const std::map<std::string, std::vector<std::string>> known = {
      {"mesh", {"n", "data_n"}},
      {"gruneisen", {"background"}},
      {"gamma", {"background"}},
      {"sigma", {"background"}},
      {"mu", {"background"}},
      {"sources", {}},
      {"noise", {"levels", "seeds"}},
      {"algorithm", {"name"}},
      {"lsq", {"kappa", "grad_tol", "max_iterations", "history", "floor", "ceiling", "init_sigma", "init_mu"}},
      {"newton", {"residual_tol", "max_iterations", "damping"}},
      {"bounds", {"lower", "upper"}}};
  auto numbered_key = [](const std::string& key, const std::string& prefix) {
    return key.size() > prefix.size() && key.rfind(prefix, 0) == 0 &&
           key.find_first_not_of("0123456789", prefix.size()) == std::string::npos;
  };
  for (const auto& [section, child] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw ValidationError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : child) {
      const auto& keys = it->second;
      const bool ok = std::find(keys.begin(), keys.end(), key) != keys.end() ||
                      (section == "sources" && numbered_key(key, "source")) ||
                      (keys.size() == 1 && keys[0] == "background" && numbered_key(key, "inclusion"));
      if (!ok) throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }

  c.mesh_n = get<int>(tree, "mesh.n", c.mesh_n);
  c.data_mesh_n = get<int>(tree, "mesh.data_n", c.mesh_n);
  read_phantom(tree, "gruneisen", c.gruneisen);
  read_phantom(tree, "gamma", c.gamma);
  read_phantom(tree, "sigma", c.sigma);
  read_phantom(tree, "mu", c.mu);
  if (auto s = tree.get_child_optional("sources")) {
    auto items = numbered(*s, "source");
    if (!items.empty()) {
      c.sources.clear();
      for (const auto& t : items) c.sources.push_back(SourceSpec::parse(t));
    }
  }
  if (auto v = tree.get_optional<std::string>("noise.levels")) c.noise_levels = parse_list<double>(*v, "noise.levels");
  if (auto v = tree.get_optional<std::string>("noise.seeds")) c.seeds = parse_list<std::uint64_t>(*v, "noise.seeds");
  if (auto v = tree.get_optional<std::string>("algorithm.name")) {
    if (*v == "direct") {
      c.algorithm = Algorithm::kDirect;
    } else if (*v == "lsq") {
      c.algorithm = Algorithm::kLsq;
    } else {
      throw ValidationError("algorithm.name: expected 'direct' or 'lsq', got '" + *v + "'");
    }
  }
  if (tree.get_optional<std::string>("lsq.kappa")) {
    c.kappa_given = true;
    c.lsq.kappa = get<double>(tree, "lsq.kappa", 0.0);
  }
  c.lsq.grad_tol = get<double>(tree, "lsq.grad_tol", c.lsq.grad_tol);
  c.lsq.max_bfgs_iterations = get<int>(tree, "lsq.max_iterations", c.lsq.max_bfgs_iterations);
  c.lsq.history_size = get<int>(tree, "lsq.history", c.lsq.history_size);
  c.lsq.bound_floor = get<double>(tree, "lsq.floor", c.lsq.bound_floor);
  c.lsq.bound_ceiling = get<double>(tree, "lsq.ceiling", c.lsq.bound_ceiling);
  c.init_sigma = get<double>(tree, "lsq.init_sigma", c.init_sigma);
  c.init_mu = get<double>(tree, "lsq.init_mu", c.init_mu);
  c.lsq.newton.residual_tol = get<double>(tree, "newton.residual_tol", c.lsq.newton.residual_tol);
  c.lsq.newton.max_iterations = get<int>(tree, "newton.max_iterations", c.lsq.newton.max_iterations);
  c.lsq.newton.damping = get<double>(tree, "newton.damping", c.lsq.newton.damping);
  c.coeff_lower = get<double>(tree, "bounds.lower", c.coeff_lower);
  c.coeff_upper = get<double>(tree, "bounds.upper", c.coeff_upper);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

}  // namespace tpat
