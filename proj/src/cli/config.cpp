#include "config.hpp"

#include <fstream>
#include <cstdio>
#include <set>

#include "kinlab/numfmt.hpp"

namespace kinlab::cli {

namespace {

const std::set<std::string> kExperiments = {
    "simulate", "linear-decay", "coercivity-check", "limit-study",
    "profile-check"};

void check_keys(const nlohmann::json& j, const std::string& block,
                const std::set<std::string>& known,
                std::vector<std::string>& errors) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      errors.push_back("unknown key '" + block + "." + it.key() + "'");
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& dst,
                const std::string& block, std::vector<std::string>& errors) {
  if (!j.contains(key))
    return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    errors.push_back("field '" + block + "." + key + "' has the wrong type");
  }
}

ProfileSpec parse_profile(const nlohmann::json& j, const std::string& block,
                          std::vector<std::string>& errors) {
  ProfileSpec spec;
  check_keys(j, block, {"kind", "sigma", "power", "samples"}, errors);
  std::string kind = "gaussian";
  read_field(j, "kind", kind, block, errors);
  if (kind == "gaussian")
    spec.kind = ProfileKind::Gaussian;
  else if (kind == "power-tail")
    spec.kind = ProfileKind::PowerTail;
  else if (kind == "custom-samples")
    spec.kind = ProfileKind::CustomSamples;
  else
    errors.push_back("field '" + block +
                     ".kind' must be gaussian | power-tail | custom-samples");
  read_field(j, "sigma", spec.sigma, block, errors);
  read_field(j, "power", spec.power, block, errors);
  read_field(j, "samples", spec.samples, block, errors);
  return spec;
}

nlohmann::json profile_json(const ProfileSpec& spec) {
  switch (spec.kind) {
  case ProfileKind::Gaussian:
    return {{"kind", "gaussian"}, {"sigma", spec.sigma}};
  case ProfileKind::PowerTail:
    return {{"kind", "power-tail"}, {"power", spec.power}};
  case ProfileKind::CustomSamples:
    return {{"kind", "custom-samples"}, {"samples", spec.samples}};
  }
  return {};
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

} // namespace

ValidationResult
validate_config(const std::string& path,
                const std::optional<std::string>& experiment_override,
                const std::optional<std::uint64_t>& seed_override,
                bool require_experiment) {
  ValidationResult vr;
  auto& errors = vr.errors;

  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot open config file '" + path + "'");
    return vr;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return vr;
  }

  RunConfig& c = vr.config;
  check_keys(j, "",
             {"experiment", "grid", "profiles", "physics", "numerics",
              "output"},
             errors);

  read_field(j, "experiment", c.experiment, "", errors);
  if (experiment_override) {
    if (!c.experiment.empty() && c.experiment != *experiment_override)
      errors.push_back("config experiment '" + c.experiment +
                       "' does not match the subcommand '" +
                       *experiment_override + "'");
    c.experiment = *experiment_override;
  }
  if (c.experiment.empty()) {
    if (require_experiment)
      errors.push_back("field 'experiment' is required (or use a subcommand)");
  } else if (!kExperiments.count(c.experiment)) {
    errors.push_back("unknown experiment '" + c.experiment + "'");
  }

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, "grid", {"dim", "nx", "nv", "vmax"}, errors);
    read_field(g, "dim", c.grid.dim, "grid", errors);
    read_field(g, "nx", c.grid.nx, "grid", errors);
    read_field(g, "nv", c.grid.nv, "grid", errors);
    read_field(g, "vmax", c.grid.vmax, "grid", errors);
  }
  if (c.grid.dim != 1)
    errors.push_back("grid.dim must be 1");
  if (c.grid.nx < 4)
    errors.push_back("grid.nx must be >= 4");
  if (c.grid.nx % 2 != 0)
    errors.push_back("grid.nx must be even");
  if (c.grid.nv < 4)
    errors.push_back("grid.nv must be >= 4");
  if (!(c.grid.vmax > 0.0))
    errors.push_back("grid.vmax must be positive");

  if (j.contains("profiles")) {
    const auto& p = j["profiles"];
    check_keys(p, "profiles", {"chi1", "chi2"}, errors);
    if (p.contains("chi1"))
      c.profiles.chi1 = parse_profile(p["chi1"], "profiles.chi1", errors);
    if (p.contains("chi2"))
      c.profiles.chi2 = parse_profile(p["chi2"], "profiles.chi2", errors);
  }

  if (j.contains("physics")) {
    const auto& p = j["physics"];
    check_keys(p, "physics", {"initial", "eps", "gamma1", "gamma2"}, errors);
    if (p.contains("initial")) {
      const auto& ini = p["initial"];
      check_keys(ini, "physics.initial", {"kind", "rho_inf", "amplitude"},
                 errors);
      read_field(ini, "kind", c.physics.initial.kind, "physics.initial",
                 errors);
      read_field(ini, "rho_inf", c.physics.initial.rho_inf, "physics.initial",
                 errors);
      read_field(ini, "amplitude", c.physics.initial.amplitude,
                 "physics.initial", errors);
    }
    read_field(p, "eps", c.physics.eps, "physics", errors);
    if (p.contains("gamma1")) {
      double g1 = 0;
      read_field(p, "gamma1", g1, "physics", errors);
      c.physics.gamma1 = g1;
    }
    if (p.contains("gamma2")) {
      double g2 = 0;
      read_field(p, "gamma2", g2, "physics", errors);
      c.physics.gamma2 = g2;
    }
  }
  if (c.physics.initial.kind != "equilibrium" &&
      c.physics.initial.kind != "cosine" &&
      c.physics.initial.kind != "perturbation")
    errors.push_back(
        "physics.initial.kind must be equilibrium | cosine | perturbation");
  if (!(c.physics.initial.rho_inf > 0.0))
    errors.push_back("physics.initial.rho_inf must be positive");
  if (!(c.physics.eps > 0.0) || c.physics.eps > 1.0)
    errors.push_back("physics.eps must lie in (0, 1]");
  if (c.physics.gamma1 && !(*c.physics.gamma1 > 0.0))
    errors.push_back("physics.gamma1 must be positive");
  if (c.physics.gamma2 && !(*c.physics.gamma2 > 0.0))
    errors.push_back("physics.gamma2 must be positive");
  if (c.physics.gamma1 &&
      !(*c.physics.gamma1 < c.physics.initial.rho_inf))
    errors.push_back(
        "physics.gamma1 must be < rho_inf: the L-infinity envelope needs a "
        "positive lower bracket (rho_inf - gamma1) chi1");

  if (j.contains("numerics")) {
    const auto& n = j["numerics"];
    check_keys(n, "numerics",
               {"dt", "cfl", "t_final", "delta", "record_every", "n_samples",
                "eps_list", "t_macro", "dt_coef"},
               errors);
    read_field(n, "dt", c.numerics.dt, "numerics", errors);
    read_field(n, "cfl", c.numerics.cfl, "numerics", errors);
    read_field(n, "t_final", c.numerics.t_final, "numerics", errors);
    read_field(n, "delta", c.numerics.delta, "numerics", errors);
    read_field(n, "record_every", c.numerics.record_every, "numerics",
               errors);
    read_field(n, "n_samples", c.numerics.n_samples, "numerics", errors);
    read_field(n, "eps_list", c.numerics.eps_list, "numerics", errors);
    read_field(n, "t_macro", c.numerics.t_macro, "numerics", errors);
    read_field(n, "dt_coef", c.numerics.dt_coef, "numerics", errors);
  }
  if (c.numerics.dt < 0.0)
    errors.push_back("numerics.dt must be >= 0 (0 selects the default rule)");
  if (!(c.numerics.cfl > 0.0))
    errors.push_back("numerics.cfl must be positive");
  if (!(c.numerics.t_final > 0.0))
    errors.push_back("numerics.t_final must be positive");
  if (c.numerics.delta < 0.0)
    errors.push_back("numerics.delta must be >= 0");
  if (c.numerics.record_every < 1)
    errors.push_back("numerics.record_every must be >= 1");
  if (c.numerics.n_samples < 1)
    errors.push_back("numerics.n_samples must be >= 1");
  for (std::size_t k = 0; k + 1 < c.numerics.eps_list.size(); ++k)
    if (!(c.numerics.eps_list[k] > c.numerics.eps_list[k + 1])) {
      errors.push_back("numerics.eps_list must be strictly decreasing");
      break;
    }
  for (double e : c.numerics.eps_list)
    if (!(e > 0.0) || e > 1.0) {
      errors.push_back("numerics.eps_list entries must lie in (0, 1]");
      break;
    }

  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "output", {"dir", "formats", "seed"}, errors);
    read_field(o, "dir", c.output.dir, "output", errors);
    read_field(o, "formats", c.output.formats, "output", errors);
    read_field(o, "seed", c.output.seed, "output", errors);
  }
  for (const auto& f : c.output.formats)
    if (f != "csv" && f != "json")
      errors.push_back("output.formats entries must be csv | json");
  if (seed_override)
    c.output.seed = *seed_override;

  // Resolved echo with every default materialized. The --out override never
  // enters it, so runs into different directories stay byte-identical.
  nlohmann::json r;
  r["experiment"] = c.experiment;
  r["grid"] = {{"dim", c.grid.dim},
               {"nx", c.grid.nx},
               {"nv", c.grid.nv},
               {"vmax", c.grid.vmax}};
  r["profiles"] = {{"chi1", profile_json(c.profiles.chi1)},
                   {"chi2", profile_json(c.profiles.chi2)}};
  r["physics"] = {{"initial",
                   {{"kind", c.physics.initial.kind},
                    {"rho_inf", c.physics.initial.rho_inf},
                    {"amplitude", c.physics.initial.amplitude}}},
                  {"eps", c.physics.eps}};
  if (c.physics.gamma1)
    r["physics"]["gamma1"] = *c.physics.gamma1;
  if (c.physics.gamma2)
    r["physics"]["gamma2"] = *c.physics.gamma2;
  r["numerics"] = {{"dt", c.numerics.dt},
                   {"cfl", c.numerics.cfl},
                   {"t_final", c.numerics.t_final},
                   {"delta", c.numerics.delta},
                   {"record_every", c.numerics.record_every},
                   {"n_samples", c.numerics.n_samples},
                   {"eps_list", c.numerics.eps_list},
                   {"t_macro", c.numerics.t_macro},
                   {"dt_coef", c.numerics.dt_coef}};
  r["output"] = {{"dir", c.output.dir},
                 {"formats", c.output.formats},
                 {"seed", c.output.seed}};
  vr.resolved = r;
  vr.hash = fnv1a_hex(r.dump());
  return vr;
}

} // namespace kinlab::cli
