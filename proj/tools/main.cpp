#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "../src/cli/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kinlab: numerical laboratory for a two-species kinetic "
               "generation-recombination model"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub, bool with_run_opts) {
    sub->add_option("--config", config_path, "config file (JSON)")
        ->required();
    if (with_run_opts) {
      sub->add_option("--out", out_dir,
                      "output directory (overrides output.dir)");
      sub->add_option("--seed", seed, "RNG seed (overrides output.seed)")
          ->each([&](const std::string&) { seed_set = true; });
    }
  };

  const char* experiments[] = {"simulate", "linear-decay", "coercivity-check",
                               "limit-study", "profile-check"};
  for (const char* name : experiments)
    add_common(app.add_subcommand(name), true);
  add_common(app.add_subcommand("validate",
                                "check a config and print the resolved form"),
             false);

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  std::optional<std::uint64_t> seed_override;
  if (seed_set)
    seed_override = seed;

  if (sub == "validate") {
    auto vr = kinlab::cli::validate_config(config_path, {}, {}, false);
    if (!vr.ok()) {
      for (const auto& e : vr.errors)
        std::cerr << "config error: " << e << "\n";
      return 2;
    }
    auto resolved = vr.resolved;
    resolved["config_hash"] = vr.hash;
    std::cout << resolved.dump(2) << "\n";
    return 0;
  }

  auto vr = kinlab::cli::validate_config(config_path, sub, seed_override);
  std::optional<std::string> out_override;
  if (!out_dir.empty())
    out_override = out_dir;
  return kinlab::cli::run_experiment(vr, out_override);
}
