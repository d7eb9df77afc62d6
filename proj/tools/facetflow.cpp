// facetflow: run, compare, verify and sweep crystal-surface simulations.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "facetflow/app/commands.hpp"
#include "facetflow/app/config.hpp"
#include "facetflow/error.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("facetflow");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FACETFLOW_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

facetflow::app::RunConfig load(const std::string& path, const std::string& out,
                               const std::optional<unsigned long long>& seed) {
  auto cfg = facetflow::app::load_run_config(path);
  if (!out.empty()) cfg.output_dir = out;
  if (seed) cfg.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"facetflow: simulator and estimate checker for u_t = Laplace (Laplace u)^-3"};
  app.require_subcommand(1);

  std::string config, rho_config, out;
  std::optional<unsigned long long> seed;
  std::size_t workers = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key = value config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed for randomized suites (overrides run.seed)");
  };

  auto* run = app.add_subcommand("run", "Rothe march with diagnostics and snapshots");
  add_common(run);
  auto* compare = app.add_subcommand("compare", "cross-validate against the direct slope solver (1D)");
  add_common(compare);
  compare->add_option("--rho-config", rho_config, "config for the slope side (defaults to --config)")
      ->check(CLI::ExistingFile);
  auto* verify = app.add_subcommand("verify", "run the invariant and estimate checks");
  add_common(verify);
  auto* sweep = app.add_subcommand("sweep", "refinement table over sweep.axis / sweep.values");
  add_common(sweep);
  sweep->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(config, out, seed);
    if (*run) return facetflow::app::cmd_run(cfg);
    if (*compare) {
      const auto rho_cfg = rho_config.empty() ? cfg : load(rho_config, out, seed);
      return facetflow::app::cmd_compare(cfg, rho_cfg);
    }
    if (*verify) return facetflow::app::cmd_verify(cfg);
    if (*sweep) return facetflow::app::cmd_sweep(cfg, workers);
  } catch (const facetflow::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const facetflow::SolveError& e) {
    std::cerr << "solve error: " << e.what() << " (residual " << e.residual() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
