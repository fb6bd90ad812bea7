#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ptscat/cli.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string figure;
  std::string out_dir = ".";
  std::string oracle;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_figure) {
  cmd->add_option("--config", args.config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  if (with_figure)
    cmd->add_option("--figure", args.figure,
                    "figure preset (fig2a..fig2e, fig3a..fig3c, fig5)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the RNG seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--oracle", args.oracle, "toggle oracle spot checks")
      ->check(CLI::IsMember({"on", "off"}));
}

ptscat::cli::RunConfig resolve(const CommonArgs& args) {
  ptscat::cli::RunConfig cfg;
  if (!args.config_path.empty()) cfg = ptscat::cli::load_config(args.config_path);
  if (!args.figure.empty()) ptscat::cli::apply_preset(cfg, args.figure);
  if (args.seed_set) cfg.seed = args.seed;
  if (args.oracle == "on") cfg.oracle = true;
  if (args.oracle == "off") cfg.oracle = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order far-zone statistics of weak scattering from "
               "statistically stationary media"};
  app.require_subcommand(1);

  CommonArgs spectrum_args, coherence_args, validate_args, realize_args;
  auto* spectrum = app.add_subcommand("spectrum", "scattered spectral-density map");
  add_common(spectrum, spectrum_args, true);
  auto* coherence = app.add_subcommand("coherence", "mirror-direction coherence curves");
  add_common(coherence, coherence_args, true);
  auto* validate = app.add_subcommand("validate", "run the oracle check suite");
  add_common(validate, validate_args, false);
  auto* realize = app.add_subcommand("realize", "sample medium realizations");
  add_common(realize, realize_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(spectrum)) {
      const auto& fig = spectrum_args.figure;
      if (!fig.empty() && ptscat::cli::presets().at(fig).command != "spectrum")
        throw ptscat::cli::ConfigError("preset '" + fig + "' is not a spectrum preset");
      const auto cfg = resolve(spectrum_args);
      const auto path = ptscat::cli::run_spectrum(cfg, spectrum_args.out_dir,
                                                  fig.empty() ? "spectrum" : fig);
      std::cout << "wrote " << path.string() << "\n";
    } else if (app.got_subcommand(coherence)) {
      const auto& fig = coherence_args.figure;
      if (!fig.empty() && ptscat::cli::presets().at(fig).command != "coherence")
        throw ptscat::cli::ConfigError("preset '" + fig + "' is not a coherence preset");
      auto cfg = resolve(coherence_args);
      if (fig.empty()) {
        const auto path = ptscat::cli::run_coherence(cfg, coherence_args.out_dir);
        std::cout << "wrote " << path.string() << "\n";
      } else {
        for (const double da : ptscat::cli::presets().at(fig).d_over_a_values) {
          cfg.medium.d_over_a = da;
          const auto path = ptscat::cli::run_coherence(
              cfg, coherence_args.out_dir, fig + "_da" + ptscat::detail::format_double_short(da));
          std::cout << "wrote " << path.string() << "\n";
        }
      }
    } else if (app.got_subcommand(validate)) {
      const auto cfg = resolve(validate_args);
      return ptscat::cli::run_validate(cfg, validate_args.out_dir);
    } else if (app.got_subcommand(realize)) {
      const auto cfg = resolve(realize_args);
      const auto written = ptscat::cli::run_realize(cfg, realize_args.out_dir);
      std::cout << "wrote " << written.size() << " files under " << realize_args.out_dir
                << "\n";
    }
  } catch (const ptscat::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range&) {
    std::cerr << "config error: unknown figure preset\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
