// Command-line front end for the agent market model.
//
// Configuration precedence, highest first: command-line flags, the --config
// file (or --preset), built-in defaults. The output directory falls back to
// $PPM_OUT_DIR/<name>, then ./ppm-out/<name>.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ppm/config.hpp"
#include "ppm/errors.hpp"
#include "ppm/experiment.hpp"

namespace h = ppm::harness;

namespace {

struct Common {
  std::string config_file;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> horizon;
  std::optional<double> years;
  std::optional<int> replicas;
  std::optional<int> N;
  bool json = false;
};

void add_source_flags(CLI::App* app, Common& c) {
  auto* cfg = app->add_option("--config", c.config_file, "experiment file (JSON)")->check(CLI::ExistingFile);
  app->add_option("--preset", c.preset, "shipped preset, see `ppm presets`")->excludes(cfg);
  app->add_option("--N", c.N, "number of agents");
}

void add_run_flags(CLI::App* app, Common& c) {
  add_source_flags(app, c);
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output directory");
  auto* hz = app->add_option("--horizon", c.horizon, "simulated minutes");
  app->add_option("--years", c.years, "simulated trading years (e.g. 30 for the long runs)")->excludes(hz);
  app->add_option("--replicas", c.replicas, "independent realisations, run concurrently");
}

h::ExperimentConfig resolve(const Common& c) {
  h::ExperimentConfig cfg;
  if (!c.config_file.empty()) {
    cfg = h::load_config(c.config_file);
  } else if (!c.preset.empty()) {
    try {
      cfg = h::preset(c.preset);
    } catch (const std::out_of_range& e) {
      throw ppm::ParameterError(e.what());
    }
  } else {
    cfg = h::preset("fig3");
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.N) cfg.N = *c.N;
  if (c.horizon) cfg.horizon = *c.horizon;
  if (c.years) cfg.horizon = *c.years * cfg.calendar.year_minutes();
  if (c.replicas) cfg.replicas = *c.replicas;
  if (!c.out.empty()) {
    cfg.output_dir = c.out;
  } else if (cfg.output_dir.empty()) {
    const char* env = std::getenv("PPM_OUT_DIR");
    const std::filesystem::path root = env && *env ? env : "ppm-out";
    cfg.output_dir = (root / cfg.name).string();
  }
  return cfg;
}

std::filesystem::path run_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  const char* env = std::getenv("PPM_OUT_DIR");
  const std::filesystem::path root = env && *env ? env : "ppm-out";
  return root / (c.preset.empty() ? "fig3" : c.preset);
}

void report(const h::RunReport& r) {
  std::cout << "wrote " << r.dir.string() << " (" << r.replicas.size() << " replica"
            << (r.replicas.size() == 1 ? "" : "s") << ", " << r.wall_seconds << " s)\n";
  for (const auto& rep : r.replicas) {
    std::cout << "  replica " << rep.index << ": " << rep.events << " events"
              << (rep.absorbed ? ", absorbed" : "") << '\n';
    for (const auto& s : rep.skipped) std::cout << "    skipped " << s << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predator-prey agent market: simulation, pricing and analytics"};
  app.set_version_flag("--version", h::version());
  app.require_subcommand(1);

  Common c;
  auto* describe = app.add_subcommand("describe", "print derived constants of a configuration");
  add_source_flags(describe, c);
  describe->add_flag("--json", c.json, "machine-readable output");

  auto* simulate = app.add_subcommand("simulate", "exact simulation only; keeps the event log");
  add_run_flags(simulate, c);
  auto* run = app.add_subcommand("run", "simulate, price and analyse in one pass");
  add_run_flags(run, c);

  auto* price = app.add_subcommand("price", "price the trajectory stored in a run directory");
  price->add_option("--out", c.out, "run directory written by `simulate`");
  price->add_option("--preset", c.preset, "locate the directory by preset name");
  auto* analyze = app.add_subcommand("analyze", "analyse the price series stored in a run directory");
  analyze->add_option("--out", c.out, "run directory");
  analyze->add_option("--preset", c.preset, "locate the directory by preset name");

  std::string show;
  auto* presets = app.add_subcommand("presets", "list shipped presets or print one");
  presets->add_option("--show", show, "print the named preset as a config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*describe) {
      const auto cfg = resolve(c);
      if (c.json)
        std::cout << h::describe_json(cfg) << '\n';
      else
        h::describe_text(cfg, std::cout);
    } else if (*simulate) {
      report(h::simulate(resolve(c)));
    } else if (*run) {
      report(h::run(resolve(c)));
    } else if (*price) {
      h::price(run_dir(c));
    } else if (*analyze) {
      h::analyze(run_dir(c));
    } else if (*presets) {
      if (!show.empty())
        std::cout << h::to_json_text(h::preset(show)) << '\n';
      else
        for (const auto& n : h::preset_names()) std::cout << n << '\n';
    }
  } catch (const h::StageError& e) {
    std::cerr << "ppm: " << e.what() << '\n';
    return e.stage() == "validate" ? 2 : 1;
  } catch (const ppm::ParameterError& e) {
    std::cerr << "ppm: validate: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ppm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
