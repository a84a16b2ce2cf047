// Experiment runner CLI: executes configured sweeps per scheme and validates
// the closed forms against the Monte-Carlo oracle.

#include <CLI11.hpp>
#include <iostream>

#include "starcoex/experiment.hpp"
#include "starcoex/kernels.hpp"

namespace {

using starcoex::experiment::Settings;
using starcoex::experiment::SweepVariable;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t runs = 0;
  unsigned threads = 0;
  bool threads_set = false;
};

Settings settings_from(const CommonArgs& args) {
  auto cfg = starcoex::config::Config::parse_file(args.config_path);
  Settings settings = starcoex::experiment::load_settings(cfg);
  if (args.seed_set) settings.seed = args.seed;
  if (args.runs > 0) settings.mc_runs = args.runs;
  if (args.threads_set) settings.threads = args.threads;
  return settings;
}

// "variable:v1,v2,..." such as "n:16,36,64"
void apply_sweep_override(Settings& settings, const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw starcoex::config::ConfigError(
        "--sweep expects variable:v1,v2,... got '" + text + "'");
  const std::string var = text.substr(0, colon);
  if (var == "n") settings.sweep = SweepVariable::n;
  else if (var == "m") settings.sweep = SweepVariable::m;
  else if (var == "snr_db") settings.sweep = SweepVariable::snr_db;
  else if (var == "gamma_r_db") settings.sweep = SweepVariable::gamma_r_db;
  else if (var == "p_max") settings.sweep = SweepVariable::p_max;
  else
    throw starcoex::config::ConfigError("unknown sweep variable '" + var + "'");
  settings.sweep_values.clear();
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) settings.sweep_values.push_back(std::stod(item));
  if (settings.sweep_values.empty())
    throw starcoex::config::ConfigError("--sweep has no values");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STAR-RIS assisted communication/radar coexistence toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out_dir = "out";
  std::string schemes_csv;
  std::string sweep_override;
  bool no_timing = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", args.config_path, "configuration file")
        ->required();
    cmd->add_option("--seed", args.seed, "override the master seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--runs", args.runs, "override Monte-Carlo run count");
    cmd->add_option("--threads", args.threads, "worker thread count")
        ->each([&](const std::string&) { args.threads_set = true; });
  };

  CLI::App* run = app.add_subcommand("run", "run the configured experiment");
  add_common(run);
  run->add_option("-o,--out", out_dir, "output directory")->required();
  run->add_option("--schemes", schemes_csv,
                  "comma-separated scheme filter (subset of the config)");
  run->add_option("--sweep", sweep_override,
                  "sweep override, e.g. n:16,36,64");
  run->add_flag("--no-timing", no_timing,
                "write zero wall times (byte-stable output)");

  CLI::App* validate =
      app.add_subcommand("validate", "run the Monte-Carlo oracle suite");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    Settings settings = settings_from(args);
    if (app.got_subcommand(run)) {
      if (!schemes_csv.empty()) {
        std::vector<starcoex::experiment::Scheme> picked;
        std::stringstream ss(schemes_csv);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty())
            picked.push_back(starcoex::experiment::parse_scheme(item));
        settings.schemes = std::move(picked);
      }
      if (!sweep_override.empty()) apply_sweep_override(settings, sweep_override);
      if (no_timing) settings.emit_timing = false;
      return starcoex::experiment::run_experiment(settings, out_dir);
    }
    return starcoex::experiment::validate(settings);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}
