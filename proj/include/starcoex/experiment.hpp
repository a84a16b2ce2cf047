#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starcoex/ao.hpp"
#include "starcoex/config.hpp"
#include "starcoex/mc.hpp"

// Experiment runner: builds scenarios from a config, runs the requested
// surface/radar design per scheme across a sweep, and writes CSV results
// plus serialized beamformers for reproducibility.
namespace starcoex::experiment {

using model::Scenario;
using model::ScenarioSpec;
using star::PassiveBeamformer;

enum class SchemeKind {
  star_es,
  star_ms,
  star_quantized,
  conventional_ris,
  random_phases,
  no_ris,
};

struct Scheme {
  SchemeKind kind = SchemeKind::star_es;
  unsigned bits = 0;        // star_quantized
  std::string label;        // file-name friendly
};

// Accepts "star-es", "star-ms", "star-quantized:<bits>", "conventional-ris",
// "random-phases", "no-ris".
Scheme parse_scheme(const std::string& text);

enum class SweepVariable { none, n, m, snr_db, gamma_r_db, p_max };

struct Settings {
  ScenarioSpec base;
  model::Deployment deployment;
  SweepVariable sweep = SweepVariable::none;
  std::vector<double> sweep_values;  // one implicit point when none
  std::vector<Scheme> schemes;
  ao::Options ao;
  std::size_t mc_runs = 1000;
  std::size_t random_phase_draws = 20;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool emit_timing = true;
};

// Reads every recognized key and then rejects unknown ones. CLI overrides
// (seed, scheme filter, ...) are applied by the caller afterwards.
Settings load_settings(const config::Config& cfg);

// Scenario for one sweep point (rebuilds correlation state as needed).
Scenario scenario_for_point(const Settings& settings, double value);

// Largest divisor pair n_h x n_v = n with n_h <= n_v and n_h maximal.
std::pair<std::size_t, std::size_t> grid_factor(std::size_t n);

struct SchemeOutcome {
  double sweep_value = 0.0;
  bool feasible = false;
  double sum_se = 0.0;
  double min_radar_sinr = 0.0;
  double radar_power = 0.0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  PassiveBeamformer pb;
  radar::RadarBeams beams;
  ao::Trace trace;
};

// Runs one scheme at one sweep point. base_es, when present, is the ES
// solution the derived schemes start from.
SchemeOutcome run_scheme(const Settings& settings, const Scenario& scn,
                         const Scheme& scheme, double sweep_value,
                         std::uint64_t point_seed,
                         const SchemeOutcome* base_es);

// Full sweep: one CSV per scheme in out_dir plus convergence traces and
// serialized beamformers. Returns 0 on success.
int run_experiment(const Settings& settings, const std::string& out_dir);

// Oracle suite at reduced dimensions; prints one PASS/FAIL line per check.
// Returns 0 when everything passes.
int validate(const Settings& settings);

// |closed - estimate.mean| <= 3 * standard error
bool within_3se(double closed, const mc::Estimate& est);

}  // namespace starcoex::experiment
