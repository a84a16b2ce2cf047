#pragma once

#include <string>
#include <vector>

#include "starcoex/pgam.hpp"
#include "starcoex/radar.hpp"

// Alternating driver: hold the radar beams, run the surface optimizer; hold
// the surface, redo the closed-form radar design; repeat until the sum SE
// settles.
namespace starcoex::ao {

using model::Scenario;
using star::PassiveBeamformer;

struct Options {
  double outer_tol = 1e-4;  // relative sum-SE change
  int max_outer = 20;
  pgam::Options pgam;

  void check() const;
};

struct OuterRecord {
  double sum_se = 0.0;
  double min_radar_sinr = 0.0;
  double total_radar_power = 0.0;
};

struct Trace {
  std::vector<OuterRecord> outer;       // one per outer iteration
  std::vector<pgam::Trace> pgam_traces; // matching surface runs
};

// Writes "outer_iter,sum_se,min_radar_sinr,total_radar_power" rows.
void write_trace_csv(const Trace& trace, const std::string& path);

struct Result {
  PassiveBeamformer pb;
  radar::RadarBeams beams;
  Trace trace;
  double sum_se = 0.0;
};

struct RadarInfeasible : std::runtime_error {
  RadarInfeasible(int outer_iter, const radar::InfeasibleBudget& cause);
  int outer_iteration;
  double min_feasible;
};

// Radar beams start as sqrt(p_max / Z) times the unit conjugate steering per
// direction; each outer pass re-satisfies the radar constraints.
Result alternating_optimize(const Scenario& scn, const PassiveBeamformer& init,
                            const Options& opts);

// Convenience: min_z radar SINR of a solution, via metrics::radar_sinr.
double min_radar_sinr(const Scenario& scn,
                      const metrics::EffectiveCovariances& covs,
                      const radar::RadarBeams& beams);

}  // namespace starcoex::ao
