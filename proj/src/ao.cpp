#include "starcoex/ao.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace starcoex::ao {

void Options::check() const {
  if (outer_tol <= 0.0) throw std::invalid_argument("ao: outer_tol must be > 0");
  if (max_outer < 1) throw std::invalid_argument("ao: max_outer must be >= 1");
  pgam.check();
}

RadarInfeasible::RadarInfeasible(int outer_iter,
                                 const radar::InfeasibleBudget& cause)
    : std::runtime_error("ao: radar step infeasible at outer iteration " +
                         std::to_string(outer_iter) + ": " + cause.what()),
      outer_iteration(outer_iter),
      min_feasible(cause.min_feasible) {}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "outer_iter,sum_se,min_radar_sinr,total_radar_power\n";
  char buf[128];
  for (std::size_t i = 0; i < trace.outer.size(); ++i) {
    const OuterRecord& r = trace.outer[i];
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g\n", i + 1, r.sum_se,
                  r.min_radar_sinr, r.total_radar_power);
    os << buf;
  }
}

double min_radar_sinr(const Scenario& scn,
                      const metrics::EffectiveCovariances& covs,
                      const radar::RadarBeams& beams) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < scn.z(); ++z)
    best = std::min(best,
                    metrics::radar_sinr(scn, covs, beams.w[z], beams.u[z], z));
  return best;
}

Result alternating_optimize(const Scenario& scn, const PassiveBeamformer& init,
                            const Options& opts) {
  opts.check();

  // Initial probing beams: full budget split evenly across directions.
  std::vector<la::CVec> u_beams(scn.z());
  const double amp = std::sqrt(scn.p_max / static_cast<double>(scn.z()) /
                               static_cast<double>(scn.q));
  for (std::size_t z = 0; z < scn.z(); ++z) {
    u_beams[z].resize(scn.q);
    for (std::size_t i = 0; i < scn.q; ++i)
      u_beams[z][i] = amp * std::conj(scn.steering[z][i]);
  }

  Result res;
  res.pb = init;
  double prev_se = -1.0;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    pgam::Result pr = pgam::pgam_optimize(scn, u_beams, res.pb, opts.pgam);
    res.pb = std::move(pr.pb);
    res.trace.pgam_traces.push_back(std::move(pr.trace));

    metrics::EffectiveCovariances covs =
        metrics::build_covariances(scn, res.pb);
    try {
      res.beams = radar::optimal_transmit_beams(scn, covs, res.pb);
    } catch (const radar::InfeasibleBudget& bad) {
      throw RadarInfeasible(outer, bad);
    }
    for (std::size_t z = 0; z < scn.z(); ++z) u_beams[z] = res.beams.u[z];

    OuterRecord rec;
    rec.sum_se = metrics::sum_se(scn, covs, u_beams);
    rec.min_radar_sinr = min_radar_sinr(scn, covs, res.beams);
    rec.total_radar_power = res.beams.total_power();
    res.trace.outer.push_back(rec);
    res.sum_se = rec.sum_se;

    if (prev_se >= 0.0 &&
        std::abs(rec.sum_se - prev_se) <=
            opts.outer_tol * std::max(std::abs(prev_se), 1e-300))
      break;
    prev_se = rec.sum_se;
  }
  return res;
}

}  // namespace starcoex::ao
