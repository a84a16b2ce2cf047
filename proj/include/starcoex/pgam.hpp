#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starcoex/metrics.hpp"

// Projected gradient ascent over the stacked phase and amplitude vectors,
// with Armijo-Goldstein backtracking and carry-over of the accepted step to
// the next iteration. Radar transmit beams are held fixed throughout; the
// alternating driver re-optimizes them between runs.
namespace starcoex::pgam {

using la::cplx;
using la::CVec;
using la::RVec;
using metrics::SeContext;
using metrics::SeGradient;
using model::Scenario;
using star::PassiveBeamformer;

struct Options {
  // Initial step is mu_init * (1 + |x0|) / (1 + |grad0|); the line search
  // only ever shrinks it, so the scale-free default works across scenarios.
  double mu_init = 1.0;
  double kappa = 0.5;       // backtracking factor, in (0, 1)
  double tol = 1e-5;        // stop when the objective increase drops below
  int max_iters = 200;
  int n_starts = 5;
  std::uint64_t seed = 1;
  bool freeze_amplitudes = false;  // phase-only refinement (MS, partitions)

  void check() const;
};

enum class StopReason { tolerance, iteration_cap };

struct Trace {
  std::vector<double> objective;   // accepted value per iteration, [0] = init
  std::vector<double> step;        // accepted step size per iteration
  std::vector<int> trials;         // line-search evaluations per iteration
  StopReason reason = StopReason::iteration_cap;

  double initial() const { return objective.front(); }
  double final() const { return objective.back(); }
  std::size_t iterations() const { return objective.size() - 1; }
};

// Writes "iteration,objective,step_size" rows.
void write_trace_csv(const Trace& trace, const std::string& path);

struct Result {
  PassiveBeamformer pb;
  Trace trace;
};

// Closed-form ascent directions at pb; theta block is d SE / d conj(theta)
// so that d SE = 2 Re<g, d theta> along complex perturbations.
CVec grad_theta(const Scenario& scn, const PassiveBeamformer& pb,
                const std::vector<CVec>& u_beams);
RVec grad_beta(const Scenario& scn, const PassiveBeamformer& pb,
               const std::vector<CVec>& u_beams);

// Quadratic upper model around (theta, beta) evaluated at a candidate:
// SE + Re<g_t, x - theta> + <g_b, y - beta> - (|x-theta|^2 + |y-beta|^2)/mu.
double quadratic_model(const PassiveBeamformer& pb, double se_at_pb,
                       const SeGradient& grads,
                       const PassiveBeamformer& candidate, double mu);

// One projected ascent step with step size mu (no line search).
PassiveBeamformer pgam_step(const PassiveBeamformer& pb,
                            const SeGradient& grads, double mu,
                            bool freeze_amplitudes = false);

// Full backtracking loop; init must be feasible. Returns the canonicalized
// final point. Throws on non-finite objective or gradient.
Result pgam_optimize(const Scenario& scn, const std::vector<CVec>& u_beams,
                     const PassiveBeamformer& init, const Options& opts);

struct MultiStartResult {
  Result best;
  std::vector<Trace> traces;   // one per start
  std::size_t best_index = 0;
};

// Runs n_starts times from random-phase initial points (amplitudes sqrt(1/2))
// and keeps the best objective.
MultiStartResult multi_start(const Scenario& scn,
                             const std::vector<CVec>& u_beams,
                             const Options& opts);

}  // namespace starcoex::pgam
