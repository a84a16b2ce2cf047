#include "starcoex/pgam.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace starcoex::pgam {

using metrics::evaluate_se;
using metrics::make_se_context;
using metrics::SeEval;

void Options::check() const {
  if (mu_init <= 0.0) throw std::invalid_argument("pgam: mu_init must be > 0");
  if (kappa <= 0.0 || kappa >= 1.0)
    throw std::invalid_argument("pgam: kappa must be in (0, 1)");
  if (tol <= 0.0) throw std::invalid_argument("pgam: tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("pgam: max_iters must be >= 1");
  if (n_starts < 1) throw std::invalid_argument("pgam: n_starts must be >= 1");
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "iteration,objective,step_size\n";
  char buf[96];
  for (std::size_t i = 0; i < trace.objective.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", i, trace.objective[i],
                  i == 0 ? 0.0 : trace.step[i - 1]);
    os << buf;
  }
}

CVec grad_theta(const Scenario& scn, const PassiveBeamformer& pb,
                const std::vector<CVec>& u_beams) {
  SeContext ctx = make_se_context(scn, u_beams);
  return evaluate_se(ctx, pb, true).grad.theta;
}

RVec grad_beta(const Scenario& scn, const PassiveBeamformer& pb,
               const std::vector<CVec>& u_beams) {
  SeContext ctx = make_se_context(scn, u_beams);
  return evaluate_se(ctx, pb, true).grad.beta;
}

double quadratic_model(const PassiveBeamformer& pb, double se_at_pb,
                       const SeGradient& grads,
                       const PassiveBeamformer& candidate, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("quadratic_model: mu must be > 0");
  const CVec th = star::stack_theta(pb);
  const CVec th_c = star::stack_theta(candidate);
  const RVec be = star::stack_beta(pb);
  const RVec be_c = star::stack_beta(candidate);

  double lin = 0.0, dist2 = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    const cplx d = th_c[i] - th[i];
    lin += (std::conj(grads.theta[i]) * d).real();
    dist2 += std::norm(d);
  }
  for (std::size_t i = 0; i < be.size(); ++i) {
    const double d = be_c[i] - be[i];
    lin += grads.beta[i] * d;
    dist2 += d * d;
  }
  return se_at_pb + lin - dist2 / mu;
}

PassiveBeamformer pgam_step(const PassiveBeamformer& pb,
                            const SeGradient& grads, double mu,
                            bool freeze_amplitudes) {
  CVec th = star::stack_theta(pb);
  for (std::size_t i = 0; i < th.size(); ++i) th[i] += mu * grads.theta[i];
  PassiveBeamformer next = pb;
  star::unstack_theta(star::project_theta(std::move(th)), next);
  if (!freeze_amplitudes) {
    RVec be = star::stack_beta(pb);
    for (std::size_t i = 0; i < be.size(); ++i) be[i] += mu * grads.beta[i];
    star::unstack_beta(star::project_beta(std::move(be)), next);
  }
  return next;
}

namespace {

double grad_norm(const SeGradient& g, bool freeze_amplitudes) {
  double s = kern::sumsq(g.theta.data(), g.theta.size());
  if (!freeze_amplitudes)
    for (double b : g.beta) s += b * b;
  return std::sqrt(s);
}

void check_finite(const SeEval& ev) {
  if (!std::isfinite(ev.se))
    throw std::runtime_error("pgam: objective is not finite");
  for (const cplx& g : ev.grad.theta)
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
      throw std::runtime_error("pgam: phase gradient is not finite");
  for (double g : ev.grad.beta)
    if (!std::isfinite(g))
      throw std::runtime_error("pgam: amplitude gradient is not finite");
}

constexpr int kMaxTrials = 100;
constexpr double kMuFloor = 1e-12;

}  // namespace

Result pgam_optimize(const Scenario& scn, const std::vector<CVec>& u_beams,
                     const PassiveBeamformer& init, const Options& opts) {
  opts.check();
  const SeContext ctx = make_se_context(scn, u_beams);

  PassiveBeamformer cur = init;
  SeEval ev = evaluate_se(ctx, cur, true);
  check_finite(ev);

  // Scale-free initial step: mu_init relative to point and gradient norms.
  // On the feasible set |theta|^2 = 2N and |beta|^2 = N exactly.
  const double x0 = std::sqrt(3.0 * static_cast<double>(cur.n()));
  double mu = opts.mu_init * (1.0 + x0) /
              (1.0 + grad_norm(ev.grad, opts.freeze_amplitudes));

  Trace trace;
  trace.objective.push_back(ev.se);
  trace.reason = StopReason::iteration_cap;

  for (int it = 0; it < opts.max_iters; ++it) {
    int trials = 0;
    PassiveBeamformer cand;
    SeEval cand_ev;
    bool accepted = false;
    while (trials < kMaxTrials && mu > kMuFloor) {
      cand = pgam_step(cur, ev.grad, mu, opts.freeze_amplitudes);
      cand_ev = evaluate_se(ctx, cand, true);
      ++trials;
      const double q = quadratic_model(cur, ev.se, ev.grad, cand, mu);
      // The quadratic-model test plus an explicit monotone guard; the
      // projection sets are nonconvex, so the model alone does not force
      // ascent.
      if (cand_ev.se > q && cand_ev.se >= ev.se) {
        accepted = true;
        break;
      }
      mu *= opts.kappa;
    }
    if (!accepted) {
      trace.reason = StopReason::tolerance;
      break;
    }
    check_finite(cand_ev);
    const double increase = cand_ev.se - ev.se;
    cur = std::move(cand);
    ev = std::move(cand_ev);
    trace.objective.push_back(ev.se);
    trace.step.push_back(mu);
    trace.trials.push_back(trials);
    if (increase < opts.tol) {
      trace.reason = StopReason::tolerance;
      break;
    }
  }
  return {star::canonicalize(std::move(cur)), std::move(trace)};
}

MultiStartResult multi_start(const Scenario& scn,
                             const std::vector<CVec>& u_beams,
                             const Options& opts) {
  opts.check();
  MultiStartResult out;
  double best = -1.0;
  for (int s = 0; s < opts.n_starts; ++s) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
    PassiveBeamformer init = star::random_phases(scn.n(), rng);
    Result res = pgam_optimize(scn, u_beams, init, opts);
    out.traces.push_back(res.trace);
    if (res.trace.final() > best) {
      best = res.trace.final();
      out.best = std::move(res);
      out.best_index = static_cast<std::size_t>(s);
    }
  }
  return out;
}

}  // namespace starcoex::pgam
