#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "starcoex/metrics.hpp"

// Closed-form radar beamforming under the per-direction SINR threshold and
// the total power budget. Per direction the transmit beam lives in the span
// of the (normalized) conjugate steering vector and one residual direction
// aimed at the dominant interference channel; the power split follows from
// the KKT conditions with a bisected multiplier.
namespace starcoex::radar {

using la::CMat;
using la::cplx;
using la::CVec;
using metrics::EffectiveCovariances;
using model::Scenario;
using star::PassiveBeamformer;

struct InfeasibleBudget : std::runtime_error {
  InfeasibleBudget(double required, double budget);
  double min_feasible;  // smallest workable p_max
};

struct RadarBeams {
  std::vector<CVec> u;            // transmit beams, Q each
  std::vector<CVec> w;            // receive beams, Q each
  double lambda_star = 0.0;       // power-constraint multiplier
  std::vector<double> eta1;       // per direction, sqrt(gamma_bar)
  std::vector<cplx> eta2;         // per direction residual coefficient
  std::vector<std::optional<CVec>> e;  // residual directions (unit, _|_ a*)
  std::vector<double> gamma_bar;  // per-direction SINR-equivalent power
  // per-direction interference on the design channel, KKT closed form
  std::vector<double> design_interference;

  double total_power() const;
};

// BS->radar interference matrix of the radar SINR denominator (Q x Q,
// Hermitian PSD, includes the lambda_bar rho / K scale).
CMat interference_matrix(const Scenario& scn, const EffectiveCovariances& covs,
                         const PassiveBeamformer& pb);

// w_z* = (sigma_r^2 I + A)^{-1} alpha_z a a^T u_z; any nonzero scaling of it
// attains the same SINR.
CVec optimal_receive_beam(const Scenario& scn, const CMat& a_interf,
                          const CVec& u_z, std::size_t z);

// gamma^r / (|alpha_z|^2 a^H (sigma_r^2 I + A)^{-1} a): transmit power toward
// a*(theta_z) needed to hit the SINR threshold under the optimal receiver.
double gamma_bar(const Scenario& scn, const CMat& a_interf, std::size_t z);

// Gram-Schmidt residual of the dominant interference direction against the
// conjugate steering vector for direction z. Empty when the residual norm
// falls below 1e-10 relative to the input.
std::optional<CVec> residual_direction(const CMat& aggregate_cov,
                                       const Scenario& scn, std::size_t z);

// Full transmit design. In the default statistical mode the interference
// channel is the principal component of sum_k r_rsk; instantaneous_h, when
// given, replaces it (one sampled h for single-UE style experiments).
RadarBeams optimal_transmit_beams(const Scenario& scn,
                                  const EffectiveCovariances& covs,
                                  const PassiveBeamformer& pb,
                                  const CVec* instantaneous_h = nullptr);

// (budget, sum_z design interference) for each requested budget; values are
// non-increasing in the budget. Throws InfeasibleBudget on the first budget
// below the minimum.
std::vector<std::pair<double, double>> interference_vs_budget(
    const Scenario& scn, const EffectiveCovariances& covs,
    const PassiveBeamformer& pb, const std::vector<double>& budgets);

// Plain-text serialization of the transmit/receive beam vectors.
void save_beams(const RadarBeams& beams, const std::string& path);
RadarBeams load_beams(const std::string& path);

}  // namespace starcoex::radar
