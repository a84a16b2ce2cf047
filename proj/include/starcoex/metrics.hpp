#pragma once

#include <vector>

#include "starcoex/model.hpp"
#include "starcoex/star_ris.hpp"

// Statistical-CSI performance expressions: effective covariances of the
// combined direct/surface channels, the transmit normalization, the radar
// and UE SINRs and the downlink sum spectral efficiency. All expectations
// are closed forms in the correlation matrices; the mc module checks each
// one against sample averages.
namespace starcoex::metrics {

using la::CMat;
using la::cplx;
using la::CVec;
using la::RVec;
using model::Region;
using model::Scenario;
using star::PassiveBeamformer;

// tr(r_ris phi_w r_ris phi_w^H) for one region; the only way the surface
// enters any covariance. Equals phi^H (r_ris o r_ris) phi.
double region_trace(const Scenario& scn, const PassiveBeamformer& pb,
                    Region w);

// beta_bk r_bs + beta_bs beta_sk tr(r_ris phi r_ris phi^H) r_bs for UE k.
CMat effective_cov_bs(const Scenario& scn, const PassiveBeamformer& pb,
                      std::size_t k);

// beta_rk r_r + beta_sr beta_sk tr(r_ris phi r_ris phi^H) r_r for UE k.
CMat effective_cov_radar(const Scenario& scn, const PassiveBeamformer& pb,
                         std::size_t k);

struct EffectiveCovariances {
  std::vector<CMat> r_bsk;  // K matrices, M x M
  std::vector<CMat> r_rsk;  // K matrices, Q x Q
  double lambda_bar = 0.0;
  CMat a_interf;            // Q x Q BS->radar interference matrix, includes
                            // the lambda_bar rho / K factor
  double c_t = 0.0, c_r = 0.0;  // cached region traces
};

EffectiveCovariances build_covariances(const Scenario& scn,
                                       const PassiveBeamformer& pb);

// 1 / sum_i tr(r_bsk_i). Throws if any trace is nonpositive.
double normalization_lambda(const EffectiveCovariances& covs);

// Radar SINR for direction z under receive beam w_z and transmit beam u_z.
double radar_sinr(const Scenario& scn, const EffectiveCovariances& covs,
                  const CVec& w_z, const CVec& u_z, std::size_t z);

// UE k SINR given the radar transmit beams (may be empty: no radar).
double ue_sinr(const Scenario& scn, const EffectiveCovariances& covs,
               std::size_t k, const std::vector<CVec>& u_beams);

// se_prefactor * sum_k log2(1 + gamma_k)
double sum_se(const Scenario& scn, const EffectiveCovariances& covs,
              const std::vector<CVec>& u_beams);
double sum_se(const Scenario& scn, const PassiveBeamformer& pb,
              const std::vector<CVec>& u_beams);

// ---------------------------------------------------------------------------
// Fast evaluation path used inside the optimizer. Covariances of this model
// are scalar multiples of the static correlation matrices, so the objective
// and its gradients collapse to a handful of scalars around the two region
// traces; this evaluator and the matrix route above agree to round-off.

struct SeContext {
  const Scenario* scn = nullptr;
  double radar_qsum = 0.0;  // sum_z u_z^H r_r u_z
  double tr_bs = 0.0;       // tr(r_bs)
  double tr_bs2 = 0.0;      // tr(r_bs^2)
};

SeContext make_se_context(const Scenario& scn,
                          const std::vector<CVec>& u_beams);

struct SeGradient {
  CVec theta;  // 2N, d SE / d conj(theta) (ascent direction)
  RVec beta;   // 2N, real gradient
};

struct SeEval {
  double se = 0.0;
  RVec gamma;  // per UE
  double c_t = 0.0, c_r = 0.0;
  double lambda_bar = 0.0;
  SeGradient grad;  // filled when requested
};

SeEval evaluate_se(const SeContext& ctx, const PassiveBeamformer& pb,
                   bool with_gradient);

}  // namespace starcoex::metrics
