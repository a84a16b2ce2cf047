#include "starcoex/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace starcoex::metrics {

namespace {
constexpr double kLn2 = 0.6931471805599453;

double region_trace_from_coeffs(const Scenario& scn, const CVec& phi) {
  CVec diag_a(phi.size());
  kern::real_matvec(scn.ris_corr_sq.data(), phi.data(), diag_a.data(),
                    phi.size(), phi.size());
  return kern::cdotc(phi.data(), diag_a.data(), phi.size()).real();
}

CMat scaled_corr(const CMat& r, double s) {
  CMat out = r;
  out *= s;
  return out;
}

}  // namespace

double region_trace(const Scenario& scn, const PassiveBeamformer& pb,
                    Region w) {
  return region_trace_from_coeffs(scn, pb.coeffs(w));
}

CMat effective_cov_bs(const Scenario& scn, const PassiveBeamformer& pb,
                      std::size_t k) {
  const double c = region_trace(scn, pb, scn.region_of(k));
  return scaled_corr(scn.r_bs, scn.beta_bk[k] + scn.beta_bsk(k) * c);
}

CMat effective_cov_radar(const Scenario& scn, const PassiveBeamformer& pb,
                         std::size_t k) {
  const double c = region_trace(scn, pb, scn.region_of(k));
  return scaled_corr(scn.r_r, scn.beta_rk[k] + scn.beta_rsk(k) * c);
}

EffectiveCovariances build_covariances(const Scenario& scn,
                                       const PassiveBeamformer& pb) {
  EffectiveCovariances covs;
  covs.c_t = region_trace(scn, pb, Region::t);
  covs.c_r = region_trace(scn, pb, Region::r);
  const std::size_t k = scn.k();
  covs.r_bsk.reserve(k);
  covs.r_rsk.reserve(k);
  for (std::size_t ue = 0; ue < k; ++ue) {
    const double c = scn.region_of(ue) == Region::t ? covs.c_t : covs.c_r;
    covs.r_bsk.push_back(
        scaled_corr(scn.r_bs, scn.beta_bk[ue] + scn.beta_bsk(ue) * c));
    covs.r_rsk.push_back(
        scaled_corr(scn.r_r, scn.beta_rk[ue] + scn.beta_rsk(ue) * c));
  }
  covs.lambda_bar = normalization_lambda(covs);

  // BS->radar interference matrix of the radar SINR denominator; the surface
  // coefficient toward the radar side sets the cascaded term.
  double tr_sum = 0.0;
  for (std::size_t ue = 0; ue < k; ++ue)
    tr_sum += la::trace_prod_herm(covs.r_bsk[ue], scn.r_bs);
  const double c_radar =
      scn.radar_region == Region::t ? covs.c_t : covs.c_r;
  const double scale = covs.lambda_bar * scn.rho /
                       static_cast<double>(k) * tr_sum *
                       (scn.beta_br + scn.beta_bsr() * c_radar);
  covs.a_interf = scaled_corr(scn.r_r, scale);
  return covs;
}

double normalization_lambda(const EffectiveCovariances& covs) {
  double sum = 0.0;
  for (const CMat& r : covs.r_bsk) {
    const double tr = la::trace(r).real();
    if (tr <= 0.0)
      throw std::runtime_error(
          "normalization_lambda: nonpositive covariance trace");
    sum += tr;
  }
  return 1.0 / sum;
}

double radar_sinr(const Scenario& scn, const EffectiveCovariances& covs,
                  const CVec& w_z, const CVec& u_z, std::size_t z) {
  if (la::norm(w_z) == 0.0)
    throw std::invalid_argument("radar_sinr: zero receive beam");
  const CVec& a = scn.steering[z];
  const cplx gain =
      scn.alpha[z] * kern::cdotu(a.data(), u_z.data(), scn.q);
  CVec v(scn.q);
  for (std::size_t i = 0; i < scn.q; ++i) v[i] = gain * a[i];
  const double num = std::norm(la::dot(w_z, v));
  const double den = la::quad_form(w_z, covs.a_interf) +
                     scn.sigma_r2 * kern::sumsq(w_z.data(), w_z.size());
  return num / den;
}

double ue_sinr(const Scenario& scn, const EffectiveCovariances& covs,
               std::size_t k, const std::vector<CVec>& u_beams) {
  const double kk = static_cast<double>(scn.k());
  const CMat& rk = covs.r_bsk[k];
  const double tr_rk = la::trace(rk).real();
  const double s_k = tr_rk * tr_rk;

  // Interference: the channel-hardening variance contributes +tr(R^2) by the
  // Gaussian fourth-moment identity (the mc module pins this down).
  double i_k = la::trace_prod_herm(rk, rk);
  for (std::size_t i = 0; i < scn.k(); ++i)
    if (i != k) i_k += la::trace_prod_herm(rk, covs.r_bsk[i]);

  double radar_term = 0.0;
  for (std::size_t z = 0; z < u_beams.size(); ++z)
    radar_term += la::quad_form(u_beams[z], covs.r_rsk[k]);
  const double zl = static_cast<double>(scn.z() * scn.pri);
  i_k += kk / (covs.lambda_bar * scn.rho * zl) * radar_term;
  i_k += scn.sigma_c2 * kk / (covs.lambda_bar * scn.rho);
  return s_k / i_k;
}

double sum_se(const Scenario& scn, const EffectiveCovariances& covs,
              const std::vector<CVec>& u_beams) {
  double se = 0.0;
  for (std::size_t k = 0; k < scn.k(); ++k)
    se += std::log2(1.0 + ue_sinr(scn, covs, k, u_beams));
  return scn.se_prefactor * se;
}

double sum_se(const Scenario& scn, const PassiveBeamformer& pb,
              const std::vector<CVec>& u_beams) {
  return sum_se(scn, build_covariances(scn, pb), u_beams);
}

SeContext make_se_context(const Scenario& scn,
                          const std::vector<CVec>& u_beams) {
  SeContext ctx;
  ctx.scn = &scn;
  ctx.tr_bs = la::trace(scn.r_bs).real();
  ctx.tr_bs2 = la::trace_prod_herm(scn.r_bs, scn.r_bs);
  ctx.radar_qsum = 0.0;
  for (const CVec& u : u_beams) ctx.radar_qsum += la::quad_form(u, scn.r_r);
  return ctx;
}

SeEval evaluate_se(const SeContext& ctx, const PassiveBeamformer& pb,
                   bool with_gradient) {
  const Scenario& scn = *ctx.scn;
  const std::size_t n = pb.n();
  const std::size_t k = scn.k();
  const double kk = static_cast<double>(k);
  const double zl = static_cast<double>(scn.z() * scn.pri);

  const CVec phi_t = pb.coeffs(Region::t);
  const CVec phi_r = pb.coeffs(Region::r);
  CVec diag_a_t(n), diag_a_r(n);
  kern::real_matvec(scn.ris_corr_sq.data(), phi_t.data(), diag_a_t.data(), n,
                    n);
  kern::real_matvec(scn.ris_corr_sq.data(), phi_r.data(), diag_a_r.data(), n,
                    n);

  SeEval ev;
  ev.c_t = kern::cdotc(phi_t.data(), diag_a_t.data(), n).real();
  ev.c_r = kern::cdotc(phi_r.data(), diag_a_r.data(), n).real();

  auto c_of = [&](std::size_t ue) {
    return scn.region_of(ue) == Region::t ? ev.c_t : ev.c_r;
  };

  RVec g(k), r_coef(k);
  double sum_g = 0.0;
  for (std::size_t ue = 0; ue < k; ++ue) {
    g[ue] = scn.beta_bk[ue] + scn.beta_bsk(ue) * c_of(ue);
    r_coef[ue] = scn.beta_rk[ue] + scn.beta_rsk(ue) * c_of(ue);
    sum_g += g[ue];
  }
  ev.lambda_bar = 1.0 / (ctx.tr_bs * sum_g);

  const double radar_scale = kk / (scn.rho * zl) * ctx.tr_bs * sum_g;
  const double noise_term = scn.sigma_c2 * kk / scn.rho * ctx.tr_bs * sum_g;

  RVec s_k(k), i_k(k);
  ev.gamma.resize(k);
  ev.se = 0.0;
  for (std::size_t ue = 0; ue < k; ++ue) {
    s_k[ue] = g[ue] * ctx.tr_bs * g[ue] * ctx.tr_bs;
    double ik = g[ue] * g[ue] * ctx.tr_bs2;
    for (std::size_t i = 0; i < k; ++i)
      if (i != ue) ik += g[ue] * g[i] * ctx.tr_bs2;
    ik += radar_scale * r_coef[ue] * ctx.radar_qsum;
    ik += noise_term;
    i_k[ue] = ik;
    ev.gamma[ue] = s_k[ue] / ik;
    ev.se += std::log2(1.0 + ev.gamma[ue]);
  }
  ev.se *= scn.se_prefactor;
  if (!with_gradient) return ev;

  // Gradients: every covariance is a scalar multiple of a fixed correlation
  // matrix, so d SE / d theta^u = G_u * (diag(r phi_u r) o beta_u) with one
  // scalar G_u per region, and similarly for the amplitudes.
  double g_coef[2] = {0.0, 0.0};
  for (int uu = 0; uu < 2; ++uu) {
    const Region u = uu == 0 ? Region::t : Region::r;
    double sum_gderiv = 0.0;  // d(sum_i g_i)/d c_u
    for (std::size_t i = 0; i < k; ++i)
      if (scn.region_of(i) == u) sum_gderiv += scn.beta_bsk(i);
    for (std::size_t ue = 0; ue < k; ++ue) {
      const bool own = scn.region_of(ue) == u;
      const double bsk = scn.beta_bsk(ue);
      // d I_k / d c_u
      double d_ik = 0.0;
      if (own) {
        d_ik += 2.0 * g[ue] * bsk * ctx.tr_bs2;
        d_ik += bsk * (sum_g - g[ue]) * ctx.tr_bs2;
        d_ik += kk / (scn.rho * zl) * ctx.tr_bs * sum_g * scn.beta_rsk(ue) *
                ctx.radar_qsum;
      }
      d_ik += (sum_gderiv - (own ? bsk : 0.0)) * g[ue] * ctx.tr_bs2;
      d_ik += kk / (scn.rho * zl) * ctx.radar_qsum * ctx.tr_bs * sum_gderiv *
              r_coef[ue];
      d_ik += scn.sigma_c2 * kk / scn.rho * ctx.tr_bs * sum_gderiv;
      // d S_k / d c_u
      const double d_sk =
          own ? 2.0 * bsk * g[ue] * ctx.tr_bs * ctx.tr_bs : 0.0;
      g_coef[uu] += (i_k[ue] * d_sk - s_k[ue] * d_ik) /
                    ((1.0 + ev.gamma[ue]) * i_k[ue] * i_k[ue]);
    }
    g_coef[uu] *= scn.se_prefactor / kLn2;
  }

  ev.grad.theta.resize(2 * n);
  ev.grad.beta.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    ev.grad.theta[i] = g_coef[0] * diag_a_t[i] * pb.beta_t[i];
    ev.grad.theta[i + n] = g_coef[1] * diag_a_r[i] * pb.beta_r[i];
    ev.grad.beta[i] =
        g_coef[0] * 2.0 * (std::conj(diag_a_t[i]) * pb.theta_t[i]).real();
    ev.grad.beta[i + n] =
        g_coef[1] * 2.0 * (std::conj(diag_a_r[i]) * pb.theta_r[i]).real();
  }
  return ev;
}

}  // namespace starcoex::metrics
