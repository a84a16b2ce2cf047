#include "starcoex/mc.hpp"

#include <cmath>
#include <stdexcept>

#include "starcoex/parallel.hpp"
#include "starcoex/rng.hpp"

namespace starcoex::mc {

namespace {

using model::ChannelRealization;
using model::Region;

// h_bsk = h_bk + h_bs phi_{w_k} h_sk
CVec effective_bs_channel(const Scenario& scn, const ChannelRealization& ch,
                          const PassiveBeamformer& pb, std::size_t k) {
  const CVec phi = pb.coeffs(scn.region_of(k));
  CVec scaled(scn.n());
  for (std::size_t i = 0; i < scn.n(); ++i) scaled[i] = phi[i] * ch.h_sk[k][i];
  CVec out = la::matvec(ch.h_bs, scaled);
  for (std::size_t i = 0; i < scn.m; ++i) out[i] += ch.h_bk[k][i];
  return out;
}

// h_rsk = h_rk + h_sr^H phi_{w_k} h_sk
CVec effective_radar_channel(const Scenario& scn, const ChannelRealization& ch,
                             const PassiveBeamformer& pb, std::size_t k) {
  const CVec phi = pb.coeffs(scn.region_of(k));
  CVec scaled(scn.n());
  for (std::size_t i = 0; i < scn.n(); ++i) scaled[i] = phi[i] * ch.h_sk[k][i];
  CVec out = la::adjoint_matvec(ch.h_sr, scaled);
  for (std::size_t i = 0; i < scn.q; ++i) out[i] += ch.h_rk[k][i];
  return out;
}

}  // namespace

Estimate estimate_ue_sinr(const Scenario& scn, const PassiveBeamformer& pb,
                          const std::vector<CVec>& u_beams, std::size_t k,
                          std::size_t runs, std::uint64_t seed,
                          unsigned threads) {
  if (runs < 100)
    throw std::invalid_argument("estimate_ue_sinr: need at least 100 runs");
  const std::size_t kk = scn.k();

  struct Row {
    double self = 0.0;        // |h_bsk|^2
    double self_sq = 0.0;     // |h_bsk|^4
    double cross = 0.0;       // sum_{i != k} |h_bsk^H h_bsi|^2
    double precoder = 0.0;    // sum_i |h_bsi|^2
    double radar = 0.0;       // sum_z |h_rsk^H u_z|^2
  };
  std::vector<Row> rows(runs);

  parallel_for(runs, threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const ChannelRealization ch = model::sample_channels(scn, rng);
    std::vector<CVec> h_bs(kk);
    for (std::size_t i = 0; i < kk; ++i)
      h_bs[i] = effective_bs_channel(scn, ch, pb, i);
    Row row;
    row.self = kern::sumsq(h_bs[k].data(), scn.m);
    row.self_sq = row.self * row.self;
    for (std::size_t i = 0; i < kk; ++i) {
      row.precoder += kern::sumsq(h_bs[i].data(), scn.m);
      if (i != k) row.cross += std::norm(la::dot(h_bs[k], h_bs[i]));
    }
    const CVec h_rs = effective_radar_channel(scn, ch, pb, k);
    for (const CVec& u : u_beams) row.radar += std::norm(la::dot(h_rs, u));
    rows[r] = row;
  });

  // Batch means in fixed index order; the SINR is a nonlinear combination of
  // moments, so spread is measured over per-batch SINRs.
  constexpr std::size_t kBatches = 10;
  double gammas[kBatches];
  for (std::size_t b = 0; b < kBatches; ++b) {
    Row acc;
    std::size_t count = 0;
    for (std::size_t r = b; r < runs; r += kBatches) {
      acc.self += rows[r].self;
      acc.self_sq += rows[r].self_sq;
      acc.cross += rows[r].cross;
      acc.precoder += rows[r].precoder;
      acc.radar += rows[r].radar;
      ++count;
    }
    const double inv = 1.0 / static_cast<double>(count);
    const double m1 = acc.self * inv;
    const double m2 = acc.self_sq * inv;
    const double lambda_bar = 1.0 / (acc.precoder * inv);
    const double zl = static_cast<double>(scn.z() * scn.pri);
    double interf = m2 - m1 * m1 + acc.cross * inv;
    interf += static_cast<double>(kk) / (lambda_bar * scn.rho * zl) *
              (acc.radar * inv);
    interf += scn.sigma_c2 * static_cast<double>(kk) / (lambda_bar * scn.rho);
    gammas[b] = m1 * m1 / interf;
  }

  Estimate est;
  for (double g : gammas) est.mean += g;
  est.mean /= kBatches;
  double var = 0.0;
  for (double g : gammas) var += (g - est.mean) * (g - est.mean);
  var /= (kBatches - 1);
  est.std_error = std::sqrt(var / kBatches);
  return est;
}

Estimate estimate_lambda(const Scenario& scn, const PassiveBeamformer& pb,
                         std::size_t runs, std::uint64_t seed,
                         unsigned threads) {
  if (runs < 100)
    throw std::invalid_argument("estimate_lambda: need at least 100 runs");
  std::vector<double> sums(runs, 0.0);
  parallel_for(runs, threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const ChannelRealization ch = model::sample_channels(scn, rng);
    double s = 0.0;
    for (std::size_t i = 0; i < scn.k(); ++i) {
      const CVec f = effective_bs_channel(scn, ch, pb, i);
      s += kern::sumsq(f.data(), scn.m);
    }
    sums[r] = s;
  });
  constexpr std::size_t kBatches = 10;
  double lams[kBatches];
  for (std::size_t b = 0; b < kBatches; ++b) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t r = b; r < runs; r += kBatches) {
      acc += sums[r];
      ++count;
    }
    lams[b] = static_cast<double>(count) / acc;
  }
  Estimate est;
  for (double v : lams) est.mean += v;
  est.mean /= kBatches;
  double var = 0.0;
  for (double v : lams) var += (v - est.mean) * (v - est.mean);
  est.std_error = std::sqrt(var / (kBatches - 1) / kBatches);
  return est;
}

CMat estimate_radar_interference(const Scenario& scn,
                                 const PassiveBeamformer& pb, std::size_t runs,
                                 std::uint64_t seed, unsigned threads) {
  if (runs < 100)
    throw std::invalid_argument(
        "estimate_radar_interference: need at least 100 runs");
  const std::size_t kk = scn.k();
  const CVec phi_radar = pb.coeffs(scn.radar_region);

  std::vector<CVec> vs(runs);
  parallel_for(runs, threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const ChannelRealization ch = model::sample_channels(scn, rng);
    CVec f_sum(scn.m);
    for (std::size_t i = 0; i < kk; ++i) {
      const CVec f = effective_bs_channel(scn, ch, pb, i);
      for (std::size_t j = 0; j < scn.m; ++j) f_sum[j] += f[j];
    }
    CVec v = la::adjoint_matvec(ch.h_br, f_sum);
    CVec t = la::adjoint_matvec(ch.h_bs, f_sum);
    for (std::size_t j = 0; j < scn.n(); ++j) t[j] *= std::conj(phi_radar[j]);
    const CVec v2 = la::adjoint_matvec(ch.h_sr, t);
    for (std::size_t j = 0; j < scn.q; ++j) v[j] += v2[j];
    vs[r] = std::move(v);
  });

  CMat acc(scn.q, scn.q);
  for (std::size_t r = 0; r < runs; ++r) {
    for (std::size_t i = 0; i < scn.q; ++i)
      for (std::size_t j = 0; j < scn.q; ++j)
        acc(i, j) += vs[r][i] * std::conj(vs[r][j]);
  }
  const metrics::EffectiveCovariances covs =
      metrics::build_covariances(scn, pb);
  acc *= cplx(covs.lambda_bar * scn.rho / static_cast<double>(kk) /
                  static_cast<double>(runs),
              0.0);
  return acc;
}

double fd_gradient_check(const Scenario& scn, const PassiveBeamformer& pb,
                         const std::vector<CVec>& u_beams,
                         std::size_t directions, double epsilon,
                         std::uint64_t seed) {
  if (epsilon < 1e-8 || epsilon > 1e-4)
    throw std::invalid_argument("fd_gradient_check: epsilon out of range");
  const std::size_t n = pb.n();
  const metrics::SeContext ctx = metrics::make_se_context(scn, u_beams);
  const metrics::SeEval at = metrics::evaluate_se(ctx, pb, true);

  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t d = 0; d < directions; ++d) {
    CVec dth(2 * n);
    la::RVec dbe(2 * n);
    double scale2 = 0.0;
    for (auto& v : dth) {
      v = rng.cnormal();
      scale2 += std::norm(v);
    }
    for (auto& v : dbe) {
      v = rng.normal();
      scale2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(scale2);
    for (auto& v : dth) v *= inv;
    for (auto& v : dbe) v *= inv;

    auto shifted = [&](double sign) {
      PassiveBeamformer p = pb;
      for (std::size_t i = 0; i < n; ++i) {
        p.theta_t[i] += sign * epsilon * dth[i];
        p.theta_r[i] += sign * epsilon * dth[i + n];
        p.beta_t[i] += sign * epsilon * dbe[i];
        p.beta_r[i] += sign * epsilon * dbe[i + n];
      }
      return metrics::evaluate_se(ctx, p, false).se;
    };
    const double fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * epsilon);

    double pred = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i)
      pred += 2.0 * (std::conj(at.grad.theta[i]) * dth[i]).real();
    for (std::size_t i = 0; i < 2 * n; ++i) pred += at.grad.beta[i] * dbe[i];

    const double denom = std::max({std::abs(fd), std::abs(pred), 1e-300});
    worst = std::max(worst, std::abs(fd - pred) / denom);
  }
  return worst;
}

}  // namespace starcoex::mc
