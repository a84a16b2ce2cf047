#include <doctest.h>

#include "test_support.hpp"

using namespace test_support;
using star::PassiveBeamformer;

TEST_CASE("region trace: fast path equals the matrix route") {
  const model::Scenario scn = random_scenario(301);
  Rng rng(5);
  const PassiveBeamformer pb = star::random_phases(scn.n(), rng);
  for (model::Region w : {model::Region::t, model::Region::r}) {
    const double fast = metrics::region_trace(scn, pb, w);
    const double naive = naive_region_trace(scn, pb, w);
    CHECK(rel_err(fast, naive) < 1e-12);
    CHECK(fast >= 0.0);
  }
}

TEST_CASE("effective covariances reduce correctly in special cases") {
  const model::Scenario scn = random_scenario(302);
  // no surface: direct term only
  const PassiveBeamformer off = PassiveBeamformer::no_ris(scn.n());
  const CMat cov0 = metrics::effective_cov_bs(scn, off, 0);
  CMat want = scn.r_bs;
  want *= scn.beta_bk[0];
  CMat diff = cov0;
  diff *= -1.0;
  diff += want;
  CHECK(la::fro_norm(diff) < 1e-12 * la::fro_norm(want));

  const CMat rcov0 = metrics::effective_cov_radar(scn, off, 1);
  CMat rwant = scn.r_r;
  rwant *= scn.beta_rk[1];
  CMat rdiff = rcov0;
  rdiff *= -1.0;
  rdiff += rwant;
  CHECK(la::fro_norm(rdiff) < 1e-12 * la::fro_norm(rwant));
}

TEST_CASE("identity surface correlation pins the region trace to N/2") {
  // with r_ris = I and even split, tr(phi phi^H) = sum beta^2 = N/2
  const model::Scenario scn = white_scenario(4, 2, 4, 1, 1, 3);
  Rng rng(8);
  PassiveBeamformer pb = star::random_phases(scn.n(), rng);
  const double c = metrics::region_trace(scn, pb, model::Region::t);
  CHECK(c == doctest::Approx(scn.n() / 2.0).epsilon(1e-12));
  const CMat cov = metrics::effective_cov_bs(scn, pb, 0);
  const double scale = scn.beta_bk[0] + scn.beta_bsk(0) * scn.n() / 2.0;
  CHECK(cov(0, 0).real() == doctest::Approx(scale).epsilon(1e-12));
}

TEST_CASE("normalization lambda") {
  const model::Scenario scn = white_scenario(6, 2, 2, 2, 2, 3);
  const PassiveBeamformer off = PassiveBeamformer::no_ris(scn.n());
  const metrics::EffectiveCovariances covs =
      metrics::build_covariances(scn, off);
  // K identity covariances of size M
  CHECK(covs.lambda_bar ==
        doctest::Approx(1.0 / (4.0 * 6.0)).epsilon(1e-12));

  metrics::EffectiveCovariances one;
  one.r_bsk.push_back(10.0 * CMat::identity(1));
  CHECK(metrics::normalization_lambda(one) == doctest::Approx(0.1));

  metrics::EffectiveCovariances bad;
  bad.r_bsk.push_back(CMat(2, 2));  // zero trace
  CHECK_THROWS(metrics::normalization_lambda(bad));
}

TEST_CASE("radar SINR: matched rank-one case gives Q cubed") {
  model::ScenarioSpec spec;
  spec.m = 2;
  spec.n_h = 1;
  spec.n_v = 2;
  spec.k_t = 1;
  spec.k_r = 1;
  spec.q = 2;
  spec.detection_angles = {0.4};
  spec.alpha_all = 1.0;
  spec.sigma_r2 = 1.0;
  spec.sigma_c2 = 1.0;
  spec.rho = 1e-30;  // BS interference negligible
  spec.identity_correlation = true;
  const model::Scenario scn = model::build_scenario(spec);
  const PassiveBeamformer pb = PassiveBeamformer::even_split(scn.n());
  const metrics::EffectiveCovariances covs = metrics::build_covariances(scn, pb);

  CVec u(scn.q);
  for (std::size_t i = 0; i < scn.q; ++i) u[i] = std::conj(scn.steering[0][i]);
  const cplx au = kern::cdotu(scn.steering[0].data(), u.data(), scn.q);
  CVec w(scn.q);
  for (std::size_t i = 0; i < scn.q; ++i) w[i] = scn.steering[0][i] * au;
  CHECK(metrics::radar_sinr(scn, covs, w, u, 0) ==
        doctest::Approx(8.0).epsilon(1e-10));

  // zero transmit beam: zero SINR; zero receive beam: rejected
  const CVec zero(scn.q, cplx(0.0, 0.0));
  CHECK(metrics::radar_sinr(scn, covs, w, zero, 0) == 0.0);
  CHECK_THROWS_AS(metrics::radar_sinr(scn, covs, zero, u, 0),
                  std::invalid_argument);
}

TEST_CASE("UE SINR white single-user oracle: M over 2") {
  for (std::size_t m : {8u, 16u}) {
    const model::Scenario scn = white_scenario(m, 2, 2, 0, 1, 3, 1.0, 1.0);
    const PassiveBeamformer off = PassiveBeamformer::no_ris(scn.n());
    const metrics::EffectiveCovariances covs =
        metrics::build_covariances(scn, off);
    const double gamma = metrics::ue_sinr(scn, covs, 0, {});
    // E{|h^H h|^2} = tr^2(R) + tr(R^2) makes the interference M + M here
    CHECK(gamma == doctest::Approx(m / 2.0).epsilon(1e-12));
    if (m == 16) {
      const double se = metrics::sum_se(scn, covs, {});
      CHECK(se == doctest::Approx(std::log2(1.0 + 8.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("UE SINR: noise vanishes at high power") {
  model::ScenarioSpec spec;
  spec.m = 6;
  spec.n_h = 2;
  spec.n_v = 2;
  spec.k_t = 1;
  spec.k_r = 1;
  spec.q = 3;
  spec.detection_angles = {0.2};
  spec.identity_correlation = true;
  spec.rho = 1e12;
  const model::Scenario scn = model::build_scenario(spec);
  const PassiveBeamformer off = PassiveBeamformer::no_ris(scn.n());
  const metrics::EffectiveCovariances covs =
      metrics::build_covariances(scn, off);
  const double gamma = metrics::ue_sinr(scn, covs, 0, {});
  // limit: tr^2 / (tr(R^2) + cross) = M^2 / (M + M) with identity covariances
  CHECK(gamma == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("UE SINR strictly decreases with radar interference") {
  const model::Scenario scn = random_scenario(305);
  Rng rng(6);
  const PassiveBeamformer pb = star::random_phases(scn.n(), rng);
  const metrics::EffectiveCovariances covs = metrics::build_covariances(scn, pb);
  auto u = probing_beams(scn);
  const double g1 = metrics::ue_sinr(scn, covs, 0, u);
  for (auto& uz : u)
    for (auto& v : uz) v *= 2.0;  // 4x the radar power toward the UEs
  const double g2 = metrics::ue_sinr(scn, covs, 0, u);
  CHECK(g2 < g1);
}

TEST_CASE("sum SE adds log terms and respects the prefactor") {
  const model::Scenario scn = random_scenario(306);
  Rng rng(7);
  const PassiveBeamformer pb = star::random_phases(scn.n(), rng);
  const metrics::EffectiveCovariances covs = metrics::build_covariances(scn, pb);
  const auto u = probing_beams(scn);
  double manual = 0.0;
  for (std::size_t k = 0; k < scn.k(); ++k)
    manual += std::log2(1.0 + metrics::ue_sinr(scn, covs, k, u));
  CHECK(metrics::sum_se(scn, covs, u) ==
        doctest::Approx(scn.se_prefactor * manual).epsilon(1e-13));
}

TEST_CASE("fast evaluator matches the matrix route") {
  const model::Scenario scn = random_scenario(307, 10, 3, 3, 2, 2, 5);
  Rng rng(11);
  const PassiveBeamformer pb = star::random_phases(scn.n(), rng);
  const auto u = probing_beams(scn);
  const metrics::SeContext ctx = metrics::make_se_context(scn, u);
  const metrics::SeEval ev = metrics::evaluate_se(ctx, pb, false);
  const metrics::EffectiveCovariances covs = metrics::build_covariances(scn, pb);
  CHECK(rel_err(ev.se, metrics::sum_se(scn, covs, u)) < 1e-12);
  CHECK(rel_err(ev.lambda_bar, covs.lambda_bar) < 1e-12);
  for (std::size_t k = 0; k < scn.k(); ++k)
    CHECK(rel_err(ev.gamma[k], metrics::ue_sinr(scn, covs, k, u)) < 1e-12);
}

TEST_CASE("uncorrelated surface: SE ignores phases at fixed amplitudes") {
  const model::Scenario scn = white_scenario(6, 2, 4, 1, 1, 3);
  const auto u = probing_beams(scn);
  Rng rng(13);
  const PassiveBeamformer a = star::random_phases(scn.n(), rng);
  PassiveBeamformer b = a;
  Rng rng2(14);
  const PassiveBeamformer scrambled = star::random_phases(scn.n(), rng2);
  b.theta_t = scrambled.theta_t;
  b.theta_r = scrambled.theta_r;
  CHECK(rel_err(metrics::sum_se(scn, a, u), metrics::sum_se(scn, b, u)) <
        1e-12);
}
