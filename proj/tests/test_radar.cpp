#include <doctest.h>

#include "starcoex/radar.hpp"
#include "test_support.hpp"

using namespace test_support;
namespace radar = starcoex::radar;
using star::PassiveBeamformer;

namespace {

struct Setup {
  model::Scenario scn;
  PassiveBeamformer pb;
  metrics::EffectiveCovariances covs;
};

Setup make_setup(std::uint64_t seed, double p_max = 200.0) {
  Setup s{random_scenario(seed, 8, 2, 4, 1, 1, 4), {}, {}};
  s.scn.p_max = p_max;
  Rng rng(seed + 5);
  s.pb = star::random_phases(s.scn.n(), rng);
  s.covs = metrics::build_covariances(s.scn, s.pb);
  return s;
}

}  // namespace

TEST_CASE("interference matrix: PSD, Hermitian, proportional to r_r") {
  Setup s = make_setup(501);
  const CMat a = radar::interference_matrix(s.scn, s.covs, s.pb);
  CHECK(la::is_hermitian(a, 1e-12 * la::fro_norm(a)));
  const la::Eigh e = la::eigh(a);
  CHECK(e.w.front() >= -1e-12 * la::trace(a).real());
  // rho -> 0 sends it to zero
  model::Scenario quiet = s.scn;
  quiet.rho = 1e-30;
  const metrics::EffectiveCovariances qc =
      metrics::build_covariances(quiet, s.pb);
  CHECK(la::fro_norm(qc.a_interf) <= 1e-20 * la::fro_norm(a));
  // no surface: reduces to the direct-link scale of r_r
  const PassiveBeamformer off = PassiveBeamformer::no_ris(s.scn.n());
  const metrics::EffectiveCovariances oc =
      metrics::build_covariances(s.scn, off);
  const double ratio = oc.a_interf(0, 0).real() / s.scn.r_r(0, 0).real();
  CMat expect = s.scn.r_r;
  expect *= ratio;
  CMat diff = oc.a_interf;
  diff *= -1.0;
  diff += expect;
  CHECK(la::fro_norm(diff) < 1e-10 * la::fro_norm(expect));
}

TEST_CASE("optimal receive beam maximizes the radar SINR") {
  Setup s = make_setup(502);
  Rng rng(7);
  CVec u(s.scn.q);
  for (auto& v : u) v = rng.cnormal();
  const CVec w_star =
      radar::optimal_receive_beam(s.scn, s.covs.a_interf, u, 1);
  const double best = metrics::radar_sinr(s.scn, s.covs, w_star, u, 1);
  // scaling invariance
  CVec w_scaled = w_star;
  for (auto& v : w_scaled) v *= cplx(0.3, -1.7);
  CHECK(rel_err(metrics::radar_sinr(s.scn, s.covs, w_scaled, u, 1), best) <
        1e-12);
  // beats 100 random receive beams
  for (int t = 0; t < 100; ++t) {
    CVec w(s.scn.q);
    for (auto& v : w) v = rng.cnormal();
    CHECK(metrics::radar_sinr(s.scn, s.covs, w, u, 1) <= best + 1e-10 * best);
  }
}

TEST_CASE("receive beam with no interference reduces to matched filtering") {
  model::ScenarioSpec spec;
  spec.m = 2;
  spec.n_h = 1;
  spec.n_v = 2;
  spec.k_t = 1;
  spec.k_r = 1;
  spec.q = 3;
  spec.detection_angles = {0.5};
  spec.alpha_all = 2.0;
  spec.sigma_r2 = 0.7;
  spec.rho = 1e-30;
  spec.identity_correlation = true;
  const model::Scenario scn = model::build_scenario(spec);
  const PassiveBeamformer pb = PassiveBeamformer::even_split(scn.n());
  const metrics::EffectiveCovariances covs = metrics::build_covariances(scn, pb);
  Rng rng(9);
  CVec u(scn.q);
  for (auto& v : u) v = rng.cnormal();
  const CVec w = radar::optimal_receive_beam(scn, covs.a_interf, u, 0);
  // w ~ a (a^T u): colinear with the steering vector
  const cplx au = kern::cdotu(scn.steering[0].data(), u.data(), scn.q);
  for (std::size_t i = 0; i < scn.q; ++i) {
    const cplx expect = scn.alpha[0] * scn.steering[0][i] * au / spec.sigma_r2;
    CHECK(std::abs(w[i] - expect) < 1e-10 * std::abs(expect));
  }
  const double got = metrics::radar_sinr(scn, covs, w, u, 0);
  const double want = std::norm(scn.alpha[0]) * 3.0 * std::norm(au) / 0.7;
  CHECK(rel_err(got, want) < 1e-9);
}

TEST_CASE("gamma_bar: closed form at zero interference, monotone in A") {
  Setup s = make_setup(503);
  // A = 0
  const CMat zero(s.scn.q, s.scn.q);
  const double gb0 = radar::gamma_bar(s.scn, zero, 2);
  const double expect = s.scn.gamma_r * s.scn.sigma_r2 /
                        (std::norm(s.scn.alpha[2]) *
                         static_cast<double>(s.scn.q));
  CHECK(rel_err(gb0, expect) < 1e-12);
  // PSD increase of A cannot reduce gamma_bar
  const double gb1 = radar::gamma_bar(s.scn, s.covs.a_interf, 2);
  CHECK(gb1 >= gb0);
  CMat bigger = s.covs.a_interf;
  bigger += CMat::identity(s.scn.q);
  CHECK(radar::gamma_bar(s.scn, bigger, 2) >= gb1);
  CHECK(gb0 > 0.0);
}

TEST_CASE("residual direction: unit norm, orthogonal, degenerate cases") {
  Setup s = make_setup(504);
  const std::size_t q = s.scn.q;
  // aggregate aligned with the steering direction: no residual left
  CVec a_conj(q);
  for (std::size_t i = 0; i < q; ++i)
    a_conj[i] = std::conj(s.scn.steering[1][i]);
  const CMat aligned = la::outer(a_conj, a_conj);
  CHECK_FALSE(radar::residual_direction(aligned, s.scn, 1).has_value());

  // generic covariance: unit residual orthogonal to the steering conjugate
  const auto e = radar::residual_direction(
      [&] {
        CMat sum = s.covs.r_rsk[0];
        sum += s.covs.r_rsk[1];
        return sum;
      }(),
      s.scn, 1);
  REQUIRE(e.has_value());
  CHECK(la::norm(*e) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(kern::cdotu(s.scn.steering[1].data(), e->data(), q)) < 1e-10);

  // rank-one covariance orthogonal to the steering vector: e is that vector
  Rng rng(19);
  CVec v(q);
  for (auto& x : v) x = rng.cnormal();
  const cplx proj = la::dot(a_conj, v);
  for (std::size_t i = 0; i < q; ++i)
    v[i] -= proj * a_conj[i] / static_cast<double>(q);
  const double vn = la::norm(v);
  const auto e2 = radar::residual_direction(la::outer(v, v), s.scn, 1);
  REQUIRE(e2.has_value());
  const cplx overlap = la::dot(*e2, v);
  CHECK(std::abs(std::abs(overlap) - vn) < 1e-9 * vn);  // equal up to phase
}

TEST_CASE("transmit design satisfies both constraints with slackness") {
  for (std::uint64_t seed : {505u, 506u}) {
    for (double p_max : {3.0, 300.0}) {
      Setup s = make_setup(seed, p_max);
      radar::RadarBeams beams;
      try {
        beams = radar::optimal_transmit_beams(s.scn, s.covs, s.pb);
      } catch (const radar::InfeasibleBudget& bad) {
        CHECK(bad.min_feasible > p_max);
        continue;
      }
      REQUIRE(beams.u.size() == s.scn.z());
      // power budget
      CHECK(beams.total_power() <= s.scn.p_max + 1e-9);
      // SINR threshold per direction, via the paired receive beams
      for (std::size_t z = 0; z < s.scn.z(); ++z)
        CHECK(metrics::radar_sinr(s.scn, s.covs, beams.w[z], beams.u[z], z) >=
              s.scn.gamma_r - 1e-9);
      // complementary slackness
      const double resid =
          beams.lambda_star * (beams.total_power() - s.scn.p_max);
      CHECK(std::abs(resid) <= 1e-6 * s.scn.gamma_r * s.scn.p_max);
      // residual directions: unit and orthogonal where defined
      for (std::size_t z = 0; z < s.scn.z(); ++z) {
        if (!beams.e[z]) continue;
        CHECK(la::norm(*beams.e[z]) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(kern::cdotu(s.scn.steering[z].data(),
                                   beams.e[z]->data(), s.scn.q)) < 1e-10);
      }
    }
  }
}

TEST_CASE("per-direction interference matches its closed form") {
  Setup s = make_setup(507, 1e6);
  // squeeze the budget so the power constraint binds
  double required = 0.0;
  for (std::size_t z = 0; z < s.scn.z(); ++z)
    required += radar::gamma_bar(s.scn, s.covs.a_interf, z);
  s.scn.p_max = 1.3 * required;
  radar::RadarBeams beams = radar::optimal_transmit_beams(s.scn, s.covs, s.pb);
  // rebuild the design channel: principal component of the aggregate
  CMat agg = s.covs.r_rsk[0];
  for (std::size_t k = 1; k < s.covs.r_rsk.size(); ++k) agg += s.covs.r_rsk[k];
  const la::Eigh e = la::eigh(agg);
  CVec h(s.scn.q);
  for (std::size_t i = 0; i < s.scn.q; ++i)
    h[i] = e.v(i, s.scn.q - 1) * std::sqrt(e.w.back());
  for (std::size_t z = 0; z < s.scn.z(); ++z) {
    const double actual = std::norm(la::dot(beams.u[z], h));
    CHECK(std::abs(actual - beams.design_interference[z]) <=
          1e-9 * std::max(1.0, beams.design_interference[z]));
  }
}

TEST_CASE("receive beams are a fixed point of the design") {
  Setup s = make_setup(508);
  const radar::RadarBeams beams =
      radar::optimal_transmit_beams(s.scn, s.covs, s.pb);
  for (std::size_t z = 0; z < s.scn.z(); ++z) {
    const double before =
        metrics::radar_sinr(s.scn, s.covs, beams.w[z], beams.u[z], z);
    const CVec w2 =
        radar::optimal_receive_beam(s.scn, s.covs.a_interf, beams.u[z], z);
    const double after = metrics::radar_sinr(s.scn, s.covs, w2, beams.u[z], z);
    CHECK(rel_err(before, after) < 1e-12);
  }
}

TEST_CASE("infeasible budgets name the minimum feasible power") {
  Setup s = make_setup(509, 1e-6);
  try {
    radar::optimal_transmit_beams(s.scn, s.covs, s.pb);
    FAIL("expected InfeasibleBudget");
  } catch (const radar::InfeasibleBudget& bad) {
    CHECK(bad.min_feasible > s.scn.p_max);
    // the reported minimum is the sum of the per-direction thresholds
    double required = 0.0;
    for (std::size_t z = 0; z < s.scn.z(); ++z)
      required += radar::gamma_bar(s.scn, s.covs.a_interf, z);
    CHECK(bad.min_feasible == doctest::Approx(required));
  }
}

TEST_CASE("interference is non-increasing in the budget; boundary uses "
          "steering only") {
  Setup s = make_setup(510);
  double required = 0.0;
  for (std::size_t z = 0; z < s.scn.z(); ++z)
    required += radar::gamma_bar(s.scn, s.covs.a_interf, z);

  std::vector<double> budgets;
  for (double f : {1.0, 1.2, 2.0, 5.0, 20.0, 1000.0})
    budgets.push_back(required * f);
  const auto curve =
      radar::interference_vs_budget(s.scn, s.covs, s.pb, budgets);
  REQUIRE(curve.size() == budgets.size());
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i].second <= curve[i - 1].second + 1e-12);

  // at the exact feasibility boundary all residual coefficients vanish
  model::Scenario tight = s.scn;
  tight.p_max = required;
  const radar::RadarBeams beams =
      radar::optimal_transmit_beams(tight, s.covs, s.pb);
  for (const cplx& eta2 : beams.eta2)
    CHECK(std::abs(eta2) < 1e-5 * std::sqrt(required));
}
