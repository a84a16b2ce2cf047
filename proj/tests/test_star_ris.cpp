#include <doctest.h>

#include <sstream>

#include "test_support.hpp"

using namespace test_support;
using star::PassiveBeamformer;
using star::Protocol;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("pb_matrix basics") {
  PassiveBeamformer pb = PassiveBeamformer::even_split(3);
  for (auto& b : pb.beta_t) b = 1.0;
  for (auto& b : pb.beta_r) b = 0.0;
  const CMat full = star::pb_matrix(pb, model::Region::t);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(full(i, i) - cplx(1.0, 0.0)) < 1e-15);
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(full(i, j)) == 0.0);
  }
  const CMat half =
      star::pb_matrix(PassiveBeamformer::even_split(3), model::Region::t);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(half(i, i)) == doctest::Approx(1.0 / std::sqrt(2.0)));

  PassiveBeamformer ms = star::fixed_partition(3, 1);
  const CMat pm = star::pb_matrix(ms, model::Region::t);
  CHECK(std::abs(pm(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(pm(1, 1)) == 0.0);
  CHECK(std::abs(pm(2, 2)) == 0.0);
}

TEST_CASE("project_theta: unit modulus, idempotent, zero convention") {
  CVec v = {cplx(2.0, 0.0), cplx(1.0, 1.0), cplx(0.0, 0.0), cplx(-3.0, 4.0)};
  const CVec p = star::project_theta(v);
  CHECK(std::abs(p[0] - cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(p[1] - std::polar(1.0, kPi / 4.0)) < 1e-15);
  CHECK(std::abs(p[2] - cplx(1.0, 0.0)) == 0.0);
  for (const cplx& x : p) CHECK(std::abs(std::abs(x) - 1.0) < 1e-15);
  const CVec pp = star::project_theta(p);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(pp[i] - p[i]) < 1e-15);
}

TEST_CASE("project_beta: circle pairs, idempotent, nearest point") {
  la::RVec v = {3.0, 0.0, 1.0 / std::sqrt(2.0),
                4.0, 0.0, 1.0 / std::sqrt(2.0)};
  const la::RVec p = star::project_beta(v);
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[3] == doctest::Approx(0.8));
  // zero pair convention
  CHECK(p[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(p[4] == doctest::Approx(1.0 / std::sqrt(2.0)));
  // already on the circle: unchanged
  CHECK(p[2] == doctest::Approx(1.0 / std::sqrt(2.0)));
  const la::RVec pp = star::project_beta(p);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(pp[i] == doctest::Approx(p[i]));

  // nearest point on the circle beats a dense angular grid
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const double a = rng.normal(), b = rng.normal();
    const la::RVec q = star::project_beta({a, b});
    const double best = a * q[0] + b * q[1];
    for (int g = 0; g < 100000; ++g) {
      const double ang = 2.0 * kPi * g / 100000.0;
      CHECK(a * std::cos(ang) + b * std::sin(ang) <= best + 1e-6);
    }
  }
}

TEST_CASE("canonicalize flips signs without changing products") {
  PassiveBeamformer pb = PassiveBeamformer::even_split(2);
  pb.beta_t = {-0.6, 0.3};
  pb.beta_r = {0.8, -std::sqrt(1.0 - 0.09)};
  pb.theta_t = {cplx(1.0, 0.0), std::polar(1.0, 0.7)};
  pb.theta_r = {std::polar(1.0, -1.2), cplx(0.0, 1.0)};
  const CVec before_t = pb.coeffs(model::Region::t);
  const CVec before_r = pb.coeffs(model::Region::r);
  const PassiveBeamformer canon = star::canonicalize(pb);
  CHECK(canon.beta_t[0] == doctest::Approx(0.6));
  CHECK(std::abs(canon.theta_t[0] - cplx(-1.0, 0.0)) < 1e-15);
  const CVec after_t = canon.coeffs(model::Region::t);
  const CVec after_r = canon.coeffs(model::Region::r);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(after_t[i] - before_t[i]) < 1e-15);
    CHECK(std::abs(after_r[i] - before_r[i]) < 1e-15);
  }
  CHECK_NOTHROW(star::validate(canon));
}

TEST_CASE("sum SE is invariant under simultaneous sign flips") {
  const model::Scenario scn = random_scenario(61);
  const auto u = probing_beams(scn);
  Rng rng(9);
  PassiveBeamformer pb = star::random_phases(scn.n(), rng);
  // scatter negative amplitudes
  for (std::size_t i = 0; i < pb.n(); i += 2) {
    pb.beta_t[i] = -pb.beta_t[i];
    pb.theta_t[i] = -pb.theta_t[i];
  }
  const double se_raw = metrics::sum_se(scn, pb, u);
  const double se_canon = metrics::sum_se(scn, star::canonicalize(pb), u);
  CHECK(rel_err(se_raw, se_canon) < 1e-12);
}

TEST_CASE("quantize_phases snaps to the grid with wraparound") {
  PassiveBeamformer pb = PassiveBeamformer::even_split(3);
  pb.theta_t = {std::polar(1.0, 3.0), std::polar(1.0, 0.8),
                std::polar(1.0, 6.2)};
  const PassiveBeamformer q1 = star::quantize_phases(pb, 1);
  CHECK(std::arg(q1.theta_t[0]) == doctest::Approx(kPi));   // 3.0 -> pi
  CHECK(std::abs(q1.theta_t[2] - cplx(1.0, 0.0)) < 1e-12);  // 6.2 wraps to 0

  const PassiveBeamformer q2 = star::quantize_phases(pb, 2);
  CHECK(std::arg(q2.theta_t[1]) == doctest::Approx(kPi / 2.0));  // 0.8 -> pi/2

  // grid points are fixed points
  const PassiveBeamformer q2b = star::quantize_phases(q2, 2);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(q2b.theta_t[i] - q2.theta_t[i]) < 1e-12);

  // brute-force nearest-grid oracle
  Rng rng(77);
  for (unsigned bits : {1u, 2u, 3u, 5u}) {
    const std::size_t levels = 1u << bits;
    for (int t = 0; t < 50; ++t) {
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      PassiveBeamformer one = PassiveBeamformer::even_split(1);
      one.theta_t[0] = std::polar(1.0, ang);
      const cplx got = star::quantize_phases(one, bits).theta_t[0];
      double best = 1e9;
      cplx best_pt;
      for (std::size_t l = 0; l < levels; ++l) {
        const cplx pt = std::polar(1.0, 2.0 * kPi * l / levels);
        if (std::abs(pt - one.theta_t[0]) < best) {
          best = std::abs(pt - one.theta_t[0]);
          best_pt = pt;  // chord distance is monotone in wrapped distance
        }
      }
      CHECK(std::abs(got - best_pt) < 1e-9);
    }
  }
}

TEST_CASE("ms_round binarizes with the documented tie-break") {
  PassiveBeamformer pb = PassiveBeamformer::even_split(3);
  pb.beta_t = {0.9, 0.2, 1.0 / std::sqrt(2.0)};
  pb.beta_r = {std::sqrt(1.0 - 0.81), std::sqrt(1.0 - 0.04),
               1.0 / std::sqrt(2.0)};
  const PassiveBeamformer ms = star::ms_round(pb);
  CHECK(ms.beta_t[0] == 1.0);
  CHECK(ms.beta_t[1] == 0.0);
  CHECK(ms.beta_t[2] == 1.0);  // tie toward t
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(ms.beta_t[i] * ms.beta_t[i] + ms.beta_r[i] * ms.beta_r[i] ==
          doctest::Approx(1.0));
  CHECK(ms.protocol == Protocol::ms);
  CHECK_NOTHROW(star::validate(ms));  // MS points satisfy the ES invariants
}

TEST_CASE("random_phases reproduces by seed, distinct across seeds") {
  Rng a(1), b(1), c(2);
  const PassiveBeamformer pa = star::random_phases(16, a);
  const PassiveBeamformer pb = star::random_phases(16, b);
  const PassiveBeamformer pc = star::random_phases(16, c);
  CHECK(pa.theta_t[3] == pb.theta_t[3]);
  CHECK(pa.theta_t[3] != pc.theta_t[3]);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(pa.beta_t[i] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(pa.beta_t[i] * pa.beta_t[i] + pa.beta_r[i] * pa.beta_r[i] ==
          doctest::Approx(1.0));
  }
  // empirical mean phase over many draws is close to pi
  Rng big(33);
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Rng d(starcoex::derive_seed(4242, i));
    const PassiveBeamformer p = star::random_phases(1, d);
    double ang = std::arg(p.theta_t[0]);
    if (ang < 0.0) ang += 2.0 * kPi;
    acc += ang;
  }
  CHECK(acc / draws == doctest::Approx(kPi).epsilon(0.02));
}

TEST_CASE("beamformer text round trip") {
  Rng rng(55);
  PassiveBeamformer pb = star::random_phases(6, rng);
  pb = star::ms_round(pb);
  std::stringstream ss;
  star::save(pb, ss);
  const PassiveBeamformer back = star::load(ss);
  CHECK(back.protocol == Protocol::ms);
  REQUIRE(back.n() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(back.theta_t[i] - pb.theta_t[i]) < 1e-12);
    CHECK(std::abs(back.theta_r[i] - pb.theta_r[i]) < 1e-12);
    CHECK(back.beta_t[i] == doctest::Approx(pb.beta_t[i]));
  }
}
