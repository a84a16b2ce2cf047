#include "starcoex/radar.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

namespace starcoex::radar {

InfeasibleBudget::InfeasibleBudget(double required, double budget)
    : std::runtime_error(
          "radar: SINR thresholds need total power " + std::to_string(required) +
          " W but the budget is " + std::to_string(budget) + " W"),
      min_feasible(required) {}

double RadarBeams::total_power() const {
  double p = 0.0;
  for (const CVec& uz : u) p += kern::sumsq(uz.data(), uz.size());
  return p;
}

CMat interference_matrix(const Scenario& scn, const EffectiveCovariances& covs,
                         const PassiveBeamformer& pb) {
  (void)pb;  // already folded into the covariances
  return covs.a_interf;
}

CVec optimal_receive_beam(const Scenario& scn, const CMat& a_interf,
                          const CVec& u_z, std::size_t z) {
  const CVec& a = scn.steering[z];
  const cplx gain = scn.alpha[z] * kern::cdotu(a.data(), u_z.data(), scn.q);
  CVec v(scn.q);
  for (std::size_t i = 0; i < scn.q; ++i) v[i] = gain * a[i];
  CMat lhs = a_interf;
  for (std::size_t i = 0; i < scn.q; ++i) lhs(i, i) += scn.sigma_r2;
  return la::solve_hpd(lhs, v);
}

double gamma_bar(const Scenario& scn, const CMat& a_interf, std::size_t z) {
  const CVec& a = scn.steering[z];
  CMat lhs = a_interf;
  for (std::size_t i = 0; i < scn.q; ++i) lhs(i, i) += scn.sigma_r2;
  const CVec x = la::solve_hpd(lhs, a);
  const double quad = la::dot(a, x).real();  // a^H (s^2 I + A)^{-1} a
  return scn.gamma_r / (std::norm(scn.alpha[z]) * quad);
}

namespace {

// Conjugate steering normalized to unit norm; the beam decomposition uses an
// orthonormal pair so eta magnitudes are watts directly.
CVec unit_conj_steering(const Scenario& scn, std::size_t z) {
  CVec a(scn.q);
  const double s = 1.0 / std::sqrt(static_cast<double>(scn.q));
  for (std::size_t i = 0; i < scn.q; ++i)
    a[i] = std::conj(scn.steering[z][i]) * s;
  return a;
}

// Principal component of a Hermitian PSD matrix, scaled by sqrt(eigenvalue)
// so the outer product reproduces the dominant energy.
CVec principal_component(const CMat& m) {
  la::Eigh e = la::eigh(m);
  const std::size_t n = m.rows();
  CVec v(n);
  const double s = e.w.back() > 0.0 ? std::sqrt(e.w.back()) : 0.0;
  for (std::size_t i = 0; i < n; ++i) v[i] = e.v(i, n - 1) * s;
  return v;
}

CMat aggregate_interference_cov(const EffectiveCovariances& covs) {
  CMat sum = covs.r_rsk.front();
  for (std::size_t k = 1; k < covs.r_rsk.size(); ++k) sum += covs.r_rsk[k];
  return sum;
}

std::optional<CVec> residual_against(const CVec& h, const CVec& abar) {
  const double hn = la::norm(h);
  if (hn == 0.0) return std::nullopt;
  const cplx p = la::dot(abar, h);  // abar^H h, |abar| = 1
  CVec res(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) res[i] = h[i] - p * abar[i];
  const double rn = la::norm(res);
  if (rn < 1e-10 * hn) return std::nullopt;
  for (auto& v : res) v /= rn;
  return res;
}

}  // namespace

std::optional<CVec> residual_direction(const CMat& aggregate_cov,
                                       const Scenario& scn, std::size_t z) {
  return residual_against(principal_component(aggregate_cov),
                          unit_conj_steering(scn, z));
}

RadarBeams optimal_transmit_beams(const Scenario& scn,
                                  const EffectiveCovariances& covs,
                                  const PassiveBeamformer& pb,
                                  const CVec* instantaneous_h) {
  const std::size_t zn = scn.z();
  const CMat a_interf = interference_matrix(scn, covs, pb);
  const CVec h = instantaneous_h
                     ? *instantaneous_h
                     : principal_component(aggregate_interference_cov(covs));

  RadarBeams beams;
  beams.eta1.resize(zn);
  beams.eta2.assign(zn, cplx(0.0, 0.0));
  beams.gamma_bar.resize(zn);
  beams.e.resize(zn);
  beams.design_interference.assign(zn, 0.0);

  // Per-direction channel split h = p abar + q e with q >= 0 real.
  std::vector<cplx> p_coef(zn);
  std::vector<double> q_coef(zn, 0.0);
  std::vector<CVec> abar(zn);
  double required = 0.0;
  for (std::size_t z = 0; z < zn; ++z) {
    abar[z] = unit_conj_steering(scn, z);
    beams.gamma_bar[z] = gamma_bar(scn, a_interf, z);
    beams.eta1[z] = std::sqrt(beams.gamma_bar[z]);
    required += beams.gamma_bar[z];
    beams.e[z] = residual_against(h, abar[z]);
    p_coef[z] = la::dot(abar[z], h);
    if (beams.e[z]) q_coef[z] = la::dot(*beams.e[z], h).real();
  }
  if (required > scn.p_max) throw InfeasibleBudget(required, scn.p_max);

  // eta2(lambda) = -eta1 conj(p) q / (q^2 + lambda); total power decreases
  // monotonically in lambda, so complementary slackness pins lambda by
  // bisection when the unconstrained split exceeds the budget.
  auto eta2_at = [&](std::size_t z, double lam) -> cplx {
    if (!beams.e[z] || q_coef[z] <= 0.0) return 0.0;
    return -beams.eta1[z] * std::conj(p_coef[z]) * q_coef[z] /
           (q_coef[z] * q_coef[z] + lam);
  };
  auto power_at = [&](double lam) {
    double p = 0.0;
    for (std::size_t z = 0; z < zn; ++z)
      p += beams.gamma_bar[z] + std::norm(eta2_at(z, lam));
    return p;
  };

  double lambda = 0.0;
  if (power_at(0.0) > scn.p_max) {
    double lo = 0.0, hi = 1.0;
    while (power_at(hi) > scn.p_max) {
      hi *= 2.0;
      if (hi > 1e300) throw std::runtime_error("radar: multiplier overflow");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (power_at(mid) > scn.p_max ? lo : hi) = mid;
      if (std::abs(power_at(hi) - scn.p_max) <= 1e-9 * scn.p_max) break;
    }
    lambda = hi;  // power(hi) <= p_max, within tolerance of it
  }
  beams.lambda_star = lambda;

  beams.u.resize(zn);
  beams.w.resize(zn);
  for (std::size_t z = 0; z < zn; ++z) {
    beams.eta2[z] = eta2_at(z, lambda);
    CVec uz(scn.q);
    for (std::size_t i = 0; i < scn.q; ++i) {
      uz[i] = beams.eta1[z] * abar[z][i];
      if (beams.e[z]) uz[i] += beams.eta2[z] * (*beams.e[z])[i];
    }
    beams.u[z] = std::move(uz);
    beams.w[z] = optimal_receive_beam(scn, a_interf, beams.u[z], z);
    // |u^H h|^2 in closed form: the residual split leaves
    // eta1 p (1 - q^2/(q^2+lambda)) of the channel uncancelled.
    const double q2 = q_coef[z] * q_coef[z];
    double factor = 1.0;
    if (beams.e[z] && q_coef[z] > 0.0) factor = lambda / (q2 + lambda);
    beams.design_interference[z] =
        beams.gamma_bar[z] * std::norm(p_coef[z]) * factor * factor;
  }
  return beams;
}

void save_beams(const RadarBeams& beams, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "starcoex-beams 1\n";
  os << beams.u.size() << ' ' << (beams.u.empty() ? 0 : beams.u.front().size())
     << '\n';
  os << std::setprecision(17);
  auto dump = [&](const char* tag, const std::vector<CVec>& vecs) {
    for (std::size_t z = 0; z < vecs.size(); ++z) {
      os << tag << z;
      for (const cplx& v : vecs[z]) os << ' ' << v.real() << ' ' << v.imag();
      os << '\n';
    }
  };
  dump("u", beams.u);
  dump("w", beams.w);
}

RadarBeams load_beams(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "starcoex-beams" || version != 1)
    throw std::runtime_error("radar beams: unrecognized file header");
  std::size_t zn = 0, q = 0;
  is >> zn >> q;
  RadarBeams beams;
  auto read = [&](const char* tag, std::vector<CVec>& vecs) {
    vecs.resize(zn);
    for (std::size_t z = 0; z < zn; ++z) {
      std::string got;
      is >> got;
      if (got != tag + std::to_string(z))
        throw std::runtime_error("radar beams: malformed file");
      vecs[z].resize(q);
      for (std::size_t i = 0; i < q; ++i) {
        double re = 0.0, im = 0.0;
        if (!(is >> re >> im))
          throw std::runtime_error("radar beams: truncated file");
        vecs[z][i] = {re, im};
      }
    }
  };
  read("u", beams.u);
  read("w", beams.w);
  return beams;
}

std::vector<std::pair<double, double>> interference_vs_budget(
    const Scenario& scn, const EffectiveCovariances& covs,
    const PassiveBeamformer& pb, const std::vector<double>& budgets) {
  std::vector<std::pair<double, double>> out;
  out.reserve(budgets.size());
  Scenario tweaked = scn;
  for (double budget : budgets) {
    tweaked.p_max = budget;
    RadarBeams beams = optimal_transmit_beams(tweaked, covs, pb);
    double interf = 0.0;
    for (double v : beams.design_interference) interf += v;
    out.emplace_back(budget, interf);
  }
  return out;
}

}  // namespace starcoex::radar
