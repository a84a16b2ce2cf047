#include "starcoex/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace starcoex::model {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Shared eigendecomposition for the PSD check and the square root.
CMat checked_sqrt(const CMat& r, const char* name) {
  require(la::is_hermitian(r, 1e-12 * std::max(1.0, la::fro_norm(r))),
          std::string(name) + ": correlation matrix is not Hermitian");
  la::Eigh e = la::eigh(r);
  double tr = 0.0;
  for (double w : e.w) tr += w;
  require(e.w.front() >= -1e-10 * std::max(tr, 1e-300),
          std::string(name) + ": correlation matrix is not PSD");
  const std::size_t n = r.rows();
  CMat scaled(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const double s = e.w[c] > 0.0 ? std::sqrt(e.w[c]) : 0.0;
    for (std::size_t rr = 0; rr < n; ++rr) scaled(rr, c) = e.v(rr, c) * s;
  }
  return la::matmul(scaled, la::adjoint(e.v));
}

}  // namespace

CMat steering_correlation(std::size_t dim, std::size_t paths, double omega) {
  require(dim >= 1, "steering_correlation: dim must be positive");
  require(paths >= 1 && paths <= dim,
          "steering_correlation: need 1 <= paths <= dim");
  require(omega > 0.0, "steering_correlation: omega must be positive");
  CMat a(dim, paths);
  const double scale = 1.0 / std::sqrt(static_cast<double>(paths));
  for (std::size_t p = 0; p < paths; ++p) {
    const double phi = -kPi / 2.0 + static_cast<double>(p) * kPi /
                                        static_cast<double>(paths);
    const double w = -2.0 * kPi * omega * std::sin(phi);
    for (std::size_t d = 0; d < dim; ++d) {
      const double ang = w * static_cast<double>(d);
      a(d, p) = scale * cplx(std::cos(ang), std::sin(ang));
    }
  }
  return la::matmul(a, la::adjoint(a));
}

CMat ris_correlation(std::size_t n_h, std::size_t n_v, double d_h, double d_v,
                     double wavelength) {
  require(n_h >= 1 && n_v >= 1, "ris_correlation: grid must be nonempty");
  require(d_h > 0.0 && d_v > 0.0 && wavelength > 0.0,
          "ris_correlation: spacings and wavelength must be positive");
  const std::size_t n = n_h * n_v;
  CMat r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i % n_h) * d_h;
    const double yi = static_cast<double>(i / n_h) * d_v;
    for (std::size_t j = 0; j <= i; ++j) {
      const double dx = xi - static_cast<double>(j % n_h) * d_h;
      const double dy = yi - static_cast<double>(j / n_h) * d_v;
      const double dist = std::sqrt(dx * dx + dy * dy);
      const double val = sinc(2.0 * dist / wavelength);
      r(i, j) = val;
      r(j, i) = val;
    }
  }
  return r;
}

double path_loss_gain(double distance, double exponent, double element_area,
                      double penetration_db) {
  require(distance > 0.0, "path_loss_gain: distance must be positive");
  return element_area * std::pow(distance, -exponent) *
         std::pow(10.0, -penetration_db / 10.0);
}

CVec steering_vector(double angle, std::size_t q, double delta,
                     double wavelength) {
  require(q >= 1, "steering_vector: need at least one antenna");
  CVec a(q);
  const double w = 2.0 * kPi * delta / wavelength * std::sin(angle);
  for (std::size_t i = 0; i < q; ++i) {
    const double ang = w * static_cast<double>(i);
    a[i] = cplx(std::cos(ang), std::sin(ang));
  }
  return a;
}

Scenario build_scenario(const ScenarioSpec& spec) {
  Scenario s;
  s.m = spec.m;
  s.n_h = spec.n_h;
  s.n_v = spec.n_v;
  s.k_t = spec.k_t;
  s.k_r = spec.k_r;
  s.q = spec.q;
  s.pri = spec.pri;
  s.detection_angles = spec.detection_angles;
  s.rho = spec.rho;
  s.sigma_r2 = spec.sigma_r2;
  s.sigma_c2 = spec.sigma_c2;
  s.gamma_r = spec.gamma_r;
  s.p_max = spec.p_max;
  s.tau_c = spec.tau_c;
  s.se_prefactor = spec.se_prefactor;
  s.wavelength = spec.wavelength;
  s.delta_radar = spec.delta_radar > 0.0 ? spec.delta_radar
                                         : spec.wavelength / 2.0;
  s.d_h = spec.d_h > 0.0 ? spec.d_h : spec.wavelength / 4.0;
  s.d_v = spec.d_v > 0.0 ? spec.d_v : spec.wavelength / 4.0;
  s.beta_bs = spec.beta_bs;
  s.beta_br = spec.beta_br;
  s.beta_sr = spec.beta_sr;
  s.radar_region = spec.radar_region;

  require(s.m >= 1 && s.q >= 1, "scenario: antenna counts must be positive");
  require(s.k() >= 1, "scenario: need at least one UE");
  require(s.n() >= 1, "scenario: need at least one surface element");
  require(s.pri >= 1, "scenario: PRI must be at least 1");
  require(!s.detection_angles.empty(), "scenario: no detection directions");
  require(s.rho > 0.0 && s.sigma_r2 > 0.0 && s.sigma_c2 > 0.0,
          "scenario: powers and noise variances must be positive");
  require(s.gamma_r > 0.0, "scenario: gamma_r must be positive");
  require(s.p_max > 0.0, "scenario: p_max must be positive");
  require(s.wavelength > 0.0, "scenario: wavelength must be positive");
  require(s.tau_c > 0.0 && s.se_prefactor > 0.0,
          "scenario: tau_c and se_prefactor must be positive");

  const std::size_t k = s.k();
  s.alpha = spec.alpha.empty() ? std::vector<cplx>(s.z(), spec.alpha_all)
                               : spec.alpha;
  require(s.alpha.size() == s.z(), "scenario: alpha size != Z");
  s.beta_bk = spec.beta_bk.empty() ? RVec(k, 1.0) : spec.beta_bk;
  s.beta_sk = spec.beta_sk.empty() ? RVec(k, 1.0) : spec.beta_sk;
  s.beta_rk = spec.beta_rk.empty() ? RVec(k, 1.0) : spec.beta_rk;
  require(s.beta_bk.size() == k && s.beta_sk.size() == k &&
              s.beta_rk.size() == k,
          "scenario: per-UE path loss size != K");
  for (std::size_t i = 0; i < k; ++i)
    require(s.beta_bk[i] > 0.0 && s.beta_sk[i] > 0.0 && s.beta_rk[i] > 0.0 &&
                s.beta_bs > 0.0 && s.beta_br > 0.0 && s.beta_sr > 0.0,
            "scenario: path losses must be strictly positive");

  s.regions.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    s.regions[i] = i < s.k_t ? Region::t : Region::r;

  if (spec.identity_correlation) {
    s.r_bs = CMat::identity(s.m);
    s.r_ris = CMat::identity(s.n());
    s.r_r = CMat::identity(s.q);
  } else {
    s.r_bs = spec.r_bs_override.empty()
                 ? steering_correlation(
                       s.m, spec.bs_paths ? spec.bs_paths
                                          : std::max<std::size_t>(1, s.m / 2),
                       spec.omega)
                 : spec.r_bs_override;
    s.r_r = spec.r_r_override.empty()
                ? steering_correlation(
                      s.q, spec.radar_paths
                               ? spec.radar_paths
                               : std::max<std::size_t>(1, s.q / 2),
                      spec.omega)
                : spec.r_r_override;
    s.r_ris = spec.r_ris_override.empty()
                  ? ris_correlation(s.n_h, s.n_v, s.d_h, s.d_v, s.wavelength)
                  : spec.r_ris_override;
  }
  require(s.r_bs.rows() == s.m && s.r_bs.cols() == s.m,
          "scenario: r_bs has wrong shape");
  require(s.r_ris.rows() == s.n() && s.r_ris.cols() == s.n(),
          "scenario: r_ris has wrong shape");
  require(s.r_r.rows() == s.q && s.r_r.cols() == s.q,
          "scenario: r_r has wrong shape");

  s.r_bs_sqrt = checked_sqrt(s.r_bs, "r_bs");
  s.r_ris_sqrt = checked_sqrt(s.r_ris, "r_ris");
  s.r_r_sqrt = checked_sqrt(s.r_r, "r_r");

  const std::size_t n = s.n();
  s.ris_corr_sq.resize(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    const cplx v = s.r_ris.data()[i];
    // r_ris is real symmetric; |.|^2 also covers hermitian overrides
    s.ris_corr_sq[i] = std::norm(v);
  }

  s.steering.reserve(s.z());
  for (double ang : s.detection_angles)
    s.steering.push_back(
        steering_vector(ang, s.q, s.delta_radar, s.wavelength));
  return s;
}

void apply_deployment(ScenarioSpec& spec, const Deployment& dep) {
  spec.wavelength = kSpeedOfLight / dep.carrier_hz;
  spec.d_h = spec.d_h > 0.0 ? spec.d_h : spec.wavelength / 4.0;
  spec.d_v = spec.d_v > 0.0 ? spec.d_v : spec.wavelength / 4.0;
  spec.delta_radar =
      spec.delta_radar > 0.0 ? spec.delta_radar : spec.wavelength / 2.0;
  const double area = spec.d_h * spec.d_v;

  auto dist = [](double x0, double y0, double x1, double y1) {
    return std::hypot(x1 - x0, y1 - y0);
  };
  spec.beta_bs = path_loss_gain(dist(dep.bs_x, dep.bs_y, dep.ris_x, dep.ris_y),
                                dep.exp_surface, area, 0.0);
  spec.beta_br =
      path_loss_gain(dist(dep.bs_x, dep.bs_y, dep.radar_x, dep.radar_y),
                     dep.exp_surface, area, 0.0);
  spec.beta_sr =
      path_loss_gain(dist(dep.ris_x, dep.ris_y, dep.radar_x, dep.radar_y),
                     dep.exp_surface, area, 0.0);

  const std::size_t k = spec.k_t + spec.k_r;
  spec.beta_bk.assign(k, 0.0);
  spec.beta_sk.assign(k, 0.0);
  spec.beta_rk.assign(k, 0.0);

  // UE rows: region t behind the surface (y + offset), region r in front.
  // Both links that cross the surface plane pay the penetration loss.
  auto place = [&](std::size_t idx_in_region, std::size_t count, bool t_side,
                   double& ue_x, double& ue_y) {
    const double off = dep.ue_row_offset;
    ue_y = t_side ? dep.ris_y + off : dep.ris_y - off;
    if (count <= 1) {
      ue_x = dep.ris_x;
    } else {
      ue_x = dep.ris_x - off + 2.0 * off * static_cast<double>(idx_in_region) /
                                  static_cast<double>(count - 1);
    }
  };
  for (std::size_t ue = 0; ue < k; ++ue) {
    const bool t_side = ue < spec.k_t;
    double x = 0.0, y = 0.0;
    place(t_side ? ue : ue - spec.k_t, t_side ? spec.k_t : spec.k_r, t_side, x,
          y);
    const double pen_bs = t_side ? dep.penetration_db : 0.0;
    const double pen_radar = t_side ? 0.0 : dep.penetration_db;
    spec.beta_bk[ue] = path_loss_gain(dist(dep.bs_x, dep.bs_y, x, y),
                                      dep.exp_direct, area, pen_bs);
    spec.beta_sk[ue] = path_loss_gain(dist(dep.ris_x, dep.ris_y, x, y),
                                      dep.exp_surface, area, 0.0);
    spec.beta_rk[ue] = path_loss_gain(dist(dep.radar_x, dep.radar_y, x, y),
                                      dep.exp_direct, area, pen_radar);
  }
  spec.radar_region = dep.radar_y >= dep.ris_y ? Region::t : Region::r;
}

ScenarioSpec paper_default_spec() {
  ScenarioSpec spec;
  spec.m = 64;
  spec.n_h = 8;
  spec.n_v = 8;
  spec.k_t = 2;
  spec.k_r = 2;
  spec.q = 12;
  spec.pri = 10;
  spec.detection_angles.clear();
  for (int i = 0; i < 8; ++i)
    spec.detection_angles.push_back(-kPi / 3.0 + i * kPi / 12.0);
  spec.rho = 0.1;
  // -174 dBm/Hz noise floor over 200 kHz
  const double sigma2_dbm = -174.0 + 10.0 * std::log10(200e3);
  const double sigma2 = std::pow(10.0, sigma2_dbm / 10.0) * 1e-3;
  spec.sigma_r2 = sigma2;
  spec.sigma_c2 = sigma2;
  spec.alpha_all = std::sqrt(sigma2 * std::pow(10.0, -12.0 / 10.0));
  spec.gamma_r = 10.0;  // 10 dB
  spec.p_max = 10.0;
  spec.tau_c = 200.0;
  apply_deployment(spec, Deployment{});
  return spec;
}

ScenarioSpec desk_spec(std::size_t m, std::size_t n_h, std::size_t n_v,
                       std::size_t q) {
  ScenarioSpec spec = paper_default_spec();
  spec.m = m;
  spec.n_h = n_h;
  spec.n_v = n_v;
  spec.q = q;
  return spec;
}

namespace {

CMat sample_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  CMat z(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) z.data()[i] = rng.cnormal();
  return z;
}

CVec sample_gaussian_vec(std::size_t n, Rng& rng) {
  CVec z(n);
  for (auto& v : z) v = rng.cnormal();
  return z;
}

CMat color(const CMat& left, CMat z, const CMat& right, double gain) {
  CMat out = la::matmul(la::matmul(left, z), right);
  out *= std::sqrt(gain);
  return out;
}

CVec color_vec(const CMat& left, const CVec& z, double gain) {
  CVec out = la::matvec(left, z);
  const double g = std::sqrt(gain);
  for (auto& v : out) v *= g;
  return out;
}

}  // namespace

ChannelRealization sample_channels(const Scenario& scn, Rng& rng) {
  ChannelRealization ch;
  // Draw order is part of the determinism contract; do not reorder.
  ch.h_bs = color(scn.r_bs_sqrt, sample_gaussian(scn.m, scn.n(), rng),
                  scn.r_ris_sqrt, scn.beta_bs);
  ch.h_br = color(scn.r_bs_sqrt, sample_gaussian(scn.m, scn.q, rng),
                  scn.r_r_sqrt, scn.beta_br);
  ch.h_sr = color(scn.r_ris_sqrt, sample_gaussian(scn.n(), scn.q, rng),
                  scn.r_r_sqrt, scn.beta_sr);
  const std::size_t k = scn.k();
  ch.h_rk.reserve(k);
  ch.h_sk.reserve(k);
  ch.h_bk.reserve(k);
  for (std::size_t ue = 0; ue < k; ++ue) {
    ch.h_rk.push_back(
        color_vec(scn.r_r_sqrt, sample_gaussian_vec(scn.q, rng),
                  scn.beta_rk[ue]));
    ch.h_sk.push_back(
        color_vec(scn.r_ris_sqrt, sample_gaussian_vec(scn.n(), rng),
                  scn.beta_sk[ue]));
    ch.h_bk.push_back(
        color_vec(scn.r_bs_sqrt, sample_gaussian_vec(scn.m, rng),
                  scn.beta_bk[ue]));
  }
  return ch;
}

}  // namespace starcoex::model
