#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starcoex/linalg.hpp"
#include "starcoex/rng.hpp"

// System model: geometry, correlated-fading statistics and channel sampling
// for a multi-user downlink sharing spectrum with a pulsed radar through a
// transmitting/reflecting surface.
namespace starcoex::model {

using la::CMat;
using la::cplx;
using la::CVec;
using la::RVec;

enum class Region : std::uint8_t { t, r };

inline char region_char(Region w) { return w == Region::t ? 't' : 'r'; }

// R = A A^H with steering columns a(phi_p), phi_p = -pi/2 + (p-1)pi/P,
// a(phi)_d = (1/sqrt(P)) e^{-j 2 pi omega (d-1) sin(phi)}. tr(R) = dim.
CMat steering_correlation(std::size_t dim, std::size_t paths, double omega);

// Planar-array correlation: entry (l, m) = sinc(2 ||u_l - u_m|| / lambda)
// with normalized sinc; elements on an n_h x n_v grid with spacings d_h, d_v.
CMat ris_correlation(std::size_t n_h, std::size_t n_v, double d_h, double d_v,
                     double wavelength);

// element_area * distance^-exponent * 10^(-penetration_db/10)
double path_loss_gain(double distance, double exponent, double element_area,
                      double penetration_db);

// ULA response: a(angle)_q = e^{j 2 pi (delta/lambda) (q-1) sin(angle)}
CVec steering_vector(double angle, std::size_t q, double delta,
                     double wavelength);

// Everything static about one experiment: dimensions, powers, statistics.
// Immutable after build_scenario(); safe to share across threads.
struct Scenario {
  // dimensions
  std::size_t m = 0;        // BS antennas
  std::size_t n_h = 0, n_v = 0;
  std::size_t k_t = 0, k_r = 0;
  std::size_t q = 0;        // radar antennas
  std::size_t pri = 0;      // detection window length L
  std::vector<double> detection_angles;  // size Z

  // powers and thresholds
  double rho = 0.0;          // BS power budget (W)
  double sigma_r2 = 0.0, sigma_c2 = 0.0;
  std::vector<cplx> alpha;   // echo coefficient per direction
  double gamma_r = 0.0;      // radar SINR threshold, linear
  double p_max = 0.0;        // radar power budget (W)
  double tau_c = 1.0;
  double se_prefactor = 1.0;

  // geometry-derived constants
  double wavelength = 0.0, delta_radar = 0.0, d_h = 0.0, d_v = 0.0;

  // link gains (linear)
  double beta_bs = 0.0, beta_br = 0.0, beta_sr = 0.0;
  std::vector<double> beta_bk, beta_sk, beta_rk;  // per UE
  std::vector<Region> regions;                    // per UE
  Region radar_region = Region::t;

  // correlation statistics
  CMat r_bs, r_ris, r_r;

  // precomputed at build time
  CMat r_bs_sqrt, r_ris_sqrt, r_r_sqrt;
  RVec ris_corr_sq;             // (r_ris o r_ris), row-major n x n, real
  std::vector<CVec> steering;   // radar steering per detection direction

  std::size_t n() const { return n_h * n_v; }
  std::size_t k() const { return k_t + k_r; }
  std::size_t z() const { return detection_angles.size(); }
  Region region_of(std::size_t ue) const { return regions[ue]; }
  double beta_bsk(std::size_t ue) const { return beta_bs * beta_sk[ue]; }
  double beta_rsk(std::size_t ue) const { return beta_sr * beta_sk[ue]; }
  double beta_bsr() const { return beta_bs * beta_sr; }
};

// Raw inputs for build_scenario. Correlation matrices may be supplied
// directly; otherwise they come from the steering/sinc models above.
struct ScenarioSpec {
  std::size_t m = 16;
  std::size_t n_h = 4, n_v = 4;
  std::size_t k_t = 2, k_r = 2;
  std::size_t q = 4;
  std::size_t pri = 10;
  std::vector<double> detection_angles = {-0.5, 0.0, 0.5};

  double rho = 0.1;
  double sigma_r2 = 1e-3, sigma_c2 = 1e-3;
  std::vector<cplx> alpha;       // empty: filled with alpha_all
  cplx alpha_all = 1.0;
  double gamma_r = 10.0;
  double p_max = 10.0;
  double tau_c = 200.0;
  double se_prefactor = 1.0;

  double wavelength = 0.05;
  double delta_radar = 0.0;      // 0: defaults to wavelength/2
  double d_h = 0.0, d_v = 0.0;   // 0: defaults to wavelength/4

  double beta_bs = 1.0, beta_br = 1.0, beta_sr = 1.0;
  std::vector<double> beta_bk, beta_sk, beta_rk;  // empty: all ones
  Region radar_region = Region::t;

  // correlation controls
  std::size_t bs_paths = 0;      // 0: m/2 (at least 1)
  std::size_t radar_paths = 0;   // 0: q/2 (at least 1)
  double omega = 0.3;
  bool identity_correlation = false;  // white channels (testing)
  CMat r_bs_override, r_ris_override, r_r_override;
};

// Validates the spec, builds correlation matrices, their square roots and
// cached steering vectors. Throws std::invalid_argument on bad input.
Scenario build_scenario(const ScenarioSpec& spec);

// Section V-style deployment: BS/surface/radar coordinates and two UE rows,
// path losses from distances. Everything overridable before build.
struct Deployment {
  double bs_x = 0.0, bs_y = 0.0;
  double ris_x = 50.0, ris_y = 10.0;
  double radar_x = 30.0, radar_y = 20.0;
  double ue_row_offset = 10.0;   // d0/2
  double exp_direct = 2.8;       // BS-UE and radar-UE exponents
  double exp_surface = 2.2;      // every surface/radar adjacent link
  double penetration_db = 15.0;  // extra loss on direct links into region t
  double carrier_hz = 6e9;
};

// Fills the spec's geometry-derived fields (wavelength, spacings, link gains,
// regions) from a deployment; dimension/power fields must already be set.
void apply_deployment(ScenarioSpec& spec, const Deployment& dep);

// Default experiment setup matching the numerical section: M = N = 64, K = 4,
// Q = 12, 8 directions in [-pi/3, pi/4], rho = 0.1 W, 200 kHz noise floor,
// gamma_r = 10 dB, P_max = 10 W, echo power 12 dB below noise.
ScenarioSpec paper_default_spec();

// Smaller variant of the same deployment for quick runs and tests.
ScenarioSpec desk_spec(std::size_t m = 32, std::size_t n_h = 4,
                       std::size_t n_v = 8, std::size_t q = 8);

// One draw of every small-scale fading block, colored per the Kronecker
// model, e.g. h_bs = sqrt(beta_bs) r_bs^{1/2} Z r_ris^{1/2}.
struct ChannelRealization {
  CMat h_bs;               // M x N
  CMat h_br;               // M x Q
  CMat h_sr;               // N x Q
  std::vector<CVec> h_rk;  // per UE, Q
  std::vector<CVec> h_sk;  // per UE, N
  std::vector<CVec> h_bk;  // per UE, M
};

ChannelRealization sample_channels(const Scenario& scn, Rng& rng);

}  // namespace starcoex::model
