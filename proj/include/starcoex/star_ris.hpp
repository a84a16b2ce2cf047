#pragma once

#include <iosfwd>
#include <string>

#include "starcoex/linalg.hpp"
#include "starcoex/model.hpp"
#include "starcoex/rng.hpp"

// Surface state and its feasible sets: unit-modulus phases per region and
// amplitude pairs on the unit circle (energy conservation).
namespace starcoex::star {

using la::CMat;
using la::cplx;
using la::CVec;
using la::RVec;
using model::Region;

enum class Protocol : std::uint8_t { es, ms };

// theta_*: unit-modulus phase coefficients. beta_*: amplitudes, with
// beta_t[i]^2 + beta_r[i]^2 = 1 per element. During optimization amplitudes
// may go negative (sign flips absorbed into phases on canonicalize); the
// all-zero amplitude state is the explicit no-surface configuration.
struct PassiveBeamformer {
  CVec theta_t, theta_r;
  RVec beta_t, beta_r;
  Protocol protocol = Protocol::es;

  std::size_t n() const { return beta_t.size(); }
  bool disabled() const;

  // phase/amplitude products beta_n * theta_n for one region
  CVec coeffs(Region w) const;

  // all elements transparent toward one region is rarely meaningful; the
  // default start is an even split with flat phases
  static PassiveBeamformer even_split(std::size_t n);
  static PassiveBeamformer no_ris(std::size_t n);
};

// Throws std::invalid_argument when sizes mismatch, a phase is off the unit
// circle, or an amplitude pair is off the unit circle (tolerance 1e-9);
// the no_ris state is accepted as-is.
void validate(const PassiveBeamformer& pb);

// diag(beta_n^w * theta_n^w)
CMat pb_matrix(const PassiveBeamformer& pb, Region w);

// Entrywise v / |v|. Zero entries map to 1. Idempotent.
CVec project_theta(CVec v);

// Pairs (v_i, v_{i+n}) scaled onto the unit circle. The (0,0) pair maps to
// (1/sqrt2, 1/sqrt2). Idempotent.
RVec project_beta(RVec v);

// Flips negative amplitudes and the paired phases; the products beta*theta
// (and every metric built from them) are unchanged.
PassiveBeamformer canonicalize(PassiveBeamformer pb);

// Snaps each phase to the nearest point of {0, dt, ..., (2^bits - 1) dt},
// dt = 2 pi / 2^bits, with wraparound distance. Amplitudes untouched.
PassiveBeamformer quantize_phases(PassiveBeamformer pb, unsigned bits);

// Rounds amplitudes to the mode-switching set: beta_t -> 1 when
// beta_t^2 >= 1/2 (ties toward t), else 0; beta_r set to match.
PassiveBeamformer ms_round(PassiveBeamformer pb);

// Uniform phases over [0, 2 pi), amplitudes 1/sqrt2 everywhere.
PassiveBeamformer random_phases(std::size_t n, Rng& rng);

// Mode-switching point with the first n_t elements transmitting and the rest
// reflecting; flat phases.
PassiveBeamformer fixed_partition(std::size_t n, std::size_t n_t);

// [theta_t; theta_r] and [beta_t; beta_r] stacking used by the optimizer.
CVec stack_theta(const PassiveBeamformer& pb);
RVec stack_beta(const PassiveBeamformer& pb);
void unstack_theta(const CVec& v, PassiveBeamformer& pb);
void unstack_beta(const RVec& v, PassiveBeamformer& pb);

// Plain-text serialization (phases as angles plus amplitude arrays).
void save(const PassiveBeamformer& pb, std::ostream& os);
PassiveBeamformer load(std::istream& is);
void save_file(const PassiveBeamformer& pb, const std::string& path);
PassiveBeamformer load_file(const std::string& path);

}  // namespace starcoex::star
