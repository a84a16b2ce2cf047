#include "starcoex/star_ris.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace starcoex::star {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.7071067811865476;
}  // namespace

bool PassiveBeamformer::disabled() const {
  for (std::size_t i = 0; i < n(); ++i)
    if (beta_t[i] != 0.0 || beta_r[i] != 0.0) return false;
  return n() > 0;
}

CVec PassiveBeamformer::coeffs(Region w) const {
  const CVec& th = w == Region::t ? theta_t : theta_r;
  const RVec& be = w == Region::t ? beta_t : beta_r;
  CVec out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = be[i] * th[i];
  return out;
}

PassiveBeamformer PassiveBeamformer::even_split(std::size_t n) {
  PassiveBeamformer pb;
  pb.theta_t.assign(n, 1.0);
  pb.theta_r.assign(n, 1.0);
  pb.beta_t.assign(n, kInvSqrt2);
  pb.beta_r.assign(n, kInvSqrt2);
  return pb;
}

PassiveBeamformer PassiveBeamformer::no_ris(std::size_t n) {
  PassiveBeamformer pb;
  pb.theta_t.assign(n, 1.0);
  pb.theta_r.assign(n, 1.0);
  pb.beta_t.assign(n, 0.0);
  pb.beta_r.assign(n, 0.0);
  return pb;
}

void validate(const PassiveBeamformer& pb) {
  const std::size_t n = pb.n();
  if (pb.theta_t.size() != n || pb.theta_r.size() != n ||
      pb.beta_r.size() != n)
    throw std::invalid_argument("beamformer: mismatched array sizes");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(std::abs(pb.theta_t[i]) - 1.0) > 1e-9 ||
        std::abs(std::abs(pb.theta_r[i]) - 1.0) > 1e-9)
      throw std::invalid_argument("beamformer: phase off the unit circle");
  }
  if (pb.disabled()) return;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = pb.beta_t[i] * pb.beta_t[i] + pb.beta_r[i] * pb.beta_r[i];
    if (std::abs(e - 1.0) > 1e-9)
      throw std::invalid_argument("beamformer: energy conservation violated");
    if (pb.protocol == Protocol::ms) {
      const double bt = pb.beta_t[i];
      if (!(bt == 0.0 || bt == 1.0))
        throw std::invalid_argument("beamformer: MS amplitudes must be 0/1");
    }
  }
}

CMat pb_matrix(const PassiveBeamformer& pb, Region w) {
  return CMat::diag(pb.coeffs(w));
}

CVec project_theta(CVec v) {
  for (auto& x : v) {
    const double m = std::abs(x);
    x = m > 0.0 ? x / m : cplx(1.0, 0.0);
  }
  return v;
}

RVec project_beta(RVec v) {
  const std::size_t n = v.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = v[i], b = v[i + n];
    const double m = std::sqrt(a * a + b * b);
    if (m > 0.0) {
      v[i] = a / m;
      v[i + n] = b / m;
    } else {
      v[i] = kInvSqrt2;
      v[i + n] = kInvSqrt2;
    }
  }
  return v;
}

PassiveBeamformer canonicalize(PassiveBeamformer pb) {
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.beta_t[i] < 0.0) {
      pb.beta_t[i] = -pb.beta_t[i];
      pb.theta_t[i] = -pb.theta_t[i];
    }
    if (pb.beta_r[i] < 0.0) {
      pb.beta_r[i] = -pb.beta_r[i];
      pb.theta_r[i] = -pb.theta_r[i];
    }
  }
  return pb;
}

namespace {

cplx quantize_one(cplx theta, unsigned bits) {
  const double step = 2.0 * kPi / static_cast<double>(1u << bits);
  double ang = std::arg(theta);
  if (ang < 0.0) ang += 2.0 * kPi;
  // nearest grid point with wraparound
  long idx = std::lround(ang / step);
  idx %= static_cast<long>(1u << bits);
  const double snapped = static_cast<double>(idx) * step;
  return {std::cos(snapped), std::sin(snapped)};
}

}  // namespace

PassiveBeamformer quantize_phases(PassiveBeamformer pb, unsigned bits) {
  if (bits == 0) throw std::invalid_argument("quantize_phases: bits >= 1");
  for (auto& t : pb.theta_t) t = quantize_one(t, bits);
  for (auto& t : pb.theta_r) t = quantize_one(t, bits);
  return pb;
}

PassiveBeamformer ms_round(PassiveBeamformer pb) {
  for (std::size_t i = 0; i < pb.n(); ++i) {
    // beta_t^2 >= 1/2 with the tie toward t; comparing the pair avoids the
    // round-off of squaring 1/sqrt(2)
    const bool to_t = std::abs(pb.beta_t[i]) >= std::abs(pb.beta_r[i]);
    pb.beta_t[i] = to_t ? 1.0 : 0.0;
    pb.beta_r[i] = to_t ? 0.0 : 1.0;
  }
  pb.protocol = Protocol::ms;
  return pb;
}

PassiveBeamformer random_phases(std::size_t n, Rng& rng) {
  PassiveBeamformer pb = PassiveBeamformer::even_split(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double at = rng.uniform(0.0, 2.0 * kPi);
    const double ar = rng.uniform(0.0, 2.0 * kPi);
    pb.theta_t[i] = {std::cos(at), std::sin(at)};
    pb.theta_r[i] = {std::cos(ar), std::sin(ar)};
  }
  return pb;
}

PassiveBeamformer fixed_partition(std::size_t n, std::size_t n_t) {
  if (n_t > n) throw std::invalid_argument("fixed_partition: n_t > n");
  PassiveBeamformer pb;
  pb.theta_t.assign(n, 1.0);
  pb.theta_r.assign(n, 1.0);
  pb.beta_t.assign(n, 0.0);
  pb.beta_r.assign(n, 1.0);
  for (std::size_t i = 0; i < n_t; ++i) {
    pb.beta_t[i] = 1.0;
    pb.beta_r[i] = 0.0;
  }
  pb.protocol = Protocol::ms;
  return pb;
}

CVec stack_theta(const PassiveBeamformer& pb) {
  CVec v(2 * pb.n());
  for (std::size_t i = 0; i < pb.n(); ++i) {
    v[i] = pb.theta_t[i];
    v[i + pb.n()] = pb.theta_r[i];
  }
  return v;
}

RVec stack_beta(const PassiveBeamformer& pb) {
  RVec v(2 * pb.n());
  for (std::size_t i = 0; i < pb.n(); ++i) {
    v[i] = pb.beta_t[i];
    v[i + pb.n()] = pb.beta_r[i];
  }
  return v;
}

void unstack_theta(const CVec& v, PassiveBeamformer& pb) {
  const std::size_t n = v.size() / 2;
  pb.theta_t.assign(v.begin(), v.begin() + n);
  pb.theta_r.assign(v.begin() + n, v.end());
}

void unstack_beta(const RVec& v, PassiveBeamformer& pb) {
  const std::size_t n = v.size() / 2;
  pb.beta_t.assign(v.begin(), v.begin() + n);
  pb.beta_r.assign(v.begin() + n, v.end());
}

void save(const PassiveBeamformer& pb, std::ostream& os) {
  os << "starcoex-pb 1\n";
  os << pb.n() << ' ' << (pb.protocol == Protocol::es ? "es" : "ms") << '\n';
  os << std::setprecision(17);
  auto dump = [&](const char* tag, auto getter) {
    os << tag;
    for (std::size_t i = 0; i < pb.n(); ++i) os << ' ' << getter(i);
    os << '\n';
  };
  dump("phase_t", [&](std::size_t i) { return std::arg(pb.theta_t[i]); });
  dump("phase_r", [&](std::size_t i) { return std::arg(pb.theta_r[i]); });
  dump("beta_t", [&](std::size_t i) { return pb.beta_t[i]; });
  dump("beta_r", [&](std::size_t i) { return pb.beta_r[i]; });
}

PassiveBeamformer load(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "starcoex-pb" || version != 1)
    throw std::runtime_error("beamformer: unrecognized file header");
  std::size_t n = 0;
  std::string proto;
  is >> n >> proto;
  PassiveBeamformer pb;
  pb.protocol = proto == "ms" ? Protocol::ms : Protocol::es;
  pb.theta_t.resize(n);
  pb.theta_r.resize(n);
  pb.beta_t.resize(n);
  pb.beta_r.resize(n);
  auto read_into = [&](const char* tag, auto setter) {
    std::string got;
    is >> got;
    if (got != tag) throw std::runtime_error("beamformer: expected " +
                                             std::string(tag) + " section");
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      if (!(is >> v)) throw std::runtime_error("beamformer: truncated file");
      setter(i, v);
    }
  };
  read_into("phase_t", [&](std::size_t i, double v) {
    pb.theta_t[i] = {std::cos(v), std::sin(v)};
  });
  read_into("phase_r", [&](std::size_t i, double v) {
    pb.theta_r[i] = {std::cos(v), std::sin(v)};
  });
  read_into("beta_t", [&](std::size_t i, double v) { pb.beta_t[i] = v; });
  read_into("beta_r", [&](std::size_t i, double v) { pb.beta_r[i] = v; });
  return pb;
}

void save_file(const PassiveBeamformer& pb, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  save(pb, os);
}

PassiveBeamformer load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load(is);
}

}  // namespace starcoex::star
