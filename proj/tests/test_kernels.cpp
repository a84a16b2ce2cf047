#include <doctest.h>

#include <vector>

#include "starcoex/kernels.hpp"
#include "starcoex/rng.hpp"

using starcoex::Rng;
using starcoex::kern::cplx;
namespace kern = starcoex::kern;

namespace {

std::vector<cplx> random_vec(std::size_t n, Rng& rng) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = rng.cnormal();
  return v;
}

std::vector<double> random_real(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

bool close(cplx a, cplx b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

TEST_CASE("scalar kernels match direct formulas") {
  Rng rng(7);
  const auto x = random_vec(5, rng);
  const auto y = random_vec(5, rng);
  cplx dc = 0.0, du = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    dc += std::conj(x[i]) * y[i];
    du += x[i] * y[i];
  }
  CHECK(close(kern::scalar::cdotc(x.data(), y.data(), 5), dc, 1e-14));
  CHECK(close(kern::scalar::cdotu(x.data(), y.data(), 5), du, 1e-14));

  auto z = y;
  const cplx a{0.3, -1.2};
  kern::scalar::caxpy(a, x.data(), z.data(), 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(close(z[i], y[i] + a * x[i], 1e-14));

  double ss = 0.0;
  for (const auto& v : x) ss += std::norm(v);
  CHECK(kern::scalar::sumsq(x.data(), 5) == doctest::Approx(ss).epsilon(1e-14));
}

#if STARCOEX_HAVE_AVX2_BUILD
TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kern::force_isa(kern::Isa::avx2)) {
    MESSAGE("avx2 unavailable on this machine; skipping");
    return;
  }
  Rng rng(17);
  // odd lengths exercise the tail loops
  for (std::size_t n : {1u, 2u, 3u, 7u, 8u, 64u, 129u, 1000u}) {
    const auto x = random_vec(n, rng);
    const auto y = random_vec(n, rng);
    CHECK(close(kern::avx2::cdotc(x.data(), y.data(), n),
                kern::scalar::cdotc(x.data(), y.data(), n), 1e-13));
    CHECK(close(kern::avx2::cdotu(x.data(), y.data(), n),
                kern::scalar::cdotu(x.data(), y.data(), n), 1e-13));
    CHECK(kern::avx2::sumsq(x.data(), n) ==
          doctest::Approx(kern::scalar::sumsq(x.data(), n)).epsilon(1e-13));

    auto za = y, zs = y;
    const cplx a{-0.7, 0.4};
    kern::avx2::caxpy(a, x.data(), za.data(), n);
    kern::scalar::caxpy(a, x.data(), zs.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(za[i], zs[i], 1e-13));
  }
}

TEST_CASE("avx2 real_matvec and matmul agree with scalar") {
  REQUIRE(kern::force_isa(kern::Isa::avx2));
  Rng rng(23);
  for (std::size_t n : {1u, 3u, 8u, 33u}) {
    const auto s = random_real(n * n, rng);
    const auto phi = random_vec(n, rng);
    std::vector<cplx> oa(n), os(n);
    kern::avx2::real_matvec(s.data(), phi.data(), oa.data(), n, n);
    kern::scalar::real_matvec(s.data(), phi.data(), os.data(), n, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(oa[i], os[i], 1e-13));
  }
  const std::size_t m = 5, k = 7, n = 6;
  const auto a = random_vec(m * k, rng);
  const auto b = random_vec(k * n, rng);
  std::vector<cplx> ca(m * n), cs(m * n);
  kern::avx2::matmul_acc(a.data(), b.data(), ca.data(), m, k, n);
  kern::scalar::matmul_acc(a.data(), b.data(), cs.data(), m, k, n);
  for (std::size_t i = 0; i < m * n; ++i) CHECK(close(ca[i], cs[i], 1e-13));
}
#endif

TEST_CASE("dispatch can be forced to scalar and back") {
  const kern::Isa original = kern::active_isa();
  CHECK(kern::force_isa(kern::Isa::scalar));
  CHECK(kern::active_isa() == kern::Isa::scalar);
  Rng rng(5);
  const auto x = random_vec(16, rng);
  const double s = kern::sumsq(x.data(), 16);
  CHECK(s == doctest::Approx(kern::scalar::sumsq(x.data(), 16)));
  kern::force_isa(original);
}
