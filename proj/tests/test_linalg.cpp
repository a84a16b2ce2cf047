#include <doctest.h>

#include "starcoex/linalg.hpp"
#include "starcoex/rng.hpp"

using starcoex::Rng;
namespace la = starcoex::la;
using la::CMat;
using la::cplx;
using la::CVec;

namespace {

CMat random_hermitian(std::size_t n, Rng& rng) {
  CMat a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = rng.cnormal();
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

}  // namespace

TEST_CASE("eigh reconstructs a Hermitian matrix") {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 5u, 24u}) {
    const CMat a = random_hermitian(n, rng);
    const la::Eigh e = la::eigh(a);
    // ascending eigenvalues
    for (std::size_t i = 1; i < n; ++i) CHECK(e.w[i] >= e.w[i - 1]);
    // V unitary
    CMat vhv = la::matmul(la::adjoint(e.v), e.v);
    for (std::size_t i = 0; i < n; ++i) vhv(i, i) -= 1.0;
    CHECK(la::fro_norm(vhv) < 1e-12 * std::max(1.0, la::fro_norm(a)));
    // A = V diag(w) V^H
    CMat scaled = e.v;
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) scaled(r, c) *= e.w[c];
    CMat recon = la::matmul(scaled, la::adjoint(e.v));
    recon *= -1.0;
    recon += a;
    CHECK(la::fro_norm(recon) < 1e-11 * std::max(1.0, la::fro_norm(a)));
  }
}

TEST_CASE("herm_sqrt squares back to a PSD matrix and clips round-off") {
  Rng rng(13);
  const std::size_t n = 12;
  // rank-deficient PSD input
  CMat b(n, 4);
  for (std::size_t i = 0; i < n * 4; ++i) b.data()[i] = rng.cnormal();
  const CMat a = la::matmul(b, la::adjoint(b));
  const CMat s = la::herm_sqrt(a);
  CMat back = la::matmul(s, s);
  back *= -1.0;
  back += a;
  CHECK(la::fro_norm(back) < 1e-11 * la::fro_norm(a));
  CHECK(la::is_hermitian(s, 1e-11));
}

TEST_CASE("solve_hpd inverts against matmul") {
  Rng rng(19);
  const std::size_t n = 9;
  CMat b(n, n);
  for (std::size_t i = 0; i < n * n; ++i) b.data()[i] = rng.cnormal();
  CMat a = la::matmul(b, la::adjoint(b));
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
  CVec rhs(n);
  for (auto& v : rhs) v = rng.cnormal();
  const CVec x = la::solve_hpd(a, rhs);
  const CVec ax = la::matvec(a, x);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) err += std::norm(ax[i] - rhs[i]);
  CHECK(std::sqrt(err) < 1e-10 * la::norm(rhs));
}

TEST_CASE("trace_prod_herm equals the trace of the product") {
  Rng rng(29);
  const std::size_t n = 7;
  const CMat a = random_hermitian(n, rng);
  const CMat b = random_hermitian(n, rng);
  const cplx tr = la::trace(la::matmul(a, b));
  CHECK(tr.imag() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(la::trace_prod_herm(a, b) == doctest::Approx(tr.real()).epsilon(1e-12));
}

TEST_CASE("quad_form and bilinear agree with explicit sums") {
  Rng rng(31);
  const std::size_t n = 6;
  const CMat a = random_hermitian(n, rng);
  CVec x(n), y(n);
  for (auto& v : x) v = rng.cnormal();
  for (auto& v : y) v = rng.cnormal();
  cplx direct = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      direct += std::conj(x[i]) * a(i, j) * y[j];
  CHECK(std::abs(la::bilinear(x, a, y) - direct) < 1e-12);
  cplx qf = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      qf += std::conj(x[i]) * a(i, j) * x[j];
  CHECK(la::quad_form(x, a) == doctest::Approx(qf.real()).epsilon(1e-12));
}

TEST_CASE("adjoint_matvec matches adjoint then matvec") {
  Rng rng(37);
  CMat a(5, 3);
  for (std::size_t i = 0; i < 15; ++i) a.data()[i] = rng.cnormal();
  CVec x(5);
  for (auto& v : x) v = rng.cnormal();
  const CVec got = la::adjoint_matvec(a, x);
  const CVec want = la::matvec(la::adjoint(a), x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-13);
}
