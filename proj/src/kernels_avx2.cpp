#include "starcoex/kernels.hpp"

#if STARCOEX_HAVE_AVX2_BUILD

#include <immintrin.h>

// AVX2+FMA variants. A __m256d holds two interleaved complex doubles
// [x0.re, x0.im, x1.re, x1.im]. This TU is compiled with -mavx2 -mfma and is
// only reached through the runtime dispatch in kernels.cpp.
namespace starcoex::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// lane signs [-, +, -, +] and [+, -, +, -]
inline __m256d neg_even(__m256d v) {
  return _mm256_xor_pd(v, _mm256_setr_pd(-0.0, 0.0, -0.0, 0.0));
}
inline __m256d neg_odd(__m256d v) {
  return _mm256_xor_pd(v, _mm256_setr_pd(0.0, -0.0, 0.0, -0.0));
}

// [re, im] -> [im, re] per complex
inline __m256d swap_ri(__m256d v) { return _mm256_permute_pd(v, 0x5); }

}  // namespace

cplx cdotc(const cplx* x, const cplx* y, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  __m256d re0 = _mm256_setzero_pd(), re1 = _mm256_setzero_pd();
  __m256d im0 = _mm256_setzero_pd(), im1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xa = _mm256_loadu_pd(xs + 2 * i);
    __m256d ya = _mm256_loadu_pd(ys + 2 * i);
    __m256d xb = _mm256_loadu_pd(xs + 2 * i + 4);
    __m256d yb = _mm256_loadu_pd(ys + 2 * i + 4);
    re0 = _mm256_fmadd_pd(xa, ya, re0);
    re1 = _mm256_fmadd_pd(xb, yb, re1);
    im0 = _mm256_fmadd_pd(neg_even(swap_ri(xa)), ya, im0);
    im1 = _mm256_fmadd_pd(neg_even(swap_ri(xb)), yb, im1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d xa = _mm256_loadu_pd(xs + 2 * i);
    __m256d ya = _mm256_loadu_pd(ys + 2 * i);
    re0 = _mm256_fmadd_pd(xa, ya, re0);
    im0 = _mm256_fmadd_pd(neg_even(swap_ri(xa)), ya, im0);
  }
  double re = hsum(_mm256_add_pd(re0, re1));
  double im = hsum(_mm256_add_pd(im0, im1));
  for (; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

cplx cdotu(const cplx* x, const cplx* y, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  __m256d re0 = _mm256_setzero_pd(), im0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xa = _mm256_loadu_pd(xs + 2 * i);
    __m256d ya = _mm256_loadu_pd(ys + 2 * i);
    re0 = _mm256_fmadd_pd(neg_odd(xa), ya, re0);
    im0 = _mm256_fmadd_pd(swap_ri(xa), ya, im0);
  }
  double re = hsum(re0);
  double im = hsum(im0);
  for (; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

void caxpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  const __m256d arv = _mm256_set1_pd(ar);
  const __m256d aiv = _mm256_setr_pd(-ai, ai, -ai, ai);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xa = _mm256_loadu_pd(xs + 2 * i);
    __m256d xb = _mm256_loadu_pd(xs + 2 * i + 4);
    __m256d ya = _mm256_loadu_pd(ys + 2 * i);
    __m256d yb = _mm256_loadu_pd(ys + 2 * i + 4);
    ya = _mm256_fmadd_pd(arv, xa, ya);
    yb = _mm256_fmadd_pd(arv, xb, yb);
    ya = _mm256_fmadd_pd(aiv, swap_ri(xa), ya);
    yb = _mm256_fmadd_pd(aiv, swap_ri(xb), yb);
    _mm256_storeu_pd(ys + 2 * i, ya);
    _mm256_storeu_pd(ys + 2 * i + 4, yb);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d xa = _mm256_loadu_pd(xs + 2 * i);
    __m256d ya = _mm256_loadu_pd(ys + 2 * i);
    ya = _mm256_fmadd_pd(arv, xa, ya);
    ya = _mm256_fmadd_pd(aiv, swap_ri(xa), ya);
    _mm256_storeu_pd(ys + 2 * i, ya);
  }
  for (; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += ar * xr - ai * xi;
    ys[2 * i + 1] += ar * xi + ai * xr;
  }
}

double sumsq(const cplx* x, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t m = 2 * n;
  for (; i + 8 <= m; i += 8) {
    __m256d a = _mm256_loadu_pd(xs + i);
    __m256d b = _mm256_loadu_pd(xs + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) acc += xs[i] * xs[i];
  return acc;
}

void real_matvec(const double* s, const cplx* phi, cplx* out, std::size_t rows,
                 std::size_t cols) {
  const double* ps = reinterpret_cast<const double*>(phi);
  double* po = reinterpret_cast<double*>(out);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = s + r * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2) {
      // [s0, s1] -> [s0, s0, s1, s1]
      __m256d sv = _mm256_permute4x64_pd(
          _mm256_castpd128_pd256(_mm_loadu_pd(row + c)), 0x50);
      acc = _mm256_fmadd_pd(sv, _mm256_loadu_pd(ps + 2 * c), acc);
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d ri = _mm_add_pd(lo, hi);  // [re, im]
    double re = _mm_cvtsd_f64(ri);
    double im = _mm_cvtsd_f64(_mm_unpackhi_pd(ri, ri));
    for (; c < cols; ++c) {
      re += row[c] * ps[2 * c];
      im += row[c] * ps[2 * c + 1];
    }
    po[2 * r] = re;
    po[2 * r + 1] = im;
  }
}

void matmul_acc(const cplx* a, const cplx* b, cplx* c, std::size_t m,
                std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      caxpy(a[i * k + p], b + p * n, c + i * n, n);
    }
  }
}

}  // namespace starcoex::kern::avx2

#endif  // STARCOEX_HAVE_AVX2_BUILD
