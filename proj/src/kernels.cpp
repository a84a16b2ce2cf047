#include "starcoex/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace starcoex::kern {

namespace scalar {

// Component-wise arithmetic on purpose: std::complex operator* goes through
// the NaN-checked libcall on gcc, which is slow and does not match the
// vectorized variants.

cplx cdotc(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    const double yr = ys[2 * i], yi = ys[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

cplx cdotu(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += ar * xr - ai * xi;
    ys[2 * i + 1] += ar * xi + ai * xr;
  }
}

double sumsq(const cplx* x, std::size_t n) {
  double acc = 0.0;
  const double* xs = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < 2 * n; ++i) acc += xs[i] * xs[i];
  return acc;
}

void real_matvec(const double* s, const cplx* phi, cplx* out, std::size_t rows,
                 std::size_t cols) {
  const double* ps = reinterpret_cast<const double*>(phi);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = s + r * cols;
    double re = 0.0, im = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      re += row[c] * ps[2 * c];
      im += row[c] * ps[2 * c + 1];
    }
    out[r] = {re, im};
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

}  // namespace scalar

namespace {

struct Dispatch {
  cplx (*cdotc)(const cplx*, const cplx*, std::size_t);
  cplx (*cdotu)(const cplx*, const cplx*, std::size_t);
  void (*caxpy)(cplx, const cplx*, cplx*, std::size_t);
  double (*sumsq)(const cplx*, std::size_t);
  void (*real_matvec)(const double*, const cplx*, cplx*, std::size_t,
                      std::size_t);
  void (*matmul_acc)(const cplx*, const cplx*, cplx*, std::size_t, std::size_t,
                     std::size_t);
};

constexpr Dispatch kScalar = {scalar::cdotc, scalar::cdotu, scalar::caxpy,
                              scalar::sumsq, scalar::real_matvec,
                              scalar::matmul_acc};

#if STARCOEX_HAVE_AVX2_BUILD
constexpr Dispatch kAvx2 = {avx2::cdotc, avx2::cdotu, avx2::caxpy, avx2::sumsq,
                            avx2::real_matvec, avx2::matmul_acc};
#endif

bool avx2_available() {
#if STARCOEX_HAVE_AVX2_BUILD
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa pick_default() {
  if (const char* env = std::getenv("STARCOEX_FORCE_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

Isa g_isa = pick_default();
const Dispatch* g_table = nullptr;

const Dispatch* table_for(Isa isa) {
#if STARCOEX_HAVE_AVX2_BUILD
  if (isa == Isa::avx2) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

const Dispatch& table() {
  if (!g_table) g_table = table_for(g_isa);
  return *g_table;
}

}  // namespace

Isa active_isa() { return g_isa; }

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) return false;
  g_isa = isa;
  g_table = table_for(isa);
  return true;
}

cplx cdotc(const cplx* x, const cplx* y, std::size_t n) {
  return table().cdotc(x, y, n);
}
cplx cdotu(const cplx* x, const cplx* y, std::size_t n) {
  return table().cdotu(x, y, n);
}
void caxpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  table().caxpy(a, x, y, n);
}
double sumsq(const cplx* x, std::size_t n) { return table().sumsq(x, n); }
void real_matvec(const double* s, const cplx* phi, cplx* out, std::size_t rows,
                 std::size_t cols) {
  table().real_matvec(s, phi, out, rows, cols);
}
void matmul_acc(const cplx* a, const cplx* b, cplx* c, std::size_t m,
                std::size_t k, std::size_t n) {
  table().matmul_acc(a, b, c, m, k, n);
}

}  // namespace starcoex::kern
