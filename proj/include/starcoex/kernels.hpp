#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Data-parallel complex/real primitives used by the linear-algebra layer and
// the Monte-Carlo loops. Every entry point dispatches at runtime to the best
// available instruction set (scalar everywhere, AVX2+FMA on x86-64). The
// per-ISA variants live in their own namespaces so equivalence tests can call
// them side by side.
namespace starcoex::kern {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

// ISA selected at startup (honors the STARCOEX_FORCE_ISA env var).
Isa active_isa();
std::string_view isa_name(Isa isa);
// Switches the dispatch table; returns false if the ISA is not available on
// this machine. Intended for tests and benchmarking.
bool force_isa(Isa isa);

// sum conj(x[i]) * y[i]
cplx cdotc(const cplx* x, const cplx* y, std::size_t n);
// sum x[i] * y[i]
cplx cdotu(const cplx* x, const cplx* y, std::size_t n);
// y[i] += a * x[i]
void caxpy(cplx a, const cplx* x, cplx* y, std::size_t n);
// sum |x[i]|^2
double sumsq(const cplx* x, std::size_t n);
// out[r] = sum_c s[r*cols+c] * phi[c]   (real matrix, complex vector)
void real_matvec(const double* s, const cplx* phi, cplx* out, std::size_t rows,
                 std::size_t cols);
// c += a * b, row-major, a is m x k, b is k x n, c is m x n
void matmul_acc(const cplx* a, const cplx* b, cplx* c, std::size_t m,
                std::size_t k, std::size_t n);

namespace scalar {
cplx cdotc(const cplx* x, const cplx* y, std::size_t n);
cplx cdotu(const cplx* x, const cplx* y, std::size_t n);
void caxpy(cplx a, const cplx* x, cplx* y, std::size_t n);
double sumsq(const cplx* x, std::size_t n);
void real_matvec(const double* s, const cplx* phi, cplx* out, std::size_t rows,
                 std::size_t cols);
void matmul_acc(const cplx* a, const cplx* b, cplx* c, std::size_t m,
                std::size_t k, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define STARCOEX_HAVE_AVX2_BUILD 1
namespace avx2 {
cplx cdotc(const cplx* x, const cplx* y, std::size_t n);
cplx cdotu(const cplx* x, const cplx* y, std::size_t n);
void caxpy(cplx a, const cplx* x, cplx* y, std::size_t n);
double sumsq(const cplx* x, std::size_t n);
void real_matvec(const double* s, const cplx* phi, cplx* out, std::size_t rows,
                 std::size_t cols);
void matmul_acc(const cplx* a, const cplx* b, cplx* c, std::size_t m,
                std::size_t k, std::size_t n);
}  // namespace avx2
#else
#define STARCOEX_HAVE_AVX2_BUILD 0
#endif

}  // namespace starcoex::kern
