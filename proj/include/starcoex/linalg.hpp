#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "starcoex/kernels.hpp"

// Small dense complex linear algebra, sized for the matrices this project
// works with (a few hundred rows at most). Row-major storage throughout.
namespace starcoex::la {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static CMat identity(std::size_t n);
  static CMat diag(const CVec& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return a_[r * cols_ + c];
  }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }
  std::size_t size() const { return a_.size(); }

  CMat& operator+=(const CMat& other);
  CMat& operator*=(cplx s);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  CVec a_;
};

CMat operator+(CMat a, const CMat& b);
CMat operator*(cplx s, CMat a);

// c = a * b
CMat matmul(const CMat& a, const CMat& b);
// a^H
CMat adjoint(const CMat& a);
// a * x
CVec matvec(const CMat& a, const CVec& x);
// a^H * x
CVec adjoint_matvec(const CMat& a, const CVec& x);
// x * y^H as a matrix
CMat outer(const CVec& x, const CVec& y);

cplx trace(const CMat& a);
// tr(a*b) for Hermitian a, b (real by symmetry)
double trace_prod_herm(const CMat& a, const CMat& b);
// x^H a x, real part (exact for Hermitian a)
double quad_form(const CVec& x, const CMat& a);
cplx bilinear(const CVec& x, const CMat& a, const CVec& y);  // x^H a y
double fro_norm(const CMat& a);
double norm(const CVec& x);
cplx dot(const CVec& x, const CVec& y);  // x^H y

bool is_hermitian(const CMat& a, double tol);
// 0.5 * (a + a^H)
CMat hermitize(const CMat& a);

// Eigendecomposition of a Hermitian matrix: a = v * diag(w) * v^H with
// eigenvalues ascending. Cyclic Jacobi; plenty for the sizes used here.
struct Eigh {
  RVec w;
  CMat v;
};
Eigh eigh(const CMat& a);

// Hermitian PSD square root; eigenvalues below zero are clipped before the
// square root to absorb round-off on rank-deficient inputs.
CMat herm_sqrt(const CMat& a);

// Solve (a) x = b for Hermitian positive definite a via Cholesky.
CVec solve_hpd(const CMat& a, const CVec& b);
CMat solve_hpd(const CMat& a, const CMat& b);

}  // namespace starcoex::la
