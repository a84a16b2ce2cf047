#include "starcoex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace starcoex::la {

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diag(const CVec& d) {
  CMat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMat& CMat::operator+=(const CMat& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("CMat::operator+=: shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

CMat& CMat::operator*=(cplx s) {
  for (auto& v : a_) v *= s;
  return *this;
}

CMat operator+(CMat a, const CMat& b) {
  a += b;
  return a;
}

CMat operator*(cplx s, CMat a) {
  a *= s;
  return a;
}

CMat matmul(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: shape mismatch");
  CMat c(a.rows(), b.cols());
  kern::matmul_acc(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

CMat adjoint(const CMat& a) {
  CMat b(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) b(c, r) = std::conj(a(r, c));
  return b;
}

CVec matvec(const CMat& a, const CVec& x) {
  if (a.cols() != x.size())
    throw std::invalid_argument("matvec: shape mismatch");
  CVec y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    y[r] = kern::cdotu(a.data() + r * a.cols(), x.data(), a.cols());
  return y;
}

CVec adjoint_matvec(const CMat& a, const CVec& x) {
  if (a.rows() != x.size())
    throw std::invalid_argument("adjoint_matvec: shape mismatch");
  CVec y(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const cplx s = std::conj(x[r]);
    for (std::size_t c = 0; c < a.cols(); ++c)
      y[c] += std::conj(a(r, c) * s);  // conj(a_rc) * x_r
  }
  return y;
}

CMat outer(const CVec& x, const CVec& y) {
  CMat m(x.size(), y.size());
  for (std::size_t r = 0; r < x.size(); ++r)
    for (std::size_t c = 0; c < y.size(); ++c)
      m(r, c) = x[r] * std::conj(y[c]);
  return m;
}

cplx trace(const CMat& a) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

double trace_prod_herm(const CMat& a, const CMat& b) {
  // tr(ab) = sum_ij a_ij conj(b_ij) when b is Hermitian
  return kern::cdotc(b.data(), a.data(), a.size()).real();
}

double quad_form(const CVec& x, const CMat& a) {
  CVec ax = matvec(a, x);
  return kern::cdotc(x.data(), ax.data(), x.size()).real();
}

cplx bilinear(const CVec& x, const CMat& a, const CVec& y) {
  CVec ay = matvec(a, y);
  return kern::cdotc(x.data(), ay.data(), x.size());
}

double fro_norm(const CMat& a) { return std::sqrt(kern::sumsq(a.data(), a.size())); }

double norm(const CVec& x) { return std::sqrt(kern::sumsq(x.data(), x.size())); }

cplx dot(const CVec& x, const CVec& y) {
  return kern::cdotc(x.data(), y.data(), x.size());
}

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r; c < a.cols(); ++c)
      if (std::abs(a(r, c) - std::conj(a(c, r))) > tol) return false;
  return true;
}

CMat hermitize(const CMat& a) {
  CMat b(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      b(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
  return b;
}

namespace {

double offdiag_sq(const CMat& w) {
  double s = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r)
    for (std::size_t c = r + 1; c < w.cols(); ++c) s += std::norm(w(r, c));
  return 2.0 * s;
}

}  // namespace

Eigh eigh(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigh: not square");
  const std::size_t n = a.rows();
  CMat w = hermitize(a);
  CMat v = CMat::identity(n);
  if (n == 0) return {{}, v};

  const double fro = fro_norm(w);
  const double stop = 1e-14 * std::max(fro, 1e-300);
  const int max_sweeps = 60;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (std::sqrt(offdiag_sq(w)) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = w(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-300) continue;
        const cplx phase = apq / r;  // apq = r * e^{i phi}
        const double app = w(p, p).real();
        const double aqq = w(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx sp = s * phase;        // J(p,q)
        const cplx spc = std::conj(sp);   // used for J(q,p) = -conj(sp)

        // rows p, q of w <- J^H w
        for (std::size_t j = 0; j < n; ++j) {
          const cplx wp = w(p, j), wq = w(q, j);
          w(p, j) = c * wp - sp * wq;
          w(q, j) = spc * wp + c * wq;
        }
        // cols p, q of w <- w J; same update for the eigenvector accumulator
        for (std::size_t i = 0; i < n; ++i) {
          const cplx wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - spc * wq;
          w(i, q) = sp * wp + c * wq;
          const cplx vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - spc * vq;
          v(i, q) = sp * vp + c * vq;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
      }
    }
  }

  RVec vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = w(i, i).real();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return vals[i] < vals[j]; });

  Eigh out;
  out.w.resize(n);
  out.v = CMat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.w[k] = vals[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, order[k]);
  }
  return out;
}

CMat herm_sqrt(const CMat& a) {
  Eigh e = eigh(a);
  const std::size_t n = a.rows();
  CMat scaled(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const double s = e.w[c] > 0.0 ? std::sqrt(e.w[c]) : 0.0;
    for (std::size_t r = 0; r < n; ++r) scaled(r, c) = e.v(r, c) * s;
  }
  return matmul(scaled, adjoint(e.v));
}

namespace {

// In-place Cholesky a = l l^H; returns lower triangle in a.
CMat cholesky(const CMat& a) {
  const std::size_t n = a.rows();
  CMat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (d <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j).real();
    }
  }
  return l;
}

CVec chol_solve(const CMat& l, const CVec& b) {
  const std::size_t n = l.rows();
  CVec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i).real();
  }
  CVec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    cplx s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x[k];
    x[ii] = s / l(ii, ii).real();
  }
  return x;
}

}  // namespace

CVec solve_hpd(const CMat& a, const CVec& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("solve_hpd: shape mismatch");
  return chol_solve(cholesky(a), b);
}

CMat solve_hpd(const CMat& a, const CMat& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows())
    throw std::invalid_argument("solve_hpd: shape mismatch");
  CMat l = cholesky(a);
  CMat x(b.rows(), b.cols());
  CVec col(b.rows());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t r = 0; r < b.rows(); ++r) col[r] = b(r, c);
    CVec xc = chol_solve(l, col);
    for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = xc[r];
  }
  return x;
}

}  // namespace starcoex::la
