#include "qpki/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qpki::qla {

namespace {

// Householder reduction of the symmetric matrix a (row-major, destroyed) to
// tridiagonal form. On return d holds the diagonal, e the superdiagonal
// (e[n-1] is scratch). If q is non-null it receives the accumulated
// orthogonal transform: original = Q T Q^T.
void tridiagonalize(std::vector<double>& a, int n, std::vector<double>& d,
                    std::vector<double>& e, std::vector<double>* q) {
  std::vector<double> u(n), p(n);
  if (q) {
    q->assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) (*q)[i * n + i] = 1.0;
  }
  for (int k = 0; k + 2 < n; ++k) {
    const int m = n - k - 1;  // length of the column below the diagonal
    double sigma2 = 0.0;
    for (int i = k + 1; i < n; ++i) sigma2 += a[i * n + k] * a[i * n + k];
    if (sigma2 == 0.0) continue;
    const double x0 = a[(k + 1) * n + k];
    const double alpha = x0 >= 0.0 ? -std::sqrt(sigma2) : std::sqrt(sigma2);
    // u = x - alpha e1 spans the reflector; ||u||^2 = 2 sigma^2 - 2 alpha x0.
    double unorm2 = 0.0;
    u[0] = x0 - alpha;
    unorm2 += u[0] * u[0];
    for (int i = k + 2; i < n; ++i) {
      u[i - k - 1] = a[i * n + k];
      unorm2 += u[i - k - 1] * u[i - k - 1];
    }
    if (unorm2 < 1e-300) continue;
    const double tau = 2.0 / unorm2;
    // Symmetric rank-two update of the trailing block:
    //   B -= u w^T + w u^T  with  p = tau B u,  w = p - (tau/2)(u^T p) u.
    double up = 0.0;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      const double* row = &a[(k + 1 + i) * n + (k + 1)];
      for (int j = 0; j < m; ++j) s += row[j] * u[j];
      p[i] = tau * s;
      up += u[i] * p[i];
    }
    const double kappa = 0.5 * tau * up;
    for (int i = 0; i < m; ++i) p[i] -= kappa * u[i];  // p is now w
    for (int i = 0; i < m; ++i) {
      double* row = &a[(k + 1 + i) * n + (k + 1)];
      for (int j = 0; j < m; ++j) row[j] -= u[i] * p[j] + p[i] * u[j];
    }
    a[(k + 1) * n + k] = alpha;
    a[k * n + k + 1] = alpha;
    for (int i = k + 2; i < n; ++i) {
      a[i * n + k] = 0.0;
      a[k * n + i] = 0.0;
    }
    if (q) {
      // Q := Q H, touching columns k+1..n-1 only.
      for (int r = 0; r < n; ++r) {
        double* qrow = &(*q)[r * n + (k + 1)];
        double g = 0.0;
        for (int j = 0; j < m; ++j) g += qrow[j] * u[j];
        g *= tau;
        for (int j = 0; j < m; ++j) qrow[j] -= g * u[j];
      }
    }
  }
  for (int i = 0; i < n; ++i) d[i] = a[i * n + i];
  for (int i = 0; i + 1 < n; ++i) e[i] = a[i * n + i + 1];
  e[n - 1] = 0.0;
}

// Implicit-shift QL on a tridiagonal matrix (d diagonal, e superdiagonal
// with e[n-1] scratch). z, if non-null, is an n x n row-major matrix whose
// columns are rotated along; seeding it with Q from tridiagonalize yields
// eigenvectors of the original matrix.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, int n,
                 std::vector<double>* z) {
  // Scale-aware split floor: an off-diagonal below eps * ||T|| perturbs the
  // spectrum by less than the representation error of the eigenvalues
  // themselves, so it can be zeroed. Without the absolute floor, matrices
  // with clustered zero eigenvalues (dd ~ 0) never satisfy the relative
  // test and spin until the iteration cap.
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i < n - 1) row += std::abs(e[i]);
    anorm = std::max(anorm, row);
  }
  const double floor = 2.3e-16 * anorm;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      int m = l;
      while (m < n - 1) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd || std::abs(e[m]) <= floor) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > 60) throw std::runtime_error("sym_eig: QL failed to converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (int i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z) {
          for (int k = 0; k < n; ++k) {
            f = (*z)[k * n + i + 1];
            (*z)[k * n + i + 1] = s * (*z)[k * n + i] + c * f;
            (*z)[k * n + i] = c * (*z)[k * n + i] - s * f;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace

void sym_eig(std::vector<double>& a, int n, std::vector<double>& evals,
             std::vector<double>* evecs) {
  if (n <= 0) throw std::invalid_argument("sym_eig: empty matrix");
  if (a.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("sym_eig: size mismatch");
  evals.resize(n);
  std::vector<double> e(n);
  if (n == 1) {
    evals[0] = a[0];
    if (evecs) evecs->assign(1, 1.0);
    return;
  }
  tridiagonalize(a, n, evals, e, evecs);
  ql_implicit(evals, e, n, evecs);
  // Sort ascending, permuting eigenvector columns along.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return evals[i] < evals[j]; });
  std::vector<double> sorted_vals(n);
  for (int c = 0; c < n; ++c) sorted_vals[c] = evals[idx[c]];
  if (evecs) {
    std::vector<double> sorted_vecs(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) sorted_vecs[r * n + c] = (*evecs)[r * n + idx[c]];
    *evecs = std::move(sorted_vecs);
  }
  evals = std::move(sorted_vals);
}

std::pair<double, CVec> max_eig_sym(const CMat& m) {
  const std::size_t n = m.rows();
  if (n == 0 || m.cols() != n) throw std::invalid_argument("max_eig_sym: not square");
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = m.at(i, j);
      if (std::abs(v.imag()) > kStructuralTol)
        throw std::invalid_argument("max_eig_sym: entries must be real");
      if (std::abs(v - std::conj(m.at(j, i))) > kStructuralTol)
        throw std::invalid_argument("max_eig_sym: matrix must be symmetric");
      a[i * n + j] = v.real();
    }
  std::vector<double> evals, evecs;
  sym_eig(a, static_cast<int>(n), evals, &evecs);
  CVec v(n);
  for (std::size_t r = 0; r < n; ++r) v[r] = evecs[r * n + (n - 1)];
  return {evals.back(), v};
}

namespace {

// Scratch reused across hermitian solves to keep the brute-force oracle's
// inner loop allocation-free. thread_local because the Monte Carlo harness
// may call in from worker threads.
struct EmbedScratch {
  std::vector<double> a, evals;
};
thread_local EmbedScratch g_scratch;

// Fills scratch.a with the 2n x 2n real symmetric embedding of h and solves
// for eigenvalues only.
const std::vector<double>& embedded_eigvals(const CMat& h) {
  const std::size_t n = h.rows();
  if (n == 0 || h.cols() != n) throw std::invalid_argument("hermitian eig: not square");
  if (!h.is_hermitian(kStructuralTol))
    throw std::invalid_argument("hermitian eig: matrix is not hermitian");
  const std::size_t n2 = 2 * n;
  auto& a = g_scratch.a;
  a.assign(n2 * n2, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = h.at(i, j);
      a[i * n2 + j] = v.real();
      a[(i + n) * n2 + (j + n)] = v.real();
      a[i * n2 + (j + n)] = -v.imag();
      a[(i + n) * n2 + j] = v.imag();
    }
  sym_eig(a, static_cast<int>(n2), g_scratch.evals, nullptr);
  return g_scratch.evals;
}

}  // namespace

std::vector<double> hermitian_eigvals(const CMat& h) {
  const std::vector<double>& ev = embedded_eigvals(h);
  // The embedding doubles every eigenvalue; collapse sorted pairs.
  std::vector<double> out(ev.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
  return out;
}

double trace_norm(const CMat& h) {
  const std::vector<double>& ev = embedded_eigvals(h);
  double s = 0.0;
  for (double v : ev) s += std::abs(v);
  return 0.5 * s;
}

}  // namespace qpki::qla
