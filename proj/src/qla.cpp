#include "qpki/qla.hpp"

#include <cmath>
#include <stdexcept>

#include "qpki/eig.hpp"

namespace qpki::qla {

CVec CVec::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) throw std::invalid_argument("CVec::basis: index out of range");
  CVec e(dim);
  e[k] = 1.0;
  return e;
}

double CVec::norm() const {
  double s = 0.0;
  for (const cplx& c : v_) s += std::norm(c);
  return std::sqrt(s);
}

void CVec::normalize() {
  const double n = norm();
  if (n < 1e-300) throw std::invalid_argument("CVec::normalize: zero vector");
  for (cplx& c : v_) c /= n;
}

bool CVec::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

cplx CVec::dot(const CVec& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("CVec::dot: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::conj(v_[i]) * other.v_[i];
  return s;
}

CVec CVec::operator+(const CVec& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("CVec::+: dimension mismatch");
  CVec r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = v_[i] + o.v_[i];
  return r;
}

CVec CVec::operator-(const CVec& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("CVec::-: dimension mismatch");
  CVec r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = v_[i] - o.v_[i];
  return r;
}

CVec CVec::operator*(cplx s) const {
  CVec r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = v_[i] * s;
  return r;
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

CMat CMat::outer(const CVec& u, const CVec& v) {
  CMat m(u.dim(), v.dim());
  for (std::size_t i = 0; i < u.dim(); ++i)
    for (std::size_t j = 0; j < v.dim(); ++j) m.at(i, j) = u[i] * std::conj(v[j]);
  return m;
}

CMat CMat::adjoint() const {
  CMat m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m.at(j, i) = std::conj(at(i, j));
  return m;
}

CMat CMat::operator+(const CMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("CMat::+: shape mismatch");
  CMat m(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
  return m;
}

CMat CMat::operator-(const CMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("CMat::-: shape mismatch");
  CMat m(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
  return m;
}

CMat CMat::operator*(const CMat& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("CMat::*: shape mismatch");
  CMat m(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const cplx aik = at(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) m.at(i, j) += aik * o.at(k, j);
    }
  return m;
}

CVec CMat::operator*(const CVec& x) const {
  if (cols_ != x.dim()) throw std::invalid_argument("CMat::*vec: shape mismatch");
  CVec y(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

CMat CMat::operator*(cplx s) const {
  CMat m(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * s;
  return m;
}

cplx CMat::trace() const {
  if (rows_ != cols_) throw std::invalid_argument("CMat::trace: not square");
  cplx s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += at(i, i);
  return s;
}

double CMat::max_abs() const {
  double m = 0.0;
  for (const cplx& c : a_) m = std::max(m, std::abs(c));
  return m;
}

bool CMat::is_hermitian(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
  return true;
}

bool CMat::is_unitary(double tol) const {
  if (rows_ != cols_) return false;
  return ((adjoint() * *this) - identity(rows_)).max_abs() <= tol;
}

CMat phase_gate(double phi) {
  CMat g(2, 2);
  g.at(0, 0) = 1.0;
  g.at(1, 1) = std::polar(1.0, phi);
  return g;
}

void DensityOperator::validate() const {
  if (mat.rows() != mat.cols())
    throw std::invalid_argument("DensityOperator: not square");
  if (!mat.is_hermitian(kStructuralTol))
    throw std::invalid_argument("DensityOperator: not hermitian");
  if (std::abs(mat.trace() - cplx{1.0}) > kDerivedTol)
    throw std::invalid_argument("DensityOperator: trace != 1");
  const auto evs = hermitian_eigvals(mat);
  if (!evs.empty() && evs.front() < -kDerivedTol)
    throw std::invalid_argument("DensityOperator: negative eigenvalue");
}

void Povm::validate() const {
  if (elements.empty()) throw std::invalid_argument("Povm: no elements");
  const std::size_t n = dim();
  CMat sum(n, n);
  for (const PovmElement& e : elements) {
    if (e.mat.rows() != n || e.mat.cols() != n)
      throw std::invalid_argument("Povm: element shape mismatch");
    if (!e.mat.is_hermitian(kStructuralTol))
      throw std::invalid_argument("Povm: element not hermitian");
    const auto evs = hermitian_eigvals(e.mat);
    if (evs.front() < -kDerivedTol)
      throw std::invalid_argument("Povm: element not positive semidefinite");
    sum = sum + e.mat;
  }
  if ((sum - CMat::identity(n)).max_abs() > kDerivedTol)
    throw std::invalid_argument("Povm: elements do not sum to identity");
}

std::vector<double> outcome_probabilities(const CVec& psi, const Povm& povm) {
  if (povm.elements.empty()) throw std::invalid_argument("outcome_probabilities: empty POVM");
  if (psi.dim() != povm.dim())
    throw std::invalid_argument("outcome_probabilities: dimension mismatch");
  std::vector<double> p;
  p.reserve(povm.elements.size());
  for (const PovmElement& e : povm.elements) {
    // <psi|E|psi> is real for hermitian E; clamp the tiny negative values
    // rounding can produce.
    const cplx val = psi.dot(e.mat * psi);
    p.push_back(std::max(0.0, val.real()));
  }
  return p;
}

std::size_t measure_povm(const CVec& psi, const Povm& povm, RngStream& rng) {
  const std::vector<double> p = outcome_probabilities(psi, povm);
  double total = 0.0;
  for (double q : p) total += q;
  if (std::abs(total - 1.0) > kDerivedTol)
    throw std::runtime_error("measure_povm: probabilities sum to " +
                             std::to_string(total) + " (malformed POVM)");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return k;
  }
  return p.size() - 1;  // u landed in the rounding slack at the top
}

}  // namespace qpki::qla
