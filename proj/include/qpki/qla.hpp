#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qpki/rng.hpp"

namespace qpki::qla {

using cplx = std::complex<double>;

// Tolerance conventions used throughout: structural identities (hermiticity,
// completeness of a POVM we built ourselves) are checked at 1e-12; anything
// that has been through an eigensolver or other compound computation is
// checked at 1e-9.
inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kDerivedTol = 1e-9;

// Dense complex column vector.
class CVec {
 public:
  CVec() = default;
  explicit CVec(std::size_t dim) : v_(dim) {}

  static CVec basis(std::size_t dim, std::size_t k);

  std::size_t dim() const { return v_.size(); }
  cplx& operator[](std::size_t i) { return v_[i]; }
  const cplx& operator[](std::size_t i) const { return v_[i]; }

  double norm() const;
  // Scales to unit norm. Throws std::invalid_argument on (near-)zero input.
  void normalize();
  bool is_normalized(double tol = kDerivedTol) const;

  // Inner product <this|other>, conjugate-linear in *this.
  cplx dot(const CVec& other) const;

  CVec operator+(const CVec& o) const;
  CVec operator-(const CVec& o) const;
  CVec operator*(cplx s) const;

 private:
  std::vector<cplx> v_;
};

// Dense complex matrix, row-major.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static CMat identity(std::size_t n);
  // |u><v|
  static CMat outer(const CVec& u, const CVec& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  CMat adjoint() const;
  CMat operator+(const CMat& o) const;
  CMat operator-(const CMat& o) const;
  CMat operator*(const CMat& o) const;
  CVec operator*(const CVec& x) const;
  CMat operator*(cplx s) const;

  cplx trace() const;
  double max_abs() const;  // largest entry magnitude

  bool is_hermitian(double tol = kStructuralTol) const;
  bool is_unitary(double tol = kDerivedTol) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

// diag(1, e^{i phi}) on a single qubit.
CMat phase_gate(double phi);

// A density operator is just a matrix with promised structure; validate()
// checks hermiticity (1e-12), unit trace (1e-9) and spectrum >= -1e-9.
struct DensityOperator {
  CMat mat;
  void validate() const;  // throws std::invalid_argument on violation
};

struct PovmElement {
  std::string label;
  CMat mat;
};

// Measurement with labelled outcomes. validate() checks each element is
// hermitian and positive semidefinite and that the elements sum to the
// identity within 1e-9.
struct Povm {
  std::vector<PovmElement> elements;
  std::size_t dim() const { return elements.empty() ? 0 : elements[0].mat.rows(); }
  void validate() const;
};

// Exact Born-rule probabilities <psi|E_k|psi> for each element, in order.
std::vector<double> outcome_probabilities(const CVec& psi, const Povm& povm);

// Samples one outcome index by inverse transform over the Born-rule
// probabilities. Throws if the probabilities fail to sum to 1 within 1e-9
// (malformed POVM) or on dimension mismatch.
std::size_t measure_povm(const CVec& psi, const Povm& povm, RngStream& rng);

}  // namespace qpki::qla
