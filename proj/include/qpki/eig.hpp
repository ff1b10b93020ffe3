#pragma once

#include <utility>
#include <vector>

#include "qpki/qla.hpp"

namespace qpki::qla {

// Dense real symmetric eigensolver: Householder reduction to tridiagonal
// form followed by implicit-shift QL. All matrices in this project are tiny
// (at most ~130x130 after embedding), so a dense O(n^3) solve is the right
// tool; there is deliberately no sparse machinery here.
//
// `a` is row-major n*n and is destroyed. Eigenvalues come back ascending in
// `evals`. If `evecs` is non-null it receives the orthonormal eigenvectors
// as row-major columns: evecs[r*n + c] is component r of the eigenvector
// paired with evals[c].
void sym_eig(std::vector<double>& a, int n, std::vector<double>& evals,
             std::vector<double>* evecs);

// Largest eigenvalue and its eigenvector of a real symmetric matrix handed
// over as a CMat (entries must have zero imaginary part within 1e-12).
std::pair<double, CVec> max_eig_sym(const CMat& m);

// Eigenvalues (ascending) of a hermitian complex matrix, computed through
// the real symmetric embedding [[Re, -Im], [Im, Re]] whose spectrum is that
// of the input with every eigenvalue doubled.
std::vector<double> hermitian_eigvals(const CMat& h);

// Sum of absolute eigenvalues of a hermitian matrix.
double trace_norm(const CMat& h);

}  // namespace qpki::qla
