#pragma once

#include <Eigen/Dense>
#include <complex>

#include "mpslab/errors.hpp"

// Dense complex linear-algebra kernel shared by all modules: SVD, Hermitian
// eigendecomposition and QR/LQ orthogonalization, backed by LAPACK.  All
// spectra-producing routines return values sorted nonincreasing.

namespace mpslab::linalg {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Absolute tolerance used for internal algebraic identities (orthonormality,
// reconstruction residuals, Hermiticity).
inline constexpr double kAlgebraTol = 1e-10;

// Eigenvalues / squared singular values in [-1e-12, 0) are snapped to zero;
// anything below -1e-12 is a numerical failure.
inline constexpr double kClampFloor = -1e-12;

struct SvdResult {
  ComplexMatrix u;        // m x r, orthonormal columns
  RealVector s;           // r, nonincreasing, nonnegative
  ComplexMatrix vh;       // r x n, orthonormal rows
};

struct EigResult {
  RealVector eigenvalues;     // nonincreasing
  ComplexMatrix eigenvectors; // columns match eigenvalue order
};

struct QrResult {
  ComplexMatrix q;  // m x r, orthonormal columns (r = min(m, n))
  ComplexMatrix r;  // r x n, upper triangular
};

struct LqResult {
  ComplexMatrix l;  // m x r, lower triangular (r = min(m, n))
  ComplexMatrix q;  // r x n, orthonormal rows
};

// Thin SVD.  Tries the divide-and-conquer driver first and falls back to the
// QR-iteration driver; if both fail the shape is reported.
SvdResult svd(const ComplexMatrix& m);

// Singular values only.
RealVector singular_values(const ComplexMatrix& m);

// Full eigendecomposition of a Hermitian matrix.  Inputs non-Hermitian
// beyond kAlgebraTol are rejected.
EigResult hermitian_eig(const ComplexMatrix& m);

// Eigenvalues only (nonincreasing).
RealVector hermitian_eigvals(const ComplexMatrix& m);

// Economy QR / LQ used for canonicalization sweeps.
QrResult qr(const ComplexMatrix& m);
LqResult lq(const ComplexMatrix& m);

// Applies the clamping rule to a probability-like value.
double clamp_probability(double x);

// True if every entry is finite.
bool all_finite(const ComplexMatrix& m);

// Caps the number of threads the underlying BLAS may use.  Call once per
// process before heavy work; keeps timings and reductions reproducible.
void set_blas_threads(int n);

}  // namespace mpslab::linalg
