#include "mpslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace mpslab::linalg {

namespace {

lapack_complex_double* lp(Eigen::MatrixXcd& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}

std::string shape_of(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_finite(const ComplexMatrix& m, const char* who) {
  if (!all_finite(m)) {
    throw ValidationError(std::string(who) + ": input has non-finite entries (" + shape_of(m) + ")");
  }
}

}  // namespace

void set_blas_threads(int n) {
  if (openblas_set_num_threads) {
    openblas_set_num_threads(n);
  }
}

bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

double clamp_probability(double x) {
  if (x >= 0.0) return x;
  if (x >= kClampFloor) return 0.0;
  throw NumericalFailure("spectrum value " + std::to_string(x) + " below clamping floor");
}

SvdResult svd(const ComplexMatrix& m) {
  require_finite(m, "svd");
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  if (r == 0) throw ValidationError("svd: empty matrix " + shape_of(m));

  SvdResult out;
  out.u.resize(rows, r);
  out.s.resize(r);
  out.vh.resize(r, cols);

  ComplexMatrix a = m;
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, lp(a), rows,
                                   out.s.data(), lp(out.u), rows, lp(out.vh), r);
  if (info != 0) {
    // divide-and-conquer failed; retry with the slower QR-iteration driver
    a = m;
    std::vector<double> superb(std::max<lapack_int>(1, r - 1));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', rows, cols, lp(a), rows,
                          out.s.data(), lp(out.u), rows, lp(out.vh), r, superb.data());
    if (info != 0) {
      throw NumericalFailure("svd did not converge on a " + shape_of(m) + " matrix (info=" +
                             std::to_string(info) + ")");
    }
  }
  return out;
}

RealVector singular_values(const ComplexMatrix& m) {
  require_finite(m, "singular_values");
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  if (r == 0) throw ValidationError("singular_values: empty matrix");
  RealVector s(r);
  ComplexMatrix a = m;
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, lp(a), rows,
                                   s.data(), nullptr, rows, nullptr, 1);
  if (info != 0) {
    a = m;
    std::vector<double> superb(std::max<lapack_int>(1, r - 1));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', rows, cols, lp(a), rows,
                          s.data(), nullptr, rows, nullptr, 1, superb.data());
    if (info != 0) {
      throw NumericalFailure("singular_values did not converge on a " + shape_of(m) + " matrix");
    }
  }
  return s;
}

namespace {

void check_hermitian(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(who) + ": matrix not square (" + shape_of(m) + ")");
  }
  require_finite(m, who);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kAlgebraTol * scale) {
    throw ValidationError(std::string(who) + ": matrix deviates from Hermitian by " + std::to_string(dev));
  }
}

}  // namespace

EigResult hermitian_eig(const ComplexMatrix& m) {
  check_hermitian(m, "hermitian_eig");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  EigResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors = (m + m.adjoint()) / 2.0;  // symmetrize round-off
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, lp(out.eigenvectors), n,
                                   out.eigenvalues.data());
  if (info != 0) {
    throw NumericalFailure("hermitian_eig did not converge on a " + shape_of(m) + " matrix");
  }
  // LAPACK returns ascending order
  out.eigenvalues.reverseInPlace();
  out.eigenvectors = out.eigenvectors.rowwise().reverse().eval();
  return out;
}

RealVector hermitian_eigvals(const ComplexMatrix& m) {
  check_hermitian(m, "hermitian_eigvals");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  RealVector w(n);
  ComplexMatrix a = (m + m.adjoint()) / 2.0;
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, lp(a), n, w.data());
  if (info != 0) {
    throw NumericalFailure("hermitian_eigvals did not converge on a " + shape_of(m) + " matrix");
  }
  w.reverseInPlace();
  return w;
}

QrResult qr(const ComplexMatrix& m) {
  require_finite(m, "qr");
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  ComplexMatrix a = m;
  std::vector<std::complex<double>> tau(r);
  lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, rows, cols, lp(a), rows,
                                   reinterpret_cast<lapack_complex_double*>(tau.data()));
  if (info != 0) throw NumericalFailure("qr factorization failed on " + shape_of(m));
  QrResult out;
  out.r = a.topRows(r).triangularView<Eigen::Upper>();
  a.conservativeResize(rows, r);
  info = LAPACKE_zungqr(LAPACK_COL_MAJOR, rows, r, r, lp(a), rows,
                        reinterpret_cast<lapack_complex_double*>(tau.data()));
  if (info != 0) throw NumericalFailure("qr orthogonalization failed on " + shape_of(m));
  out.q = std::move(a);
  return out;
}

LqResult lq(const ComplexMatrix& m) {
  require_finite(m, "lq");
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  ComplexMatrix a = m;
  std::vector<std::complex<double>> tau(r);
  lapack_int info = LAPACKE_zgelqf(LAPACK_COL_MAJOR, rows, cols, lp(a), rows,
                                   reinterpret_cast<lapack_complex_double*>(tau.data()));
  if (info != 0) throw NumericalFailure("lq factorization failed on " + shape_of(m));
  LqResult out;
  out.l = a.leftCols(r).triangularView<Eigen::Lower>();
  ComplexMatrix q = a.topRows(r);
  info = LAPACKE_zunglq(LAPACK_COL_MAJOR, r, cols, r, lp(q), r,
                        reinterpret_cast<lapack_complex_double*>(tau.data()));
  if (info != 0) throw NumericalFailure("lq orthogonalization failed on " + shape_of(m));
  out.q = std::move(q);
  return out;
}

}  // namespace mpslab::linalg
