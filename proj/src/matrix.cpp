#include "imc/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "imc/errors.hpp"

namespace imc {

Matrix Matrix::identity(int n) {
  Matrix I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Matrix Matrix::transposed() const {
  Matrix T(m, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) T(j, i) = (*this)(i, j);
  return T;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  require(A.m == B.n, errc::SizeMismatch, "matmul: inner dimensions differ");
  // per-row nonzero lists of B; one pass costs O(nm) and pays off whenever
  // B is a sparse walk kernel (the hot path is repeated A <- A*K)
  std::vector<int> cols;
  std::vector<double> vals;
  std::vector<int> start(B.n + 1, 0);
  cols.reserve(static_cast<size_t>(B.n) * 4);
  vals.reserve(static_cast<size_t>(B.n) * 4);
  for (int k = 0; k < B.n; ++k) {
    const double* bk = B.row(k);
    for (int j = 0; j < B.m; ++j)
      if (bk[j] != 0.0) {
        cols.push_back(j);
        vals.push_back(bk[j]);
      }
    start[k + 1] = static_cast<int>(cols.size());
  }
  Matrix C(A.n, B.m);
  for (int i = 0; i < A.n; ++i) {
    const double* ai = A.row(i);
    double* ci = C.row(i);
    for (int k = 0; k < A.m; ++k) {
      double aik = ai[k];
      if (aik == 0.0) continue;
      for (int t = start[k]; t < start[k + 1]; ++t) ci[cols[t]] += aik * vals[t];
    }
  }
  return C;
}

Vec matvec(const Matrix& A, const Vec& x) {
  require(static_cast<int>(x.size()) == A.m, errc::SizeMismatch, "matvec: size mismatch");
  Vec y(A.n, 0.0);
  for (int i = 0; i < A.n; ++i) {
    const double* ai = A.row(i);
    double s = 0.0;
    for (int j = 0; j < A.m; ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec vecmat(const Vec& x, const Matrix& A) {
  require(static_cast<int>(x.size()) == A.n, errc::SizeMismatch, "vecmat: size mismatch");
  Vec y(A.m, 0.0);
  for (int k = 0; k < A.n; ++k) {
    double xk = x[k];
    if (xk == 0.0) continue;
    const double* ak = A.row(k);
    for (int j = 0; j < A.m; ++j) y[j] += xk * ak[j];
  }
  return y;
}

double frobenius(const Matrix& A) {
  double s = 0.0;
  for (double v : A.a) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& A, const Matrix& B) {
  require(A.n == B.n && A.m == B.m, errc::SizeMismatch, "max_abs_diff: shape mismatch");
  double d = 0.0;
  for (size_t i = 0; i < A.a.size(); ++i) d = std::max(d, std::fabs(A.a[i] - B.a[i]));
  return d;
}

}  // namespace imc
