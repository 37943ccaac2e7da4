#pragma once
#include <vector>

namespace imc {

using Vec = std::vector<double>;

// dense row-major matrix; the only matrix type in the library.
// state spaces top out at a few thousand states, so dense is fine;
// products exploit structural zeros of the right factor (walk kernels
// have O(1) nonzeros per row).
struct Matrix {
  int n = 0, m = 0;  // rows, cols
  Vec a;

  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : n(rows), m(cols), a(static_cast<size_t>(rows) * cols, fill) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * m + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * m + j]; }

  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * m; }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * m; }

  static Matrix identity(int n);
  Matrix transposed() const;
};

// C = A * B, scanning nonzeros of B row-wise
Matrix matmul(const Matrix& A, const Matrix& B);

// y = A x
Vec matvec(const Matrix& A, const Vec& x);

// y = x^T A  (distribution evolution)
Vec vecmat(const Vec& x, const Matrix& A);

double frobenius(const Matrix& A);
double max_abs_diff(const Matrix& A, const Matrix& B);

}  // namespace imc
