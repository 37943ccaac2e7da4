#include "imc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imc/errors.hpp"

namespace imc {

Vec solve_linear(Matrix A, Vec b) {
  const int n = A.n;
  require(A.m == n && static_cast<int>(b.size()) == n, errc::SizeMismatch,
          "solve_linear: shape mismatch");
  double scale = frobenius(A);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(A(i, k)) > std::fabs(A(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    double akk = A(k, k);
    require(std::fabs(akk) > 1e-13 * (scale + 1.0), errc::Reducible,
            "solve_linear: singular pivot");
    for (int i = k + 1; i < n; ++i) {
      double f = A(i, k) / akk;
      if (f == 0.0) continue;
      A(i, k) = 0.0;
      for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

namespace {

double offdiag_norm(const Matrix& S) {
  double s = 0.0;
  for (int i = 0; i < S.n; ++i)
    for (int j = 0; j < S.m; ++j)
      if (i != j) s += S(i, j) * S(i, j);
  return std::sqrt(s);
}

int first_big_index(const Matrix& V, int col) {
  for (int i = 0; i < V.n; ++i)
    if (std::fabs(V(i, col)) > 1e-12) return i;
  return V.n;
}

}  // namespace

SymEig jacobi_eigen(Matrix S, double tol, int max_sweeps) {
  const int n = S.n;
  require(S.m == n, errc::SizeMismatch, "jacobi_eigen: not square");
  Matrix V = Matrix::identity(n);
  const double stop = tol * (1.0 + frobenius(S));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (offdiag_norm(S) <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = S(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double tau = (S(q, q) - S(p, p)) / (2.0 * apq);
        double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        double spp = S(p, p), sqq = S(q, q);
        S(p, p) = spp - t * apq;
        S(q, q) = sqq + t * apq;
        S(p, q) = 0.0;
        S(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double skp = S(k, p), skq = S(k, q);
          S(k, p) = c * skp - s * skq;
          S(p, k) = S(k, p);
          S(k, q) = s * skp + c * skq;
          S(q, k) = S(k, q);
        }
        for (int k = 0; k < n; ++k) {
          double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (S(a, a) != S(b, b)) return S(a, a) > S(b, b);
    return first_big_index(V, a) < first_big_index(V, b);
  });
  SymEig out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    int src = order[j];
    out.values[j] = S(src, src);
    int lead = first_big_index(V, src);
    double sign = (lead < n && V(lead, src) < 0.0) ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) out.vectors(i, j) = sign * V(i, src);
  }
  return out;
}

}  // namespace imc
