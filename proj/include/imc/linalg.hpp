#pragma once
#include "imc/matrix.hpp"

namespace imc {

// solves A x = b by Gaussian elimination with partial pivoting; throws on a
// numerically singular pivot
Vec solve_linear(Matrix A, Vec b);

// full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
// deterministic: fixed sweep order, eigenvalues sorted descending (ties by
// ascending index of the first nonzero eigenvector entry), eigenvector sign
// fixed so the first entry with |v| > 1e-12 is positive.
struct SymEig {
  Vec values;      // descending
  Matrix vectors;  // column i pairs with values[i]
};
SymEig jacobi_eigen(Matrix S, double tol = 1e-12, int max_sweeps = 100);

}  // namespace imc
