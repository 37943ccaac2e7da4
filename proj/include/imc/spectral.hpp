#pragma once
#include "imc/markov.hpp"

namespace imc {

// K*(x,y) = K(y,x) mu(y) / mu'(x) with mu' = mu K; the adjoint of K between
// l2(mu') and l2(mu). Rejects image measures with entries below 1e-14.
Kernel adjoint_kernel(const Kernel& K, const Measure& mu);

enum class RevSide {
  star_then_K,  // P = K* K, reversible w.r.t. mu' = mu K
  K_then_star,  // P-check = K K*, reversible w.r.t. mu
};

Kernel reversibilization(const Kernel& K, const Measure& mu, RevSide side);

// E(f,f) = 1/2 sum_{x,y} (f(x)-f(y))^2 pi(x) P(x,y); requires (P, pi) reversible
double dirichlet_form(const Kernel& P, const Measure& pi, const Vec& f);

struct SpectralReport {
  Vec sigma;              // sigma_0 = 1 >= sigma_1 >= ... >= 0
  Matrix psi;             // column i: eigenfunction psi_i of K K*, orthonormal in l2(mu)
  double gap = 0.0;       // 1 - sigma_1 (1 for a single state)
  Measure base_measure;   // mu
  Measure image_measure;  // mu' = mu K
};

// singular values of K between l2(mu') and l2(mu), i.e. square roots of the
// eigenvalues of K K* on l2(mu); full dense decomposition
SpectralReport singular_values(const Kernel& K, const Measure& mu);

// 1 - lambda_1(P) where lambda_1 is the second largest eigenvalue; equals
// inf E(f,f)/Var_pi(f) over nonconstant f
double spectral_gap(const Kernel& P, const Measure& pi);

// top nontrivial singular value only. Power iteration on the symmetrized
// K K* with the known top eigenvector sqrt(mu) deflated; touches only the
// nonzeros of K, so sparse walk kernels cost O(iters * nnz)
double sigma1_iterative(const Kernel& K, const Measure& mu);

// sigma_1(K, mu): dense decomposition up to 64 states, iterative beyond
double sigma1(const Kernel& K, const Measure& mu);

// prod_{i=1}^n sigma_1(K_i, mu_{i-1}); dominates the l2(mu_n) -> l2(mu_0)
// norm of K_{0,n} - mu_n
double singular_product_bound(const Schedule& s, const Measure& mu0, long n);

}  // namespace imc
