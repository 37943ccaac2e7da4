#include "imc/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "imc/errors.hpp"
#include "imc/linalg.hpp"
#include "imc/rng.hpp"

namespace imc {

namespace {

// raw image weights mu K without renormalization, guarded away from zero
Vec image_weights(const Kernel& K, const Measure& mu) {
  require(mu.size() == K.size(), errc::SizeMismatch, "measure/kernel size mismatch");
  require(mu.positive, errc::ZeroReference, "mu must be positive");
  Vec mup = vecmat(mu.weights, K.rows);
  for (int y = 0; y < K.size(); ++y)
    require(mup[y] > 1e-14, errc::ZeroImageMass,
            "image measure mu K vanishes at state " + std::to_string(y));
  return mup;
}

Measure normalized_measure(const StateSpace& space, Vec w) {
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return make_measure(space, std::move(w));
}

Kernel renormalized_kernel(const StateSpace& space, Matrix P) {
  for (int x = 0; x < P.n; ++x) {
    double* px = P.row(x);
    double sum = 0.0;
    for (int y = 0; y < P.m; ++y) {
      if (px[y] < 0.0 && px[y] > -1e-15) px[y] = 0.0;
      sum += px[y];
    }
    for (int y = 0; y < P.m; ++y) px[y] /= sum;
  }
  return validate_kernel(space, P);
}

}  // namespace

Kernel adjoint_kernel(const Kernel& K, const Measure& mu) {
  const int n = K.size();
  Vec mup = image_weights(K, mu);
  Matrix A(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) A(x, y) = K(y, x) * mu[y] / mup[x];
  return renormalized_kernel(K.space, std::move(A));
}

Kernel reversibilization(const Kernel& K, const Measure& mu, RevSide side) {
  Kernel Kstar = adjoint_kernel(K, mu);
  Matrix P = (side == RevSide::star_then_K) ? matmul(Kstar.rows, K.rows)
                                            : matmul(K.rows, Kstar.rows);
  return renormalized_kernel(K.space, std::move(P));
}

double dirichlet_form(const Kernel& P, const Measure& pi, const Vec& f) {
  const int n = P.size();
  require(static_cast<int>(f.size()) == n && pi.size() == n, errc::SizeMismatch,
          "dirichlet_form: size mismatch");
  ReversibilityCheck rc = check_reversible(P, pi);
  require(rc.reversible, errc::NotReversible,
          "dirichlet_form: detailed balance violated by " + std::to_string(rc.max_violation));
  double e = 0.0;
  for (int x = 0; x < n; ++x) {
    const double* px = P.rows.row(x);
    for (int y = 0; y < n; ++y) {
      if (px[y] == 0.0) continue;
      double d = f[x] - f[y];
      e += d * d * pi[x] * px[y];
    }
  }
  return 0.5 * e;
}

SpectralReport singular_values(const Kernel& K, const Measure& mu) {
  const int n = K.size();
  Vec mup = image_weights(K, mu);
  // S = B B^T with B = D_mu^(1/2) K D_mu'^(-1/2); S is similar to K K* and
  // symmetric PSD, so Jacobi gives sigma_i^2 and the l2(mu)-orthonormal psi_i
  Matrix B(n, n);
  for (int x = 0; x < n; ++x) {
    double sx = std::sqrt(mu[x]);
    for (int y = 0; y < n; ++y) B(x, y) = sx * K(x, y) / std::sqrt(mup[y]);
  }
  SymEig eig = jacobi_eigen(matmul(B, B.transposed()));
  SpectralReport rep;
  rep.sigma.resize(n);
  rep.psi = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    rep.sigma[i] = std::sqrt(std::clamp(eig.values[i], 0.0, 1.0));
    for (int x = 0; x < n; ++x) rep.psi(x, i) = eig.vectors(x, i) / std::sqrt(mu[x]);
  }
  rep.gap = (n >= 2) ? 1.0 - rep.sigma[1] : 1.0;
  rep.base_measure = mu;
  rep.image_measure = normalized_measure(K.space, std::move(mup));
  return rep;
}

double spectral_gap(const Kernel& P, const Measure& pi) {
  const int n = P.size();
  require(pi.size() == n, errc::SizeMismatch, "spectral_gap: size mismatch");
  require(pi.positive, errc::ZeroReference, "spectral_gap: pi must be positive");
  ReversibilityCheck rc = check_reversible(P, pi);
  require(rc.reversible, errc::NotReversible,
          "spectral_gap: detailed balance violated by " + std::to_string(rc.max_violation));
  if (n == 1) return 1.0;
  Matrix S(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      S(x, y) = std::sqrt(pi[x]) * P(x, y) / std::sqrt(pi[y]);
  // rounding can leave S slightly asymmetric; average the halves
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double v = 0.5 * (S(x, y) + S(y, x));
      S(x, y) = v;
      S(y, x) = v;
    }
  SymEig eig = jacobi_eigen(std::move(S));
  return 1.0 - eig.values[1];
}

double sigma1_iterative(const Kernel& K, const Measure& mu) {
  const int n = K.size();
  Vec mup = image_weights(K, mu);
  if (n == 1) return 0.0;
  Vec sqmu(n), isqmup(n);
  for (int x = 0; x < n; ++x) sqmu[x] = std::sqrt(mu[x]);
  for (int y = 0; y < n; ++y) isqmup[y] = 1.0 / std::sqrt(mup[y]);
  // w = sqrt(mu) is the unit top eigenvector of S = B B^T (eigenvalue 1)
  Vec w(n);
  {
    double norm = 0.0;
    for (int x = 0; x < n; ++x) norm += mu[x];
    norm = std::sqrt(norm);
    for (int x = 0; x < n; ++x) w[x] = sqmu[x] / norm;
  }
  auto deflate = [&](Vec& v) {
    double dot = 0.0;
    for (int x = 0; x < n; ++x) dot += w[x] * v[x];
    for (int x = 0; x < n; ++x) v[x] -= dot * w[x];
  };
  auto apply_S = [&](const Vec& v, Vec& bt, Vec& out) {
    // bt = B^T v, out = B bt; both touch only the nonzeros of K
    std::fill(bt.begin(), bt.end(), 0.0);
    for (int x = 0; x < n; ++x) {
      double vx = sqmu[x] * v[x];
      if (vx == 0.0) continue;
      const double* kx = K.rows.row(x);
      for (int y = 0; y < n; ++y)
        if (kx[y] != 0.0) bt[y] += vx * kx[y] * isqmup[y];
    }
    for (int x = 0; x < n; ++x) {
      const double* kx = K.rows.row(x);
      double s = 0.0;
      for (int y = 0; y < n; ++y)
        if (kx[y] != 0.0) s += kx[y] * isqmup[y] * bt[y];
      out[x] = sqmu[x] * s;
    }
  };
  SplitMix64 rng(0x5eedu);
  Vec v(n), bt(n), u(n);
  for (double& x : v) x = rng.normal();
  deflate(v);
  double nv = 0.0;
  for (double x : v) nv += x * x;
  nv = std::sqrt(nv);
  if (nv < 1e-30) return 0.0;
  for (double& x : v) x /= nv;
  double lambda = 0.0;
  int steady = 0;
  for (int iter = 0; iter < 200000; ++iter) {
    apply_S(v, bt, u);
    deflate(u);
    double dot = 0.0, nu = 0.0;
    for (int x = 0; x < n; ++x) {
      dot += v[x] * u[x];
      nu += u[x] * u[x];
    }
    nu = std::sqrt(nu);
    if (nu < 1e-300) return 0.0;  // deflated operator is (numerically) zero
    double prev = lambda;
    lambda = dot;
    for (int x = 0; x < n; ++x) v[x] = u[x] / nu;
    if (std::fabs(lambda - prev) <= 1e-14 * std::max(1.0, lambda)) {
      if (++steady >= 4) break;
    } else {
      steady = 0;
    }
  }
  return std::sqrt(std::clamp(lambda, 0.0, 1.0));
}

double sigma1(const Kernel& K, const Measure& mu) {
  if (K.size() <= 64) {
    SpectralReport rep = singular_values(K, mu);
    return (K.size() >= 2) ? rep.sigma[1] : 0.0;
  }
  return sigma1_iterative(K, mu);
}

double singular_product_bound(const Schedule& s, const Measure& mu0, long n) {
  require(mu0.size() == s.size(), errc::SizeMismatch, "mu0 on a different space");
  require(n >= 0 && n <= s.horizon, errc::RangeViolation, "step range outside horizon");
  require(mu0.positive, errc::ZeroReference, "mu0 must be positive");
  double prod = 1.0;
  Measure mu = mu0;
  for (long i = 1; i <= n; ++i) {
    const Kernel& Ki = s.at_step(i);
    prod *= sigma1(Ki, mu);
    mu = push_forward(mu, Ki);
    if (prod == 0.0) break;
  }
  return prod;
}

}  // namespace imc
