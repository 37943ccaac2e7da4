#pragma once
#include <string>
#include <vector>

#include "imc/functional.hpp"
#include "imc/markov.hpp"

namespace imc {

// one evaluated bound traced along a schedule, next to the exact oracle
// value it is supposed to dominate. slack = bound - exact per step; the
// domination property is min slack >= -1e-8 when every input is exact.
struct BoundReport {
  std::string theorem;                  // short id of the bound evaluated
  std::vector<long> steps;              // n values, one per row
  std::vector<double> bound;            // bound value per step
  std::vector<double> exact;            // oracle value per step
  std::vector<std::string> hypotheses;  // which inputs were exact vs numeric
  long burnin = 0;                      // threshold (m or m_x) used, if any

  std::vector<double> slack() const;
  double min_slack() const;
};

// d2-and-sup bound pair; sup is +inf when n < 2m leaves no admissible split
struct MergingBound {
  double d2 = 0.0;
  double sup = 0.0;
};

// iterated-norm decay from a Nash inequality alone:
// (4CB/(n-m+1))^D with B = (1+1/N)(1+ceil(4D)), for 0 <= m <= n <= N.
// Bounds both the l^1(mu_n)->l^2(mu_m) and l^2(mu_n)->l^inf(mu_m) norms.
double nash_norm_bound(const NashParams& params, long n, long m);

// Nash prefactor times singular-value product:
//   d2:  (8C(1+ceil(4D))/(m+1))^D  * prod_{i=m+1}^{n}   sigma[i-1]
//   sup: (8C(1+ceil(4D))/(m+1))^2D * prod_{i=m+1}^{m+u} sigma[i-1], n = 2m+u
// sigmas[i-1] = sigma_1(K_i, mu_{i-1}), the step kernel against the running
// measure. Requires m < n <= params.N and sigmas covering the range.
MergingBound nash_d2_bound(const NashParams& params, const std::vector<double>& sigmas,
                           long n, long m);

// same shape under c-stability w.r.t. a fixed mu_0: prefactor picks up
// c^(2+3/(2D)) and each factor becomes (1 - (1-sigma0^2)/c^2)^(1/2), with
// sigmas0[i-1] = sigma(K_i, mu_0) measured against the FIXED mu_0.
MergingBound nash_stab_bound(const NashParams& params, double c,
                             const std::vector<double>& sigmas0, long n, long m);

// family version: each kernel measured against its own invariant measure
// pi_i; prefactor c^(4+3/D), discount (1 - (1-sigma_pi^2)/c^4)^(1/2).
MergingBound nash_stab2_bound(const NashParams& params, double c,
                              const std::vector<double>& sigmas_pi, long n, long m);

// smallest t with sum_{i=1}^t log(1 + ls[i-1]) >= log log(mu0x^{-1/2});
// 0 when mu0x >= e^{-2} makes the target nonpositive. Pass discounted
// constants c^{-2} l or c^{-4} l for the c-stable variants.
long ls_threshold(const std::vector<double>& ls_constants, double mu0x);

// log-Sobolev burn-in bound on the SQUARED distance:
//   d2(K_{0,n}(x,.), mu_n)^2 <= e^2 prod_{i=m_x+1}^n sigma[i-1]^2, n >= m_x
double ls_d2_bound(const std::vector<double>& ls_constants, const std::vector<double>& sigmas,
                   double mu0x, long n);

struct LsSupBound {
  double bound = 0.0;  // e^2 prod_{i=m+1}^{n-m} sigma[i-1]
  long m0 = 0;         // forward threshold from l(P_i) and min mu_0
  long mn = 0;         // backward threshold from l(Pcheck_i) and min mu_n
  long m = 0;          // max(m0, mn)
};

// two-sided burn-in bound on max_{x,y} |K_{0,n}(x,y)/mu_n(y) - 1|;
// needs n >= 2 max(m0, mn) or HorizonTooShort
LsSupBound ls_sup_bound(const std::vector<double>& ls_P, const std::vector<double>& ls_Pcheck,
                        const std::vector<double>& sigmas, double mu0_min, double mun_min,
                        long n);

// chained contraction falsifier: with q = q0 prod_{i<=n} (1 + lhat(P_i)),
// samples positive f and checks |K_{0,n} f|_{l^q(mu_0)} <= |f|_{l^{q0}(mu_n)}
Certificate cor_sob_norm_check(const Schedule& s, const Measure& mu0, double q0, long n,
                               long trials = 500);

// pairwise-TV decay from modified log-Sobolev constants of Pcheck_i:
//   sqrt(2) (log 1/mu0_min)^{1/2} prod_{i=1}^n (1 - rho * mls[i-1])^{1/2}
double entropy_tv_bound(const std::vector<double>& mls_constants, double rho, double mu0_min,
                        long n);
double entropy_tv_bound(const std::vector<double>& mls_constants, double mu0_min, long n);

}  // namespace imc
