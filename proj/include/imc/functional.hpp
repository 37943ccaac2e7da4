#pragma once
#include <cstdint>
#include <string>

#include "imc/markov.hpp"

namespace imc {

// L(f^2, nu) = sum_x f(x)^2 log(f(x)^2 / ||f||^2_{l2(nu)}) nu(x), with 0 log 0 := 0.
// Nonnegative; zero exactly when |f| is constant.
double l2_entropy(const Vec& f, const Measure& nu);

// sum_x mu(x) log(mu(x)/nu(x)); nu must be positive, mu may vanish anywhere
double relative_entropy(const Measure& mu, const Measure& nu);

enum class EstimateKind { exact_small, multistart_numeric, comparison_lower_bound };
const char* estimate_kind_name(EstimateKind k);

struct LogSobolevEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::multistart_numeric;
  Vec witness;  // nonconstant minimizer achieving value; only for multistart-numeric
};

// E(f,f)/L(f^2,pi); caller guarantees (P,pi) reversible and |f| nonconstant
double ls_ratio(const Kernel& P, const Measure& pi, const Vec& f);

// E(f^2, log f^2)/L(f^2,pi) for nonvanishing f
double mls_ratio(const Kernel& P, const Measure& pi, const Vec& f);

// l(P) = inf E(f,f)/L(f^2,pi). Two states: closed form (exact-small). More:
// multistart projected gradient; the result is a certified upper bound on the
// infimum, witnessed by the minimizing f.
LogSobolevEstimate log_sobolev_constant(const Kernel& P, const Measure& pi);

// l'(P) = inf E(f^2, log f^2)/L(f^2,pi) over positive f, same reporting scheme
LogSobolevEstimate mls_constant(const Kernel& P, const Measure& pi);

// wrap an externally proven lower bound (comparison argument) as an estimate
LogSobolevEstimate comparison_bound(double value);

// largest alpha with Ent_{nuK}(mu K) <= (1-alpha) Ent_nu(mu), estimated from
// above by sampling mu (all point masses plus seeded random draws)
double entropy_contraction(const Kernel& K, const Measure& nu, long samples);

// g(q,nu) = ((1+nu)^q - 1 - q nu)/((1+nu)^{q/2} - 1)^2 >= 1; series near nu=0
double g_function(double q, double nu);

// max over positive entries of 1/K(x,y) - 1
double nu_of_kernel(const Kernel& K);

// phi(x) - (2/(1-log 2)) phi(x/2) with phi(x) = (1+x)log(1+x) - x, phi(-1) := 1;
// nonpositive on [-1, infinity)
double phi_gap(double x);

// log 2 * (1 - log 2) / 2, the proven universal entropy-contraction factor
double rho_lower_bound();

struct NashParams {
  double C = 0.0;  // > 0
  double D = 0.0;  // > 0, dimension-like exponent
  long N = 1;      // >= 1, time cutoff
};

struct Certificate {
  std::string kind;
  double value = 0.0;  // max observed ratio / norm quotient
  Vec witness;         // maximizing function
  long trials = 0;
  uint64_t seed = 0;
  bool pass = false;
};

// ||f||_2^{2+1/D} / ((E(f,f) + ||f||_2^2/N) ||f||_1^{1/D}), norms in pi
double nash_ratio(const Kernel& P, const Measure& pi, const NashParams& params, const Vec& f);

// falsifier for ||f||_2^{2+1/D} <= C (E(f,f) + ||f||_2^2/N) ||f||_1^{1/D}:
// sweeps point masses, metric-ball indicators, eigenfunction snippets, and
// seeded random signed functions. FAIL (with witness) is conclusive; PASS
// reports the best constant seen, a certified lower bound on the true one.
Certificate nash_certify(const Kernel& P, const Measure& pi, const NashParams& params,
                         long trials);

// spot-checks ||Kf||_{l^q(mu)} <= ||f||_{l^{q0}(mu K)} at q = (1 + l_hat) q0,
// where l_hat is the numeric log-Sobolev constant of K*K
Certificate hypercontractivity_check(const Kernel& K, const Measure& mu, double q0,
                                     long trials);

}  // namespace imc
