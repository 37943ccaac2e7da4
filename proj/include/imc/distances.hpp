#pragma once
#include <limits>
#include <vector>

#include "imc/markov.hpp"

namespace imc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// half the l1 difference
double tv_distance(const Measure& mu, const Measure& nu);

// d_p(nu, mu) = (sum_y |nu(y)/mu(y) - 1|^p mu(y))^(1/p); asymmetric in (nu, mu).
// p in [1, inf]; d_1 = 2 TV, d_inf = max ratio deviation.
double dp_distance(const Measure& nu, const Measure& mu, double p);

// weighted l^p norm of a function
double lp_norm(const Vec& f, const Measure& mu, double p);

// max over ordered row pairs (x,y) and states z of |K(x,z)/K(y,z) - 1|,
// with 0/0 := 1 and a/0 := infinity. infinity is a legal return.
double relsup_pairwise(const Kernel& K0n);
double relsup_pairwise(const Matrix& rows);

// max over row pairs of the total variation distance
double tv_pairwise(const Kernel& K0n);
double tv_pairwise(const Matrix& rows);

// max over rows x of d_p(row x, mun); rows need not be revalidated
double max_dp_rows(const Matrix& K0n, const Measure& mun, double p);

// converts a center bound max_x d_inf(K(x,.), mu_n) <= eps <= 1/2 into the
// pairwise guarantee 4 eps
double center_to_pairwise(double eps);

// exact merging-time oracle output; step k+1 lives at index k
struct MergingReport {
  std::string kind;                // "tv" or "relsup": which sequence drove the crossings
  std::vector<double> max_tv;      // per-step max pairwise TV
  std::vector<double> max_relsup;  // per-step max pairwise relative-sup deviation
  std::vector<double> thresholds;
  std::vector<long> crossing;      // first n with driving value < threshold; -1 if never
  long horizon = 0;                // last step evaluated

  long first_crossing() const { return crossing.empty() ? -1 : crossing.front(); }
};

// iterates K_{0,n} one kernel at a time and reports the first n at which the
// driving distance drops strictly below each threshold
MergingReport merging_time_tv(const Schedule& s, const std::vector<double>& thresholds,
                              long horizon);
MergingReport merging_time_relsup(const Schedule& s, const std::vector<double>& thresholds,
                                  long horizon);
MergingReport merging_time_tv(const Schedule& s, double eps, long horizon);
MergingReport merging_time_relsup(const Schedule& s, double eps, long horizon);

long default_horizon(int size);  // 50 * size^2

// ||A||_{l^p(nu) -> l^q(mu)} for (A f)(x) = sum_y A(x,y) f(y), via the
// endpoint closed forms; supported (p,q): (1,1),(1,2),(1,inf),(2,2),(2,inf),(inf,inf)
double operator_norm(const Matrix& A, const Measure& nu, const Measure& mu, double p, double q);

// kernel convenience: domain weight is mu K, range weight is mu
double operator_norm(const Kernel& K, const Measure& mu, double p, double q);

}  // namespace imc
