#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "imc/functional.hpp"
#include "imc/markov.hpp"

namespace imc {

// observed_c = max over checked steps n and states x of
// max(mu_n(x)/mu_0(x), mu_0(x)/mu_n(x)); always >= 1
struct StabilityCertificate {
  Measure mu0;
  double observed_c = 1.0;
  long horizon = 0;
  std::string schedules_checked;  // count, or "exhaustive-to-depth-d"
  std::string mode;               // single-schedule / exhaustive / envelope / sampled
  std::vector<int> witness;       // kernel index sequence achieving observed_c
};

// exact ratio sweep along one schedule, steps 0..horizon
StabilityCertificate check_c_stability(const Schedule& s, const Measure& mu0, long horizon);

enum class SearchMode { exhaustive, envelope, sampled };

// exhaustive: every kernel sequence up to the horizon (horizon <= depth_cap,
//   |set| <= 4); exact over the declared depth, witness replayable.
// envelope: per-state interval images unioned over kernels; certified upper
//   bound on observed_c, never a violation witness.
// sampled: seeded random schedules, witness = worst sampled sequence.
StabilityCertificate search_c_stability(const std::vector<Kernel>& kernel_set,
                                        const Measure& mu0, long horizon, SearchMode mode,
                                        long depth_cap = 10, long samples = 200,
                                        uint64_t seed = 0x57ab1eULL);

// Signed circle layout on p points: array index i is the point i for
// i <= p/2 and i - p otherwise; negation is index (p - i) % p.
struct SNClassCoefficients {
  double epsilon = 0.0;
  long p_N = 0;
  Vec a;  // mu[i] - 1/p per array index
};

// centered-offset class on the circle: offsets antisymmetric under negation
// and |a| <= 2*epsilon/p. Throws NotMember naming the violated condition.
SNClassCoefficients sn_class(const Measure& mu, double epsilon);

// randomized closure check: random member measure, random delta in
// [-epsilon, epsilon], asserts the pushforward stays in the class.
// value = worst coefficient saturation (|a| relative to the class bound;
// absolute when the bound is zero). corrupted moves the row perturbation
// from the middle vertex to its neighbor; expected to FAIL.
Certificate sn_closure_check(long p, double epsilon, long trials, bool corrupted = false,
                             uint64_t seed = 0x57ab1eULL);

// Hamming-level offsets for measures on {0,1}^{2N}: a[k] is the common
// offset of level k from 4^{-N}, k = 0..2N
struct S2NCertificate {
  double epsilon = 0.0;
  long N = 0;
  Vec a;
};

// level-constant class on the hypercube: middle level pinned at 4^{-N},
// level offsets antisymmetric about the middle, |a| <= epsilon/4^N.
// Throws NotMember naming the violated condition; TooLarge for 2N > 12.
S2NCertificate s2n_class(const Measure& mu, double epsilon, long N);

// randomized closure check plus the stability envelope: also certifies
// observed_c <= (1+epsilon)/(1-epsilon) along each sampled trajectory.
// corrupted moves the perturbation one Hamming level up (renormalized);
// expected to FAIL.
Certificate s2n_closure_check(double epsilon, long N, long trials, bool corrupted = false,
                              uint64_t seed = 0x57ab1eULL);

// Linear birth-and-death layout on {-N..N}: array index i is the point i-N.
struct BdPerturbation {
  Kernel kernel;  // Q + Delta_s
  Measure nu_s;   // exact reversible measure of the perturbed kernel
  double c = 1.0; // (q0+|s|)/(q0-|s|)
};

// middle-vertex perturbation of a symmetric birth-and-death kernel:
// Delta_s(0,1) = s, Delta_s(0,-1) = -s, |s| < q0 = Q(0,1).
// nu_s(0) = nu(0), nu_s(+-x) = nu(+-x)(1 +- s/q0).
BdPerturbation bd_perturbation_stability(const Kernel& Q, const Measure& nu, double s);

}  // namespace imc
