#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "imc/matrix.hpp"

namespace imc {

// tolerances shared across the library
inline constexpr double kSumTol = 1e-12;      // row sums, probability mass
inline constexpr double kBalanceTol = 1e-10;  // detailed balance, invariance

struct StateSpace {
  int size = 0;
  std::vector<std::string> labels;  // empty, or one unique label per state
};

StateSpace make_space(int size);
StateSpace make_space(int size, std::vector<std::string> labels);

// positive probability vector guard: positive == every entry > 0
struct Measure {
  StateSpace space;
  Vec weights;
  bool positive = false;

  int size() const { return static_cast<int>(weights.size()); }
  double operator[](int x) const { return weights[x]; }
  double min_weight() const;
};

Measure make_measure(const StateSpace& space, Vec weights);
Measure make_measure(Vec weights);
Measure uniform_measure(int size);
Measure point_mass(int size, int x);

// row-stochastic matrix; doubles as the operator f -> Kf between weighted
// l^p spaces
struct Kernel {
  StateSpace space;
  Matrix rows;

  int size() const { return rows.n; }
  double operator()(int x, int y) const { return rows(x, y); }
};

// rejects negative entries and row sums off 1 by more than 1e-12
Kernel validate_kernel(const Matrix& rows);
Kernel validate_kernel(const StateSpace& space, const Matrix& rows);

// image measure mu' = mu K
Measure push_forward(const Measure& mu, const Kernel& K);

enum class ScheduleRule { fixed_cycle, seeded_random, explicit_index_sequence };

const char* rule_name(ScheduleRule r);
ScheduleRule rule_from_name(const std::string& name);

// a deterministic adversary: kernel set plus a reproducible selection rule.
// step i (1-based) drives mu_{i-1} -> mu_i.
struct Schedule {
  std::vector<Kernel> kernels;
  ScheduleRule rule = ScheduleRule::fixed_cycle;
  uint64_t seed = 0;
  std::vector<int> indices;  // explicit_index_sequence only
  long horizon = 0;

  int size() const { return kernels.at(0).size(); }
  int index_at_step(long i) const;
  const Kernel& at_step(long i) const { return kernels[index_at_step(i)]; }
};

Schedule make_schedule(std::vector<Kernel> kernels, ScheduleRule rule, uint64_t seed,
                       long horizon, std::vector<int> indices = {});
// single-kernel constant schedule
Schedule constant_schedule(Kernel K, long horizon);
// explicit list played once; horizon = list length
Schedule list_schedule(std::vector<Kernel> kernels);

// K_{n,m} = K_{n+1} ... K_m ; compose(s, n, n) = identity
Kernel compose(const Schedule& s, long n, long m);

// mu_0 .. mu_n with mu_k = mu_{k-1} K_k
std::vector<Measure> evolve(const Measure& mu0, const Schedule& s, long n);

// unique invariant probability of an irreducible kernel (dense linear solve)
Measure invariant_measure(const Kernel& K);

bool is_irreducible(const Kernel& K);

struct ReversibilityCheck {
  bool reversible;
  double max_violation;  // max |pi(x)K(x,y) - pi(y)K(y,x)|
};
ReversibilityCheck check_reversible(const Kernel& K, const Measure& pi);

// (I + K) / 2
Kernel lazy(const Kernel& K);

}  // namespace imc
