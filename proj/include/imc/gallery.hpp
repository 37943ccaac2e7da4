#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "imc/markov.hpp"

namespace imc {

// a documented numeric fact about an instance; provenance is one of
// "exact" (closed form), "bound" (one-sided guarantee), "numeric" (estimate)
struct NamedConstant {
  std::string name;
  double value = 0.0;
  std::string provenance;
  std::string note;
};

struct GalleryInstance {
  std::string family;
  std::map<std::string, double> params;
  std::vector<Kernel> kernels;
  std::vector<Measure> measures;
  std::vector<NamedConstant> constants;
  std::vector<std::string> notes;

  const Kernel& kernel() const { return kernels.at(0); }
  const Measure& measure() const { return measures.at(0); }
  bool has_constant(const std::string& name) const;
  double constant(const std::string& name) const;  // BadInput when absent
};

// circle walk with the +-delta row perturbation at vertex 0
GalleryInstance circle(long p_N, double delta, bool lazy_walk);

enum class BdFamily { hat, check };

// Metropolis chain on {-N..N} for the target (N-|x|+1)^alpha (hat) or
// (|x|+1)^alpha (check); base walk holds 1/3 inside and 2/3 at the ends
GalleryInstance metropolis_bd(double alpha, long N, BdFamily family);

// walk on {0,1}^{2N} with the middle Hamming level biased up by delta
GalleryInstance hypercube(long two_N, double delta, bool lazy_walk);

// transpose position i with a random position, on S_n; the identity
// swap (i,i) is included, so every row carries mass 1/n at itself
GalleryInstance transpose_i_random(long n, long i, bool lazy_walk);

// seeded random symmetric kernel inside the entrywise envelope
// (1-eps) Q_i <= K <= (1+eps) Q_i, rows repaired through the diagonal
GalleryInstance symmetric_perturbation(long n, long i, double epsilon, uint64_t seed);

// holding delta added at permutation rho, taken off its transposition
// moves; member i is the base kernel conjugated by the n-cycle i-1 times.
// measures[0] is the family reference measure (invariant of the relabeled
// base kernel), measures[1] the uniform measure
GalleryInstance sticky_permutation(long n, long rho_index, double delta, long i);

// permutation utilities (lexicographic rank order, n <= 6);
// composition convention: (a*b)(k) = a(b(k))
std::vector<std::vector<int>> all_permutations(int n);
std::vector<int> permutation_compose(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> permutation_inverse(const std::vector<int>& a);
long permutation_rank(const std::vector<int>& p);

// sum_{i=0}^{N} (1+i)^{-alpha}
double zeta_alpha(double alpha, long N);

}  // namespace imc
