#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "imc/bounds.hpp"
#include "imc/distances.hpp"
#include "imc/gallery.hpp"
#include "imc/io.hpp"
#include "imc/spectral.hpp"
#include "imc/stability.hpp"

namespace imc {

// validated flat config. The raw key=value map is kept verbatim so a config
// round-trips through emission unchanged; family-specific scalars stay in the
// raw map and are read by the instance builder.
//
// Key set:
//   family            circle | metropolis-bd-hat | metropolis-bd-check |
//                     hypercube | transpose-i-random | symmetric-perturbation |
//                     sticky-permutation
//   p_N,N,two_N,n     size parameter, family-specific name
//   alpha,delta,epsilon,i,rho,seed,lazy   family scalars
//   variants          comma list building one kernel per entry:
//                     circle/hypercube -> delta, metropolis -> birth-death
//                     perturbation s (0 = base), transpose/sticky -> member i,
//                     symmetric-perturbation -> sampler seed
//   schedule_rule     fixed-cycle | seeded-random | explicit-index-sequence
//   schedule_seed     selection seed (seeded-random)
//   horizon           steps; 0 or absent uses default_horizon(size)
//   indices           comma list of kernel indices (explicit rule)
//   analyses          nonempty subset of merging,spectral,stability,bounds
//   bounds            subset of sigma-product,nash,nash-stab,nash-stab2,
//                     ls,ls-sup,entropy (required by the bounds analysis)
//   eps, eta          TV / relative-sup merging thresholds (default 0.25)
//   assert_c          stability analysis fails when observed_c exceeds this
//   bound_steps       trace length cap for bound traces (default <= 60)
//   spectral_steps    sigma profile length cap (default <= 100)
//   trials            sampling budget for certificates (default 500)
//   budget            adversary search budget (default 200)
//   metric            adversary target: tv | relsup (default relsup)
//   out_dir           default output directory; CLI --out overrides
struct ExperimentConfig {
  Config raw;
  std::string family;
  std::vector<double> variants;  // empty: single kernel from the scalar params
  ScheduleRule rule = ScheduleRule::fixed_cycle;
  uint64_t schedule_seed = 1;
  long horizon = 0;  // 0: default for the state space size
  std::vector<int> indices;
  std::vector<std::string> analyses;
  std::vector<std::string> bound_ids;
  double eps = 0.25;
  double eta = 0.25;
  double assert_c = 0.0;  // 0: no assertion
  long bound_steps = 0;   // 0: default
  long spectral_steps = 0;
  long trials = 500;
  long budget = 200;
  std::string metric = "relsup";
  std::string out_dir;
};

ExperimentConfig experiment_config(const Config& raw);

// everything a run produced: named file contents plus the structured
// results behind them. pass reflects every assertion the run made.
struct RunBundle {
  std::vector<std::pair<std::string, std::string>> files;
  MergingReport merging_tv;
  MergingReport merging_relsup;
  std::vector<double> sigma_profile;
  StabilityCertificate stability;
  std::vector<BoundReport> bounds;
  bool ran_merging = false;
  bool ran_spectral = false;
  bool ran_stability = false;
  bool pass = true;
  std::vector<std::string> failures;
};

RunBundle run(const ExperimentConfig& cfg);

// bound families ranked by tightness ratio bound/exact, best first,
// evaluated at the exact TV merging time (clamped into the traced range)
struct BoundRanking {
  std::vector<std::string> ids;
  std::vector<double> tightness;
  std::vector<double> min_slack;
  long at_step = 0;
  std::string table_csv;
  bool pass = true;
};

BoundRanking compare_bounds(const ExperimentConfig& cfg);

// randomized worst-schedule search: maximizes the merging time over index
// sequences and runs the sampled stability search alongside
struct AdversaryResult {
  Schedule worst;          // explicit-index-sequence, replayable
  long worst_merging = 0;  // crossing for the worst schedule; horizon+1 if never
  StabilityCertificate stability;
  std::string summary_json;
  bool pass = true;
};

AdversaryResult adversary(const ExperimentConfig& cfg);

// writes every bundle file under dir (creating it), returns the paths written
std::vector<std::string> write_bundle(const RunBundle& bundle, const std::string& dir);

}  // namespace imc
