#include "imc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "imc/errors.hpp"
#include "imc/linalg.hpp"
#include "imc/rng.hpp"

namespace imc {

StateSpace make_space(int size) {
  require(size >= 1, errc::BadInput, "state space needs at least one state");
  return StateSpace{size, {}};
}

StateSpace make_space(int size, std::vector<std::string> labels) {
  StateSpace sp = make_space(size);
  if (!labels.empty()) {
    require(static_cast<int>(labels.size()) == size, errc::BadInput,
            "label count must match state count");
    std::set<std::string> uniq(labels.begin(), labels.end());
    require(static_cast<int>(uniq.size()) == size, errc::BadInput, "labels must be unique");
    sp.labels = std::move(labels);
  }
  return sp;
}

double Measure::min_weight() const {
  double m = weights.empty() ? 0.0 : weights[0];
  for (double w : weights) m = std::min(m, w);
  return m;
}

Measure make_measure(const StateSpace& space, Vec weights) {
  require(static_cast<int>(weights.size()) == space.size, errc::SizeMismatch,
          "measure length must match state count");
  double sum = 0.0;
  bool positive = true;
  for (size_t x = 0; x < weights.size(); ++x) {
    require(weights[x] >= 0.0, errc::NegativeEntry,
            "measure entry " + std::to_string(x) + " is negative");
    positive = positive && weights[x] > 0.0;
    sum += weights[x];
  }
  require(std::fabs(sum - 1.0) <= kSumTol, errc::RowSumViolation,
          "measure mass deviates from 1 by " + std::to_string(sum - 1.0));
  return Measure{space, std::move(weights), positive};
}

Measure make_measure(Vec weights) {
  StateSpace sp = make_space(static_cast<int>(weights.size()));
  return make_measure(sp, std::move(weights));
}

Measure uniform_measure(int size) {
  return make_measure(Vec(size, 1.0 / size));
}

Measure point_mass(int size, int x) {
  require(x >= 0 && x < size, errc::BadInput, "point mass site out of range");
  Vec w(size, 0.0);
  w[x] = 1.0;
  return make_measure(std::move(w));
}

Kernel validate_kernel(const StateSpace& space, const Matrix& rows) {
  require(rows.n == rows.m, errc::SizeMismatch, "kernel matrix must be square");
  require(rows.n == space.size, errc::SizeMismatch, "kernel size must match state count");
  for (int x = 0; x < rows.n; ++x) {
    double sum = 0.0;
    for (int y = 0; y < rows.m; ++y) {
      require(rows(x, y) >= 0.0, errc::NegativeEntry,
              "entry (" + std::to_string(x) + "," + std::to_string(y) + ") is negative");
      sum += rows(x, y);
    }
    require(std::fabs(sum - 1.0) <= kSumTol, errc::RowSumViolation,
            "row " + std::to_string(x) + " deviates from 1 by " + std::to_string(sum - 1.0));
  }
  return Kernel{space, rows};
}

Kernel validate_kernel(const Matrix& rows) {
  require(rows.n >= 1, errc::BadInput, "empty kernel");
  return validate_kernel(make_space(rows.n), rows);
}

Measure push_forward(const Measure& mu, const Kernel& K) {
  require(mu.size() == K.size(), errc::SizeMismatch, "measure/kernel size mismatch");
  Vec w = vecmat(mu.weights, K.rows);
  // renormalize away accumulated rounding so long evolutions stay valid measures
  double sum = 0.0;
  for (double& v : w) {
    if (v < 0.0 && v > -1e-15) v = 0.0;
    sum += v;
  }
  for (double& v : w) v /= sum;
  return make_measure(mu.space, std::move(w));
}

const char* rule_name(ScheduleRule r) {
  switch (r) {
    case ScheduleRule::fixed_cycle: return "fixed-cycle";
    case ScheduleRule::seeded_random: return "seeded-random";
    case ScheduleRule::explicit_index_sequence: return "explicit-index-sequence";
  }
  return "unknown";
}

ScheduleRule rule_from_name(const std::string& name) {
  if (name == "fixed-cycle") return ScheduleRule::fixed_cycle;
  if (name == "seeded-random") return ScheduleRule::seeded_random;
  if (name == "explicit-index-sequence") return ScheduleRule::explicit_index_sequence;
  fail(errc::BadInput, "unknown schedule rule '" + name + "'");
}

int Schedule::index_at_step(long i) const {
  require(i >= 1 && i <= horizon, errc::RangeViolation,
          "step " + std::to_string(i) + " outside schedule horizon");
  const int k = static_cast<int>(kernels.size());
  switch (rule) {
    case ScheduleRule::fixed_cycle:
      return static_cast<int>((i - 1) % k);
    case ScheduleRule::seeded_random:
      return static_cast<int>(SplitMix64::at(seed, static_cast<uint64_t>(i - 1)) %
                              static_cast<uint64_t>(k));
    case ScheduleRule::explicit_index_sequence:
      return indices.at(static_cast<size_t>(i - 1));
  }
  fail(errc::BadInput, "unreachable schedule rule");
}

Schedule make_schedule(std::vector<Kernel> kernels, ScheduleRule rule, uint64_t seed,
                       long horizon, std::vector<int> indices) {
  require(!kernels.empty(), errc::BadInput, "schedule needs at least one kernel");
  const int size = kernels.front().size();
  for (const Kernel& K : kernels)
    require(K.size() == size, errc::SizeMismatch, "schedule kernels must share one space");
  require(horizon >= 0, errc::BadInput, "horizon must be nonnegative");
  if (rule == ScheduleRule::explicit_index_sequence) {
    require(static_cast<long>(indices.size()) >= horizon, errc::BadInput,
            "explicit index sequence shorter than horizon");
    for (int ix : indices)
      require(ix >= 0 && ix < static_cast<int>(kernels.size()), errc::RangeViolation,
              "schedule index out of range");
  }
  return Schedule{std::move(kernels), rule, seed, std::move(indices), horizon};
}

Schedule constant_schedule(Kernel K, long horizon) {
  return make_schedule({std::move(K)}, ScheduleRule::fixed_cycle, 0, horizon);
}

Schedule list_schedule(std::vector<Kernel> kernels) {
  const long h = static_cast<long>(kernels.size());
  std::vector<int> idx(kernels.size());
  for (size_t i = 0; i < kernels.size(); ++i) idx[i] = static_cast<int>(i);
  return make_schedule(std::move(kernels), ScheduleRule::explicit_index_sequence, 0, h,
                       std::move(idx));
}

Kernel compose(const Schedule& s, long n, long m) {
  require(n <= m, errc::IndexOrder,
          "compose wants n <= m, got n=" + std::to_string(n) + " m=" + std::to_string(m));
  require(n >= 0 && m <= s.horizon, errc::RangeViolation, "compose range outside horizon");
  Matrix P = Matrix::identity(s.size());
  for (long i = n + 1; i <= m; ++i) P = matmul(P, s.at_step(i).rows);
  // row sums drift by ~eps per multiply; repair before revalidating
  for (int x = 0; x < P.n; ++x) {
    double sum = 0.0;
    double* px = P.row(x);
    for (int y = 0; y < P.m; ++y) {
      if (px[y] < 0.0 && px[y] > -1e-15) px[y] = 0.0;
      sum += px[y];
    }
    for (int y = 0; y < P.m; ++y) px[y] /= sum;
  }
  return validate_kernel(s.kernels.front().space, P);
}

std::vector<Measure> evolve(const Measure& mu0, const Schedule& s, long n) {
  require(mu0.size() == s.size(), errc::SizeMismatch, "mu0 on a different space");
  require(n >= 0 && n <= s.horizon, errc::RangeViolation, "evolution horizon exceeded");
  std::vector<Measure> out;
  out.reserve(static_cast<size_t>(n) + 1);
  out.push_back(mu0);
  for (long i = 1; i <= n; ++i) out.push_back(push_forward(out.back(), s.at_step(i)));
  return out;
}

bool is_irreducible(const Kernel& K) {
  const int n = K.size();
  // strong connectivity of the positive-entry digraph: forward and backward
  // reachability from state 0
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y) {
        double w = forward ? K(x, y) : K(y, x);
        if (w > 0.0 && !seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
    return seen;
  };
  auto fwd = reach(true), bwd = reach(false);
  for (int x = 0; x < n; ++x)
    if (!fwd[x] || !bwd[x]) return false;
  return true;
}

Measure invariant_measure(const Kernel& K) {
  require(is_irreducible(K), errc::Reducible, "kernel graph is not strongly connected");
  const int n = K.size();
  if (n == 1) return make_measure(K.space, {1.0});
  // pi K = pi plus normalization: rows of (K^T - I), last row replaced by ones
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = K(j, i) - (i == j ? 1.0 : 0.0);
  Vec b(n, 0.0);
  for (int j = 0; j < n; ++j) A(n - 1, j) = 1.0;
  b[n - 1] = 1.0;
  Vec pi = solve_linear(std::move(A), std::move(b));
  double sum = 0.0;
  for (double& v : pi) {
    if (v < 0.0 && v > -1e-13) v = 0.0;
    sum += v;
  }
  for (double& v : pi) v /= sum;
  Measure out = make_measure(K.space, std::move(pi));
  // defensive: verify the fixed point to the library tolerance
  Vec img = vecmat(out.weights, K.rows);
  for (int x = 0; x < n; ++x)
    require(std::fabs(img[x] - out.weights[x]) <= kBalanceTol, errc::Reducible,
            "invariant measure residual too large");
  return out;
}

ReversibilityCheck check_reversible(const Kernel& K, const Measure& pi) {
  require(pi.size() == K.size(), errc::SizeMismatch, "measure/kernel size mismatch");
  require(pi.positive, errc::ZeroReference, "reversibility check needs a positive measure");
  double worst = 0.0;
  for (int x = 0; x < K.size(); ++x)
    for (int y = x + 1; y < K.size(); ++y)
      worst = std::max(worst, std::fabs(pi[x] * K(x, y) - pi[y] * K(y, x)));
  return ReversibilityCheck{worst <= kBalanceTol, worst};
}

Kernel lazy(const Kernel& K) {
  Matrix rows = K.rows;
  for (int x = 0; x < rows.n; ++x) {
    for (int y = 0; y < rows.m; ++y) rows(x, y) *= 0.5;
    rows(x, x) += 0.5;
  }
  return Kernel{K.space, std::move(rows)};
}

}  // namespace imc
