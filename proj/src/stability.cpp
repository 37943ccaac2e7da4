#include "imc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "imc/errors.hpp"
#include "imc/rng.hpp"

namespace imc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMemberTol = 1e-12;  // rounding slack on class membership

// max over states of max(mu/mu0, mu0/mu); mu0 positive, mu may touch zero
double ratio_to_base(const Vec& mu, const Measure& mu0) {
  double worst = 1.0;
  for (int x = 0; x < mu0.size(); ++x) {
    if (mu[x] <= 0.0) return kInf;
    worst = std::max(worst, std::max(mu[x] / mu0[x], mu0[x] / mu[x]));
  }
  return worst;
}

void require_compatible(const std::vector<Kernel>& set, const Measure& mu0) {
  require(!set.empty(), errc::BadInput, "kernel set must be nonempty");
  require(mu0.positive, errc::BadInput, "base measure must be positive");
  for (const Kernel& K : set)
    require(K.size() == mu0.size(), errc::SizeMismatch, "kernel size != measure size");
}

struct DfsState {
  const std::vector<Kernel>* set;
  const Measure* mu0;
  long depth;
  double best;
  std::vector<int> seq;
  std::vector<int> best_seq;
};

void dfs(DfsState& st, const Vec& mu, long t) {
  double r = ratio_to_base(mu, *st.mu0);
  if (r > st.best) {
    st.best = r;
    st.best_seq = st.seq;
  }
  if (t == st.depth) return;
  for (int k = 0; k < static_cast<int>(st.set->size()); ++k) {
    st.seq.push_back(k);
    dfs(st, vecmat(mu, (*st.set)[k].rows), t + 1);
    st.seq.pop_back();
  }
}

}  // namespace

StabilityCertificate check_c_stability(const Schedule& s, const Measure& mu0, long horizon) {
  require(mu0.positive, errc::BadInput, "base measure must be positive");
  long hz = std::min(horizon, s.horizon);
  StabilityCertificate cert;
  cert.mu0 = mu0;
  cert.horizon = hz;
  cert.mode = "single-schedule";
  cert.schedules_checked = "1";
  Vec mu = mu0.weights;
  cert.observed_c = ratio_to_base(mu, mu0);
  for (long i = 1; i <= hz; ++i) {
    mu = vecmat(mu, s.at_step(i).rows);
    cert.observed_c = std::max(cert.observed_c, ratio_to_base(mu, mu0));
    cert.witness.push_back(s.index_at_step(i));
  }
  return cert;
}

StabilityCertificate search_c_stability(const std::vector<Kernel>& kernel_set,
                                        const Measure& mu0, long horizon, SearchMode mode,
                                        long depth_cap, long samples, uint64_t seed) {
  require_compatible(kernel_set, mu0);
  require(horizon >= 0, errc::BadInput, "horizon must be >= 0");
  StabilityCertificate cert;
  cert.mu0 = mu0;
  cert.horizon = horizon;

  if (mode == SearchMode::exhaustive) {
    require(horizon <= depth_cap, errc::DepthTooLarge,
            "exhaustive search capped at depth " + std::to_string(depth_cap));
    require(static_cast<long>(kernel_set.size()) <= 4, errc::TooLarge,
            "exhaustive search capped at 4 kernels");
    cert.mode = "exhaustive";
    cert.schedules_checked = "exhaustive-to-depth-" + std::to_string(horizon);
    DfsState st{&kernel_set, &mu0, horizon, 0.0, {}, {}};
    dfs(st, mu0.weights, 0);
    cert.observed_c = st.best;
    cert.witness = st.best_seq;
    return cert;
  }

  if (mode == SearchMode::envelope) {
    cert.mode = "envelope";
    cert.schedules_checked = "envelope-to-horizon-" + std::to_string(horizon);
    Vec lo = mu0.weights, hi = mu0.weights;
    cert.observed_c = 1.0;
    const int n = mu0.size();
    for (long t = 1; t <= horizon; ++t) {
      Vec nlo(n, kInf), nhi(n, 0.0);
      for (const Kernel& K : kernel_set) {
        Vec a = vecmat(lo, K.rows), b = vecmat(hi, K.rows);
        for (int x = 0; x < n; ++x) {
          nlo[x] = std::min(nlo[x], a[x]);
          nhi[x] = std::max(nhi[x], b[x]);
        }
      }
      lo = std::move(nlo);
      hi = std::move(nhi);
      for (int x = 0; x < n; ++x) {
        cert.observed_c = std::max(cert.observed_c, hi[x] / mu0[x]);
        cert.observed_c =
            std::max(cert.observed_c, lo[x] > 0.0 ? mu0[x] / lo[x] : kInf);
      }
    }
    return cert;
  }

  cert.mode = "sampled";
  cert.schedules_checked = std::to_string(samples);
  SplitMix64 rng(seed);
  cert.observed_c = 1.0;
  for (long trial = 0; trial < samples; ++trial) {
    Vec mu = mu0.weights;
    std::vector<int> seq;
    seq.reserve(horizon);
    double worst = 1.0;
    for (long t = 1; t <= horizon; ++t) {
      int k = static_cast<int>(rng.below(kernel_set.size()));
      seq.push_back(k);
      mu = vecmat(mu, kernel_set[k].rows);
      worst = std::max(worst, ratio_to_base(mu, mu0));
    }
    if (worst > cert.observed_c) {
      cert.observed_c = worst;
      cert.witness = std::move(seq);
    }
  }
  return cert;
}

namespace {

// signed circle layout: index i <-> point (i <= p/2 ? i : i - p)
inline int neg_index(int i, int p) { return (p - i) % p; }

}  // namespace

SNClassCoefficients sn_class(const Measure& mu, double epsilon) {
  require(epsilon >= 0.0, errc::BadInput, "epsilon must be >= 0");
  const int p = mu.size();
  require(p >= 2, errc::BadInput, "need at least 2 states");
  SNClassCoefficients out;
  out.epsilon = epsilon;
  out.p_N = p;
  out.a.resize(p);
  const double base = 1.0 / p;
  for (int i = 0; i < p; ++i) out.a[i] = mu[i] - base;
  for (int i = 0; i < p; ++i) {
    double asym = std::fabs(out.a[i] + out.a[neg_index(i, p)]);
    require(asym <= kMemberTol, errc::NotMember,
            "condition 1: offsets not antisymmetric at index " + std::to_string(i));
  }
  const double cap = 2.0 * epsilon * base;
  for (int i = 0; i < p; ++i)
    require(std::fabs(out.a[i]) <= cap + kMemberTol, errc::NotMember,
            "condition 2: offset exceeds 2*epsilon/p at index " + std::to_string(i));
  return out;
}

namespace {

// circle walk with the +-delta row perturbation at the given vertex
Kernel circle_perturbed(int p, double delta, int row) {
  Matrix m(p, p);
  for (int x = 0; x < p; ++x) {
    m(x, (x + 1) % p) = 0.5;
    m(x, (x + p - 1) % p) = 0.5;
  }
  m(row, (row + 1) % p) += delta;
  m(row, (row + p - 1) % p) -= delta;
  return validate_kernel(m);
}

// random class member: free offsets at 1..N-1 (and N when p is odd)
Vec random_sn_member(int p, double epsilon, SplitMix64& rng) {
  const double base = 1.0 / p;
  Vec w(p, base);
  int last_free = (p % 2 == 0) ? p / 2 - 1 : p / 2;
  for (int x = 1; x <= last_free; ++x) {
    double a = rng.uniform(-2.0 * epsilon * base, 2.0 * epsilon * base);
    w[x] += a;
    w[neg_index(x, p)] -= a;
  }
  return w;
}

}  // namespace

Certificate sn_closure_check(long p, double epsilon, long trials, bool corrupted,
                             uint64_t seed) {
  require(p >= 4, errc::BadInput, "need at least 4 circle points");
  require(epsilon >= 0.0 && epsilon < 0.5, errc::BadInput, "epsilon must be in [0, 1/2)");
  require(trials >= 1, errc::BadInput, "need at least one trial");
  Certificate cert;
  cert.kind = "sn-closure";
  cert.trials = trials;
  cert.seed = seed;
  cert.pass = true;
  SplitMix64 rng(seed);
  const int pi = static_cast<int>(p);
  const double cap = 2.0 * epsilon / p;
  for (long t = 0; t < trials; ++t) {
    Vec w = random_sn_member(pi, epsilon, rng);
    double delta = rng.uniform(-epsilon, epsilon);
    Kernel K = circle_perturbed(pi, delta, corrupted ? 1 : 0);
    Vec img = vecmat(w, K.rows);
    double sat = 0.0;
    for (int i = 0; i < pi; ++i) {
      double a = img[i] - 1.0 / p;
      sat = std::max(sat, cap > 0.0 ? std::fabs(a) / cap : std::fabs(a));
    }
    cert.value = std::max(cert.value, sat);
    try {
      sn_class(make_measure(img), epsilon);
    } catch (const Error& e) {
      if (e.code() != errc::NotMember) throw;
      if (cert.pass) cert.witness = img;
      cert.pass = false;
    }
  }
  return cert;
}

S2NCertificate s2n_class(const Measure& mu, double epsilon, long N) {
  require(N >= 1, errc::BadInput, "N must be >= 1");
  require(2 * N <= 12, errc::TooLarge, "hypercube capped at dimension 12");
  require(epsilon >= 0.0, errc::BadInput, "epsilon must be >= 0");
  const int size = 1 << (2 * N);
  require(mu.size() == size, errc::BadInput, "measure size must be 4^N");
  const double base = 1.0 / size;
  const double tol = 1e-9 * base;

  S2NCertificate out;
  out.epsilon = epsilon;
  out.N = N;
  out.a.assign(2 * N + 1, 0.0);
  std::vector<double> lo(2 * N + 1, kInf), hi(2 * N + 1, -kInf);
  for (int x = 0; x < size; ++x) {
    int lvl = __builtin_popcount(static_cast<unsigned>(x));
    lo[lvl] = std::min(lo[lvl], mu[x]);
    hi[lvl] = std::max(hi[lvl], mu[x]);
  }
  require(std::fabs(lo[N] - base) <= tol && std::fabs(hi[N] - base) <= tol, errc::NotMember,
          "condition 1: middle level mass must equal 4^{-N}");
  for (long k = 0; k <= 2 * N; ++k) {
    require(hi[k] - lo[k] <= tol, errc::NotMember,
            "condition 2: level " + std::to_string(k) + " not constant");
    out.a[k] = 0.5 * (lo[k] + hi[k]) - base;
  }
  for (long i = 1; i <= N; ++i)
    require(std::fabs(out.a[N + i] + out.a[N - i]) <= tol, errc::NotMember,
            "condition 2: level offsets not antisymmetric at i=" + std::to_string(i));
  for (long k = 0; k <= 2 * N; ++k)
    require(std::fabs(out.a[k]) <= epsilon * base + tol, errc::NotMember,
            "condition 3: offset exceeds epsilon/4^N at level " + std::to_string(k));
  return out;
}

namespace {

// hypercube walk perturbed at the given Hamming level: up-moves scaled by
// 1+delta, down-moves rescaled to keep rows stochastic (exact at level N)
Kernel hypercube_perturbed(long N, double delta, long level) {
  const int d = static_cast<int>(2 * N);
  const int size = 1 << d;
  Matrix m(size, size);
  for (int x = 0; x < size; ++x) {
    int lvl = __builtin_popcount(static_cast<unsigned>(x));
    double up = 1.0 / d, down = 1.0 / d;
    if (lvl == level) {
      up = (1.0 + delta) / d;
      down = (lvl > 0) ? (1.0 - delta * static_cast<double>(d - lvl) / lvl) / d : 1.0 / d;
    }
    for (int b = 0; b < d; ++b) {
      int y = x ^ (1 << b);
      m(x, y) = (y > x ? up : down);
    }
  }
  return validate_kernel(m);
}

Vec random_s2n_member(long N, double epsilon, SplitMix64& rng) {
  const int size = 1 << (2 * N);
  const double base = 1.0 / size;
  std::vector<double> a(2 * N + 1, 0.0);
  for (long i = 1; i <= N; ++i) {
    a[N + i] = rng.uniform(-epsilon * base, epsilon * base);
    a[N - i] = -a[N + i];
  }
  Vec w(size);
  for (int x = 0; x < size; ++x)
    w[x] = base + a[__builtin_popcount(static_cast<unsigned>(x))];
  return w;
}

}  // namespace

Certificate s2n_closure_check(double epsilon, long N, long trials, bool corrupted,
                              uint64_t seed) {
  require(N >= 1, errc::BadInput, "N must be >= 1");
  require(2 * N <= 12, errc::TooLarge, "hypercube capped at dimension 12");
  require(epsilon >= 0.0 && epsilon < 1.0, errc::BadInput, "epsilon must be in [0, 1)");
  require(trials >= 1, errc::BadInput, "need at least one trial");
  Certificate cert;
  cert.kind = "s2n-closure";
  cert.trials = trials;
  cert.seed = seed;
  cert.pass = true;
  SplitMix64 rng(seed);
  const double climit = (1.0 + epsilon) / (1.0 - epsilon);
  const long steps = 3;
  for (long t = 0; t < trials; ++t) {
    Vec w0 = random_s2n_member(N, epsilon, rng);
    Measure mu0 = make_measure(w0);
    Vec w = w0;
    for (long i = 1; i <= steps; ++i) {
      double delta = rng.uniform(-epsilon, epsilon);
      Kernel K = hypercube_perturbed(N, delta, corrupted ? N + 1 : N);
      w = vecmat(w, K.rows);
      double r = ratio_to_base(w, mu0);
      cert.value = std::max(cert.value, r);
      bool member = true;
      try {
        s2n_class(make_measure(w), epsilon, N);
      } catch (const Error& e) {
        if (e.code() != errc::NotMember) throw;
        member = false;
      }
      if (!member || r > climit + 1e-9) {
        if (cert.pass) cert.witness = w;
        cert.pass = false;
      }
    }
  }
  return cert;
}

BdPerturbation bd_perturbation_stability(const Kernel& Q, const Measure& nu, double s) {
  const int n = Q.size();
  require(nu.size() == n, errc::SizeMismatch, "kernel size != measure size");
  require(n >= 3 && n % 2 == 1, errc::NotSymmetricBD,
          "state space must be {-N..N} with odd size >= 3");
  const int mid = n / 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(i - j) >= 2)
        require(Q(i, j) == 0.0, errc::NotSymmetricBD, "kernel is not tridiagonal");
  // mirror i <-> n-1-i must preserve the kernel and the measure
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j)
      require(std::fabs(Q(i, j) - Q(n - 1 - i, n - 1 - j)) <= kMemberTol,
              errc::NotSymmetricBD, "kernel not symmetric about the middle point");
    require(std::fabs(nu[i] - nu[n - 1 - i]) <= kMemberTol, errc::NotSymmetricBD,
            "measure not symmetric about the middle point");
  }
  ReversibilityCheck rc = check_reversible(Q, nu);
  require(rc.reversible, errc::NotReversible, "measure is not reversible for the kernel");

  BdPerturbation out;
  if (s == 0.0) {
    out.kernel = Q;
    out.nu_s = nu;
    out.c = 1.0;
    return out;
  }
  const double q0 = Q(mid, mid + 1);
  require(std::fabs(s) < q0, errc::PerturbationTooLarge,
          "need |s| < q0 = " + std::to_string(q0));

  Matrix m = Q.rows;
  m(mid, mid + 1) += s;
  m(mid, mid - 1) -= s;
  out.kernel = validate_kernel(m);

  Vec w(n);
  w[mid] = nu[mid];
  for (int x = 1; x <= mid; ++x) {
    w[mid + x] = nu[mid + x] * (1.0 + s / q0);
    w[mid - x] = nu[mid - x] * (1.0 - s / q0);
  }
  out.nu_s = make_measure(w);
  ReversibilityCheck pc = check_reversible(out.kernel, out.nu_s);
  require(pc.reversible, errc::NotReversible,
          "perturbed pair lost detailed balance (internal)");
  out.c = (q0 + std::fabs(s)) / (q0 - std::fabs(s));
  return out;
}

}  // namespace imc
