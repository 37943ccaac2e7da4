#include "imc/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "imc/errors.hpp"
#include "imc/rng.hpp"

namespace imc {

bool GalleryInstance::has_constant(const std::string& name) const {
  for (const NamedConstant& c : constants)
    if (c.name == name) return true;
  return false;
}

double GalleryInstance::constant(const std::string& name) const {
  for (const NamedConstant& c : constants)
    if (c.name == name) return c.value;
  fail(errc::BadInput, "no constant named " + name + " on family " + family);
}

GalleryInstance circle(long p_N, double delta, bool lazy_walk) {
  require(p_N >= 3, errc::BadInput, "circle needs at least 3 points");
  require(std::fabs(delta) < 0.5, errc::DeltaTooLarge, "need |delta| < 1/2");
  const int p = static_cast<int>(p_N);
  Matrix m(p, p);
  for (int x = 0; x < p; ++x) {
    m(x, (x + 1) % p) = 0.5;
    m(x, (x + p - 1) % p) = 0.5;
  }
  m(0, 1) += delta;
  m(0, p - 1) -= delta;
  Kernel K = validate_kernel(m);
  if (lazy_walk) K = lazy(K);

  GalleryInstance g;
  g.family = "circle";
  g.params = {{"p_N", static_cast<double>(p_N)},
              {"delta", delta},
              {"lazy", lazy_walk ? 1.0 : 0.0}};
  g.kernels = {K};
  g.measures = {uniform_measure(p)};
  const double eps = std::fabs(delta);
  g.constants.push_back({"epsilon", eps, "exact", "perturbation envelope"});
  g.constants.push_back({"stability_c", (1.0 + 2 * eps) / (1.0 - 2 * eps), "bound",
                         "holds from any centered-offset start"});
  g.constants.push_back(
      {"nash_C", 4.0 * p * p, "bound", "calibrated falsifier constant for the family"});
  g.constants.push_back({"nash_D", 0.25, "exact", "volume-growth exponent"});
  g.constants.push_back(
      {"nash_N", static_cast<double>(p_N * p_N), "exact", "relaxation horizon"});
  if (p % 2 == 0 && !lazy_walk) g.notes.push_back("periodic");
  return g;
}

GalleryInstance metropolis_bd(double alpha, long N, BdFamily family) {
  require(N >= 1, errc::BadInput, "need N >= 1");
  require(alpha >= 0.0, errc::BadInput, "need alpha >= 0");
  const int n = static_cast<int>(2 * N + 1);
  const int mid = n / 2;
  Vec target(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double ax = std::fabs(static_cast<double>(i - mid));
    double base = (family == BdFamily::hat) ? (N - ax + 1.0) : (ax + 1.0);
    target[i] = std::pow(base, alpha);
    total += target[i];
  }
  for (double& t : target) t /= total;

  // base proposal: 1/3 per neighbor, holding 1/3 inside and 2/3 at the ends;
  // acceptance min(1, target(y)/target(x))
  Matrix m(n, n);
  for (int x = 0; x < n; ++x) {
    double stay = 1.0;
    for (int y : {x - 1, x + 1}) {
      if (y < 0 || y >= n) continue;
      double move = (1.0 / 3) * std::min(1.0, target[y] / target[x]);
      m(x, y) = move;
      stay -= move;
    }
    m(x, x) = stay;
  }
  Kernel K = validate_kernel(m);

  GalleryInstance g;
  g.family = (family == BdFamily::hat) ? "metropolis-bd-hat" : "metropolis-bd-check";
  g.params = {{"alpha", alpha}, {"N", static_cast<double>(N)}};
  g.kernels = {K};
  g.measures = {make_measure(target)};
  double q0 = (family == BdFamily::hat)
                  ? (1.0 / 3) * std::pow(static_cast<double>(N) / (N + 1), alpha)
                  : 1.0 / 3;
  g.constants.push_back({"q0", q0, "exact", "middle-vertex exit rate"});
  g.constants.push_back({"nash_D", 1.0 + alpha, "exact", "volume-growth exponent"});
  g.constants.push_back({"zeta", zeta_alpha(alpha, N), "exact", "tail weight sum"});
  return g;
}

namespace {

inline int popcount_u(int x) { return __builtin_popcount(static_cast<unsigned>(x)); }

}  // namespace

GalleryInstance hypercube(long two_N, double delta, bool lazy_walk) {
  require(two_N >= 2 && two_N % 2 == 0, errc::BadInput, "dimension must be even and >= 2");
  require(two_N <= 12, errc::TooLarge, "hypercube capped at dimension 12");
  require(std::fabs(delta) < 1.0, errc::DeltaTooLarge, "need |delta| < 1");
  const int d = static_cast<int>(two_N);
  const long N = two_N / 2;
  const int size = 1 << d;
  Matrix m(size, size);
  for (int x = 0; x < size; ++x) {
    bool middle = popcount_u(x) == N;
    double up = middle ? (1.0 + delta) / d : 1.0 / d;
    double down = middle ? (1.0 - delta) / d : 1.0 / d;
    for (int b = 0; b < d; ++b) {
      int y = x ^ (1 << b);
      m(x, y) = (y > x) ? up : down;
    }
  }
  Kernel K = validate_kernel(m);
  if (lazy_walk) K = lazy(K);

  GalleryInstance g;
  g.family = "hypercube";
  g.params = {{"two_N", static_cast<double>(two_N)},
              {"delta", delta},
              {"lazy", lazy_walk ? 1.0 : 0.0}};
  g.kernels = {K};
  g.measures = {uniform_measure(size)};
  const double eps = std::fabs(delta);
  const double ceps = std::pow(1.0 + eps, -2.0) * std::pow(1.0 - eps, 4.0);
  g.constants.push_back({"epsilon", eps, "exact", "perturbation envelope"});
  g.constants.push_back({"C_eps", ceps, "bound", "family comparison constant"});
  g.constants.push_back(
      {"stability_c", (1.0 + eps) / (1.0 - eps), "bound", "from any level-constant start"});
  g.constants.push_back({"gap_base", 1.0 / N, "exact",
                         "eigenvalue gap of the unperturbed non-lazy walk"});
  g.constants.push_back({"sigma1_lazy", 1.0 - 1.0 / (2 * N), "exact",
                         "second singular value, unperturbed lazy walk"});
  g.constants.push_back(
      {"ls_lazy", 1.0 / (2.0 * d), "exact", "log-Sobolev constant, unperturbed lazy walk"});
  g.constants.push_back({"sigma1_member_upper", 1.0 - ceps / (2 * N), "bound",
                         "second singular value of any lazy member"});
  g.constants.push_back({"ls_member_lower", ceps / (4 * N), "bound",
                         "log-Sobolev constant of any lazy member pair"});
  if (!lazy_walk) g.notes.push_back("periodic");
  return g;
}

std::vector<std::vector<int>> all_permutations(int n) {
  require(n >= 1 && n <= 6, errc::TooLarge, "permutation tables capped at n = 6");
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<int> permutation_compose(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = a[b[k]];
  return r;
}

std::vector<int> permutation_inverse(const std::vector<int>& a) {
  std::vector<int> r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[a[k]] = static_cast<int>(k);
  return r;
}

long permutation_rank(const std::vector<int>& p) {
  // factorial number system over the remaining symbols
  const int n = static_cast<int>(p.size());
  long rank = 0, fact = 1;
  for (int k = 2; k <= n; ++k) fact *= k;
  std::vector<int> left(n);
  std::iota(left.begin(), left.end(), 0);
  for (int k = 0; k < n; ++k) {
    fact /= (n - k > 1) ? (n - k) : 1;
    auto it = std::find(left.begin(), left.end(), p[k]);
    rank += fact * static_cast<long>(it - left.begin());
    left.erase(it);
  }
  return rank;
}

namespace {

std::vector<int> swap_positions(int n, int i, int j) {
  std::vector<int> t(n);
  std::iota(t.begin(), t.end(), 0);
  std::swap(t[i], t[j]);
  return t;
}

// Q~_i on S_n: mass 1/n from x to x*(i,j) for each j (j=i keeps x)
Matrix transpose_matrix(int n, int i0) {
  std::vector<std::vector<int>> perms = all_permutations(n);
  const int m = static_cast<int>(perms.size());
  Matrix q(m, m);
  for (int xk = 0; xk < m; ++xk)
    for (int j = 0; j < n; ++j) {
      std::vector<int> y = permutation_compose(perms[xk], swap_positions(n, i0, j));
      q(xk, static_cast<int>(permutation_rank(y))) += 1.0 / n;
    }
  return q;
}

}  // namespace

GalleryInstance transpose_i_random(long n, long i, bool lazy_walk) {
  require(n >= 2, errc::BadInput, "need n >= 2");
  require(n <= 6, errc::TooLarge, "symmetric group capped at n = 6");
  require(i >= 1 && i <= n, errc::BadInput, "position i must be in [1, n]");
  Kernel K = validate_kernel(transpose_matrix(static_cast<int>(n), static_cast<int>(i - 1)));
  if (lazy_walk) K = lazy(K);

  GalleryInstance g;
  g.family = "transpose-i-random";
  g.params = {{"n", static_cast<double>(n)},
              {"i", static_cast<double>(i)},
              {"lazy", lazy_walk ? 1.0 : 0.0}};
  g.kernels = {K};
  g.measures = {uniform_measure(K.size())};
  if (lazy_walk) {
    g.constants.push_back({"mls_lower", 1.0 / (4.0 * (n - 1)), "bound",
                           "modified log-Sobolev constant from below"});
    g.constants.push_back({"mls_upper", 1.0 / (n - 1.0), "bound",
                           "modified log-Sobolev constant from above"});
  }
  return g;
}

GalleryInstance symmetric_perturbation(long n, long i, double epsilon, uint64_t seed) {
  require(n >= 2, errc::BadInput, "need n >= 2");
  require(n <= 6, errc::TooLarge, "symmetric group capped at n = 6");
  require(i >= 1 && i <= n, errc::BadInput, "position i must be in [1, n]");
  require(epsilon >= 0.0 && epsilon < 1.0, errc::EpsTooLarge, "need epsilon in [0, 1)");
  Matrix base = transpose_matrix(static_cast<int>(n), static_cast<int>(i - 1));
  const int m = base.n;
  // lazy walk: diagonal 1/2 + 1/(2n), moves 1/(2n)
  Matrix q(m, m);
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) q(x, y) = 0.5 * base(x, y);
    q(x, x) += 0.5;
  }

  SplitMix64 rng(seed);
  Matrix k(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = x + 1; y < m; ++y) {
      if (q(x, y) == 0.0) continue;
      double v = q(x, y) * (1.0 + epsilon * rng.uniform(-1.0, 1.0));
      k(x, y) = v;
      k(y, x) = v;
    }
  // diagonal repair keeps rows stochastic; the envelope absorbs it because
  // the diagonal dominates the off-diagonal mass
  for (int x = 0; x < m; ++x) {
    double off = 0.0;
    for (int y = 0; y < m; ++y)
      if (y != x) off += k(x, y);
    double dia = 1.0 - off;
    require(dia >= (1.0 - epsilon) * q(x, x) - 1e-12 &&
                dia <= (1.0 + epsilon) * q(x, x) + 1e-12,
            errc::InfeasiblePerturbation, "diagonal repair left the envelope");
    k(x, x) = dia;
  }
  Kernel K = validate_kernel(k);

  GalleryInstance g;
  g.family = "symmetric-perturbation";
  g.params = {{"n", static_cast<double>(n)},
              {"i", static_cast<double>(i)},
              {"epsilon", epsilon},
              {"seed", static_cast<double>(seed)}};
  g.kernels = {K};
  g.measures = {uniform_measure(m)};
  g.constants.push_back({"sigma1_upper", 1.0 - (1.0 - epsilon) / (2.0 * n), "bound",
                         "second singular value against uniform"});
  return g;
}

GalleryInstance sticky_permutation(long n, long rho_index, double delta, long i) {
  require(n >= 2, errc::BadInput, "need n >= 2");
  require(n <= 6, errc::TooLarge, "symmetric group capped at n = 6");
  require(i >= 1 && i <= n, errc::BadInput, "member index i must be in [1, n]");
  std::vector<std::vector<int>> perms = all_permutations(static_cast<int>(n));
  const int m = static_cast<int>(perms.size());
  require(rho_index >= 0 && rho_index < m, errc::BadInput, "rho must index a permutation");
  const double max_delta = (n - 1.0) / (2.0 * n);  // row mass off the diagonal
  require(delta >= 0.0 && delta < max_delta, errc::DeltaTooLarge,
          "need 0 <= delta < (n-1)/(2n)");

  // base: lazy transpose-1-with-random, then delta moved onto the diagonal
  Matrix base = transpose_matrix(static_cast<int>(n), 0);
  Matrix k(m, m);
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) k(x, y) = 0.5 * base(x, y);
    k(x, x) += 0.5;
  }
  const int rho = static_cast<int>(rho_index);
  k(rho, rho) += delta;
  for (int j = 1; j < n; ++j) {
    std::vector<int> y =
        permutation_compose(perms[rho], swap_positions(static_cast<int>(n), 0, j));
    k(rho, static_cast<int>(permutation_rank(y))) -= delta / (n - 1.0);
  }
  Kernel K = validate_kernel(k);

  // n-cycle sigma(k) = k+1 mod n; member i is K conjugated i-1 times
  std::vector<int> sigma(n);
  for (long t = 0; t < n; ++t) sigma[t] = static_cast<int>((t + 1) % n);
  std::vector<int> sp(n);
  std::iota(sp.begin(), sp.end(), 0);
  for (long t = 1; t < i; ++t) sp = permutation_compose(sp, sigma);
  std::vector<int> sq = permutation_inverse(sp);
  Matrix ki(m, m);
  for (int x = 0; x < m; ++x) {
    int cx = static_cast<int>(
        permutation_rank(permutation_compose(sp, permutation_compose(perms[x], sq))));
    for (int y = 0; y < m; ++y) {
      int cy = static_cast<int>(
          permutation_rank(permutation_compose(sp, permutation_compose(perms[y], sq))));
      ki(x, y) = k(cx, cy);
    }
  }
  Kernel Ki = validate_kernel(ki);

  // family reference measure: invariant of the base kernel with the target
  // column relabeled one cycle step back
  std::vector<int> siginv = permutation_inverse(sigma);
  Matrix kt(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      int cy = static_cast<int>(permutation_rank(
          permutation_compose(siginv, permutation_compose(perms[y], sigma))));
      kt(x, y) = k(x, cy);
    }
  Measure pit = invariant_measure(validate_kernel(kt));

  GalleryInstance g;
  g.family = "sticky-permutation";
  g.params = {{"n", static_cast<double>(n)},
              {"rho", static_cast<double>(rho_index)},
              {"delta", delta},
              {"i", static_cast<double>(i)}};
  g.kernels = {Ki};
  g.measures = {pit, uniform_measure(m)};
  const double eps = delta / (0.5 - 1.0 / (2.0 * n));  // delta over the movable mass
  g.constants.push_back({"epsilon", eps, "exact", "relative size of the sticky shift"});
  g.constants.push_back(
      {"stability_c", 1.0 / (1.0 - eps), "bound", "w.r.t. the family reference measure"});
  g.constants.push_back({"sandwich_lower", 1.0 - eps, "bound",
                         "reference measure over uniform, from below"});
  g.constants.push_back({"sandwich_upper", 1.0 / (1.0 - eps), "bound",
                         "reference measure over uniform, from above"});
  g.constants.push_back({"mls_pcheck_lower", std::pow(1.0 - eps, 5.0) / (4.0 * (n - 1)),
                         "bound", "modified log-Sobolev constant of the checked pair"});
  g.notes.push_back("reference measure evolves by relabeling under the cycle");
  return g;
}

double zeta_alpha(double alpha, long N) {
  require(N >= 0, errc::BadInput, "need N >= 0");
  double s = 0.0;
  for (long j = 0; j <= N; ++j) s += std::pow(1.0 + j, -alpha);
  return s;
}

}  // namespace imc
