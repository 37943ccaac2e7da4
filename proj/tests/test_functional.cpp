#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "imc/distances.hpp"
#include "imc/errors.hpp"
#include "imc/functional.hpp"
#include "imc/markov.hpp"
#include "imc/rng.hpp"
#include "imc/spectral.hpp"

using namespace imc;

namespace {

Kernel from_rows(const std::vector<std::vector<double>>& rows) {
  int n = static_cast<int>(rows.size());
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return validate_kernel(m);
}

// stay with 1/2, else flip one of d coordinates uniformly
Kernel lazy_cube(int d) {
  int n = 1 << d;
  Matrix m(n, n);
  for (int x = 0; x < n; ++x) {
    m(x, x) = 0.5;
    for (int b = 0; b < d; ++b) m(x, x ^ (1 << b)) = 0.5 / d;
  }
  return validate_kernel(m);
}

Kernel drift_circle(int p) {  // 0.7 clockwise, 0.3 back: not reversible
  Matrix m(p, p);
  for (int x = 0; x < p; ++x) {
    m(x, (x + 1) % p) = 0.7;
    m(x, (x + p - 1) % p) = 0.3;
  }
  return validate_kernel(m);
}

Kernel srw_circle(int p) {
  Matrix m(p, p);
  for (int x = 0; x < p; ++x) {
    m(x, (x + 1) % p) = 0.5;
    m(x, (x + p - 1) % p) = 0.5;
  }
  return validate_kernel(m);
}

Kernel identity_kernel(int n) {
  Matrix m(n, n);
  for (int x = 0; x < n; ++x) m(x, x) = 1.0;
  return validate_kernel(m);
}

// reversible pair from symmetric positive weights
std::pair<Kernel, Measure> random_reversible(int n, SplitMix64& rng) {
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.05 + rng.uniform01();
      w(i, j) = v;
      w(j, i) = v;
    }
  Vec r(n, 0.0);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r[i] += w(i, j);
    total += r[i];
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = w(i, j) / r[i];
  Vec pi(n);
  for (int i = 0; i < n; ++i) pi[i] = r[i] / total;
  return {validate_kernel(m), make_measure(std::move(pi))};
}

Measure random_positive_measure(int n, SplitMix64& rng) {
  Vec w(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    w[i] = 0.02 + rng.uniform01();
    s += w[i];
  }
  for (double& v : w) v /= s;
  return make_measure(std::move(w));
}

Kernel random_positive_kernel(int n, SplitMix64& rng) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      m(i, j) = 0.02 + rng.uniform01();
      s += m(i, j);
    }
    for (int j = 0; j < n; ++j) m(i, j) /= s;
  }
  return validate_kernel(m);
}

// 24 permutations of {0,1,2,3} in lexicographic order; row x puts mass 1/4 on
// x with entries at positions i and j swapped, for each j (j=i keeps x)
Kernel transpose_with_random_position(int i, bool lazy) {
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> p{0, 1, 2, 3};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  auto index_of = [&](const std::array<int, 4>& q) {
    for (size_t k = 0; k < perms.size(); ++k)
      if (perms[k] == q) return static_cast<int>(k);
    return -1;
  };
  int n = static_cast<int>(perms.size());
  Matrix m(n, n);
  for (int x = 0; x < n; ++x)
    for (int j = 0; j < 4; ++j) {
      std::array<int, 4> q = perms[x];
      std::swap(q[i], q[j]);
      m(x, index_of(q)) += 0.25;
    }
  if (lazy) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) m(x, y) = 0.5 * m(x, y) + (x == y ? 0.5 : 0.0);
  }
  return validate_kernel(m);
}

Kernel lazy_of(const Kernel& K) {
  int n = K.size();
  Matrix m(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) m(x, y) = 0.5 * K(x, y) + (x == y ? 0.5 : 0.0);
  return validate_kernel(m);
}

template <typename F>
void expect_error(errc want, F&& fn) {
  try {
    fn();
    FAIL_CHECK("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == want);
  }
}

}  // namespace

TEST_CASE("l2 entropy: constants, hand value, guards") {
  Measure u2 = uniform_measure(2);
  CHECK(l2_entropy(Vec{1.0, 0.0}, u2) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));

  SplitMix64 rng(11);
  for (int t = 0; t < 30; ++t) {
    int n = 2 + rng.below(6);
    Measure nu = random_positive_measure(n, rng);
    double c = rng.uniform(-3.0, 3.0);
    if (c == 0.0) c = 1.0;
    CHECK(l2_entropy(Vec(n, c), nu) == 0.0);  // |f| constant
    Vec f(n);
    for (double& v : f) v = rng.normal();
    CHECK(l2_entropy(f, nu) >= 0.0);
  }
  expect_error(errc::ZeroFunction, [&] { l2_entropy(Vec{0.0, 0.0}, u2); });
  Vec bad{1.0, 0.0};
  expect_error(errc::ZeroReference,
               [&] { l2_entropy(Vec{1.0, 2.0}, make_measure(std::move(bad))); });
}

TEST_CASE("relative entropy: identity, point mass, pinsker") {
  SplitMix64 rng(12);
  Measure u7 = uniform_measure(7);
  CHECK(relative_entropy(u7, u7) == 0.0);
  CHECK(relative_entropy(point_mass(7, 3), u7) == doctest::Approx(std::log(7.0)).epsilon(1e-14));

  for (int t = 0; t < 100; ++t) {
    int n = 2 + rng.below(7);
    Measure nu = random_positive_measure(n, rng);
    Measure mu = (t % 4 == 0) ? point_mass(n, rng.below(n)) : random_positive_measure(n, rng);
    double ent = relative_entropy(mu, nu);
    CHECK(ent >= 0.0);
    double tv = tv_distance(mu, nu);
    CHECK(2.0 * tv * tv <= ent + 1e-12);
  }
}

TEST_CASE("two-state log-Sobolev closed forms against a dense grid") {
  // uniform chain: constant is 1/2; skewed chain: the closed form below
  Kernel Ku = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  Measure pu = uniform_measure(2);
  LogSobolevEstimate eu = log_sobolev_constant(Ku, pu);
  CHECK(eu.kind == EstimateKind::exact_small);
  CHECK(std::string(estimate_kind_name(eu.kind)) == "exact-small");
  CHECK(eu.value == doctest::Approx(0.5).epsilon(1e-12));

  Kernel Ks = from_rows({{0.7, 0.3}, {0.1, 0.9}});
  Vec ws{0.25, 0.75};
  Measure ps = make_measure(std::move(ws));
  LogSobolevEstimate es = log_sobolev_constant(Ks, ps);
  double w = 0.25 * 0.3, th = 0.25;
  double closed = w * (1.0 - 2.0 * th) / (th * (1.0 - th) * std::log((1.0 - th) / th));
  CHECK(es.value == doctest::Approx(closed).epsilon(1e-12));
  CHECK(es.value <= 0.5 * spectral_gap(Ks, ps) + 1e-8);

  // scale invariance reduces the infimum to f = (1,t): dense scan oracle
  for (int which = 0; which < 2; ++which) {
    const Kernel& K = which == 0 ? Ku : Ks;
    const Measure& pi = which == 0 ? pu : ps;
    double want = which == 0 ? 0.5 : closed;
    double best = kInf;
    for (double t = -8.0; t <= 8.0; t += 1e-3) {
      if (std::fabs(std::fabs(t) - 1.0) < 1e-9) continue;
      best = std::min(best, ls_ratio(K, pi, Vec{1.0, t}));
    }
    CHECK(best == doctest::Approx(want).epsilon(1e-4));
  }
}

TEST_CASE("lazy cube log-Sobolev constant is half the gap") {
  for (int d : {3, 4}) {
    Kernel Q = lazy_cube(d);
    Measure u = uniform_measure(1 << d);
    LogSobolevEstimate est = log_sobolev_constant(Q, u);
    CHECK(est.kind == EstimateKind::multistart_numeric);
    CHECK(est.value == doctest::Approx(1.0 / (2.0 * d)).epsilon(1e-3));
    CHECK(est.value <= 0.5 * spectral_gap(Q, u) + 1e-8);
    REQUIRE(!est.witness.empty());
    double lo = est.witness[0], hi = est.witness[0];
    for (double v : est.witness) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi - lo > 1e-9);  // nonconstant witness
    CHECK(ls_ratio(Q, u, est.witness) == doctest::Approx(est.value).epsilon(1e-12));
  }
}

TEST_CASE("log-Sobolev guards") {
  Measure u5 = uniform_measure(5);
  expect_error(errc::NotReversible, [&] { log_sobolev_constant(drift_circle(5), u5); });
  expect_error(errc::Reducible, [&] { log_sobolev_constant(identity_kernel(3), uniform_measure(3)); });
  expect_error(errc::NoAdmissibleWitness,
               [&] { log_sobolev_constant(identity_kernel(1), uniform_measure(1)); });
  Kernel Ku = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  expect_error(errc::ZeroFunction, [&] { ls_ratio(Ku, uniform_measure(2), Vec{2.0, 2.0}); });
}

TEST_CASE("modified log-Sobolev on two states") {
  Kernel Ku = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  Measure pu = uniform_measure(2);
  LogSobolevEstimate mu = mls_constant(Ku, pu);
  CHECK(mu.kind == EstimateKind::exact_small);
  // near-constant limit 2*gap = 2 is the infimum here
  CHECK(mu.value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(mu.value >= 4.0 * log_sobolev_constant(Ku, pu).value - 1e-6);

  Kernel Ks = from_rows({{0.7, 0.3}, {0.1, 0.9}});
  Vec ws{0.25, 0.75};
  Measure ps = make_measure(std::move(ws));
  LogSobolevEstimate ms = mls_constant(Ks, ps);
  double ls = log_sobolev_constant(Ks, ps).value;
  CHECK(ms.value >= 4.0 * ls - 1e-9);  // pointwise pairing comparison
  CHECK(ms.value <= 2.0 * spectral_gap(Ks, ps) + 1e-8);
}

TEST_CASE("modified log-Sobolev on lazy position transpositions") {
  Kernel Q = transpose_with_random_position(0, true);
  REQUIRE(Q.size() == 24);
  Measure u = uniform_measure(24);
  // sanity: symmetric, hence reversible; diagonal 1/2 + 1/8
  CHECK(Q(0, 0) == doctest::Approx(0.5 + 0.125));
  LogSobolevEstimate est = mls_constant(Q, u);
  CHECK(est.kind == EstimateKind::multistart_numeric);
  CHECK(est.value >= 1.0 / 12.0 - 1e-8);  // known lower bound for this family
  CHECK(est.value <= 2.0 * spectral_gap(Q, u) + 1e-8);
  REQUIRE(!est.witness.empty());
  for (double v : est.witness) CHECK(v > 0.0);
  CHECK(mls_ratio(Q, u, est.witness) == doctest::Approx(est.value).epsilon(1e-12));
}

TEST_CASE("modified log-Sobolev guards") {
  Measure u5 = uniform_measure(5);
  expect_error(errc::NotReversible, [&] { mls_constant(drift_circle(5), u5); });
  expect_error(errc::Reducible, [&] { mls_constant(identity_kernel(3), uniform_measure(3)); });
  expect_error(errc::NoAdmissibleWitness,
               [&] { mls_constant(identity_kernel(1), uniform_measure(1)); });
  Kernel Ku = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  expect_error(errc::BadInput, [&] { mls_ratio(Ku, uniform_measure(2), Vec{1.0, 0.0}); });
  expect_error(errc::ZeroFunction, [&] { mls_ratio(Ku, uniform_measure(2), Vec{1.0, -1.0}); });
}

TEST_CASE("laziness halves both constants; comparison direction") {
  SplitMix64 rng(77);
  auto [Q, pi] = random_reversible(5, rng);
  Kernel L = lazy_of(Q);

  // the Dirichlet form halves exactly, the entropy is untouched
  for (int t = 0; t < 20; ++t) {
    Vec f(5);
    for (double& v : f) v = rng.normal() + 0.1;
    double lf = l2_entropy(f, pi);
    if (lf < 1e-8) continue;
    CHECK(ls_ratio(Q, pi, f) == doctest::Approx(2.0 * ls_ratio(L, pi, f)).epsilon(1e-12));
    bool vanishes = false;
    for (double v : f) vanishes = vanishes || v == 0.0;
    if (!vanishes)
      CHECK(mls_ratio(Q, pi, f) == doctest::Approx(2.0 * mls_ratio(L, pi, f)).epsilon(1e-12));
  }

  double lQ = log_sobolev_constant(Q, pi).value;
  double lL = log_sobolev_constant(L, pi).value;
  CHECK(lQ == doctest::Approx(2.0 * lL).epsilon(5e-3));
  double mQ = mls_constant(Q, pi).value;
  double mL = mls_constant(L, pi).value;
  CHECK(mQ == doctest::Approx(2.0 * mL).epsilon(5e-3));

  // off-diagonal domination Q >= 2 L with equal measures: estimates keep the
  // c^2-scaled ordering
  CHECK(lQ >= lL / 4.0 - 1e-10);
  CHECK(mQ >= mL / 4.0 - 1e-10);
}

TEST_CASE("entropy contraction estimates") {
  SplitMix64 rng(99);
  // rank-one kernel kills entropy in one step
  {
    int n = 5;
    Measure r = random_positive_measure(n, rng);
    Matrix m(n, n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) m(x, y) = r[y];
    Kernel K = validate_kernel(m);
    CHECK(entropy_contraction(K, random_positive_measure(n, rng), 100) == 1.0);
  }
  // identity and permutations preserve entropy
  CHECK(entropy_contraction(identity_kernel(4), uniform_measure(4), 100) == 0.0);
  {
    Kernel flip = from_rows({{0.0, 1.0}, {1.0, 0.0}});
    Vec w{0.3, 0.7};
    CHECK(entropy_contraction(flip, make_measure(std::move(w)), 100) == 0.0);
  }
  Kernel Ku = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(entropy_contraction(Ku, uniform_measure(2), 200) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("entropy data processing under any kernel") {
  SplitMix64 rng(123);
  for (int t = 0; t < 200; ++t) {
    int n = 2 + rng.below(6);
    Kernel K = random_positive_kernel(n, rng);
    Measure nu = random_positive_measure(n, rng);
    Measure mu = (t % 5 == 0) ? point_mass(n, rng.below(n)) : random_positive_measure(n, rng);
    double before = relative_entropy(mu, nu);
    double after = relative_entropy(push_forward(mu, K), push_forward(nu, K));
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("g function: exact cases, series seam, lower bound on a grid") {
  for (double nu : {0.0, 1e-9, 0.5, 3.0, 100.0}) CHECK(g_function(2.0, nu) == 1.0);
  CHECK(g_function(4.0, 1e-12) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(g_function(4.0, 1.0) == doctest::Approx(11.0 / 9.0).epsilon(1e-12));

  for (double q : {2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 20.0}) {
    for (double nu : {0.0, 1e-8, 1e-6, 1e-5, 2e-5, 1e-4, 0.01, 0.1, 1.0, 10.0, 100.0})
      CHECK(g_function(q, nu) >= 1.0 - 1e-12);
    // continuity across the series/direct switch
    CHECK(g_function(q, 0.9999e-5) == doctest::Approx(g_function(q, 1.0001e-5)).epsilon(1e-4));
  }
  expect_error(errc::BadInput, [&] { g_function(1.5, 0.1); });
  expect_error(errc::BadInput, [&] { g_function(3.0, -0.1); });
}

TEST_CASE("kernel roughness nu") {
  Kernel flip = from_rows({{0.0, 1.0}, {1.0, 0.0}});
  CHECK(nu_of_kernel(flip) == 0.0);
  Kernel Ku = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(nu_of_kernel(Ku) == doctest::Approx(1.0).epsilon(1e-14));
  Kernel Qt = transpose_with_random_position(2, false);
  CHECK(nu_of_kernel(Qt) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("phi comparison stays nonpositive") {
  CHECK(phi_gap(0.0) == 0.0);
  CHECK(phi_gap(-1.0) == doctest::Approx(0.0).epsilon(1e-15));
  double worst = -kInf;
  for (int i = 0; i <= 100000; ++i) {
    double x = -1.0 + 101.0 * i / 100000.0;
    worst = std::max(worst, phi_gap(x));
  }
  CHECK(worst <= 1e-12);
  expect_error(errc::BadInput, [&] { phi_gap(-1.0000001); });
}

TEST_CASE("universal entropy contraction coefficient") {
  double rho = rho_lower_bound();
  CHECK(rho == doctest::Approx(0.10634708332087178).epsilon(1e-15));
  CHECK(rho > 0.1);
  CHECK(rho < 1.0);
}

TEST_CASE("nash ratio hand value and scale invariance") {
  Kernel Ku = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  Measure pu = uniform_measure(2);
  NashParams params{10.0, 1.0, 2};
  Vec f{1.0, 0.0};
  double want = std::pow(0.5, 1.5) / ((0.25 + 0.25) * 0.5);
  CHECK(nash_ratio(Ku, pu, params, f) == doctest::Approx(want).epsilon(1e-12));

  SplitMix64 rng(31);
  auto [P, pi] = random_reversible(6, rng);
  NashParams np{5.0, 0.5, 36};
  for (int t = 0; t < 20; ++t) {
    Vec g(6);
    for (double& v : g) v = rng.normal() + 0.05;
    double base_nash = nash_ratio(P, pi, np, g);
    double base_ls = ls_ratio(P, pi, g);
    double base_mls = mls_ratio(P, pi, g);
    for (double c : {3.7, 1e-3, -2.0}) {
      Vec cg(6);
      for (int x = 0; x < 6; ++x) cg[x] = c * g[x];
      CHECK(nash_ratio(P, pi, np, cg) == doctest::Approx(base_nash).epsilon(1e-10));
      CHECK(ls_ratio(P, pi, cg) == doctest::Approx(base_ls).epsilon(1e-10));
      CHECK(mls_ratio(P, pi, cg) == doctest::Approx(base_mls).epsilon(1e-10));
    }
  }
}

TEST_CASE("nash certification on the circle") {
  Kernel P = srw_circle(21);
  Measure u = uniform_measure(21);
  NashParams params{4.0 * 21 * 21, 0.25, 441};
  Certificate cert = nash_certify(P, u, params, 400);
  CHECK(cert.kind == "nash");
  CHECK(cert.trials == 400);
  CHECK(cert.pass);
  CHECK(cert.value > 100.0);
  CHECK(cert.value <= params.C);

  // deterministic replay
  Certificate again = nash_certify(P, u, params, 400);
  CHECK(again.value == cert.value);
  REQUIRE(again.witness.size() == cert.witness.size());
  for (size_t i = 0; i < cert.witness.size(); ++i) CHECK(again.witness[i] == cert.witness[i]);

  // halving C below the observed ratio flips the verdict and names a witness
  NashParams tight{cert.value / 2.0, 0.25, 441};
  Certificate fail = nash_certify(P, u, tight, 400);
  CHECK(!fail.pass);
  REQUIRE(!fail.witness.empty());
  CHECK(nash_ratio(P, u, tight, fail.witness) > tight.C);

  Kernel comp = from_rows({{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6},
                           {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6},
                           {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6},
                           {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6},
                           {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6},
                           {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}});
  Certificate easy = nash_certify(comp, uniform_measure(6), NashParams{1e6, 1.0, 6}, 200);
  CHECK(easy.pass);
}

TEST_CASE("hypercontractivity spot checks") {
  // permutation kernel: the induced two-step chain is reducible, so the
  // exponent stays at q0 and the norms match exactly
  Kernel flip = from_rows({{0.0, 1.0}, {1.0, 0.0}});
  Vec w{0.3, 0.7};
  Certificate cf = hypercontractivity_check(flip, make_measure(std::move(w)), 2.0, 100);
  CHECK(cf.kind == "hypercontractivity");
  CHECK(cf.pass);
  CHECK(cf.value == doctest::Approx(1.0).epsilon(1e-9));

  // rank-one: Kf is constant, Jensen closes the gap at any exponent
  SplitMix64 rng(55);
  int n = 5;
  Measure r = random_positive_measure(n, rng);
  Matrix m(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) m(x, y) = r[y];
  Certificate cr = hypercontractivity_check(validate_kernel(m),
                                            random_positive_measure(n, rng), 2.5, 200);
  CHECK(cr.pass);

  // lazy cube on 64 states at q0 = 2
  Certificate cq = hypercontractivity_check(lazy_cube(6), uniform_measure(64), 2.0, 500);
  CHECK(cq.pass);

  expect_error(errc::BadInput, [&] {
    hypercontractivity_check(lazy_cube(2), uniform_measure(4), 1.5, 10);
  });
}
