#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "imc/errors.hpp"
#include "imc/gallery.hpp"
#include "imc/markov.hpp"
#include "imc/spectral.hpp"

using namespace imc;

namespace {

template <typename F>
void expect_error(F&& f, errc code) {
  try {
    f();
    FAIL_CHECK("expected error code ", static_cast<int>(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

double max_kernel_diff(const Kernel& a, const Kernel& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (int x = 0; x < a.size(); ++x)
    for (int y = 0; y < a.size(); ++y) worst = std::max(worst, std::fabs(a(x, y) - b(x, y)));
  return worst;
}

int level(int x) { return __builtin_popcount(static_cast<unsigned>(x)); }

}  // namespace

TEST_CASE("circle family: rows, laziness, constants, periodicity flag") {
  GalleryInstance srw = circle(5, 0.0, false);
  CHECK(srw.family == "circle");
  CHECK(srw.kernel().size() == 5);
  for (int x = 0; x < 5; ++x) {
    CHECK(srw.kernel()(x, (x + 1) % 5) == 0.5);
    CHECK(srw.kernel()(x, (x + 4) % 5) == 0.5);
    CHECK(srw.kernel()(x, x) == 0.0);
  }
  Measure pi = invariant_measure(srw.kernel());
  for (int x = 0; x < 5; ++x) CHECK(pi[x] == doctest::Approx(0.2).epsilon(1e-12));

  GalleryInstance g = circle(5, 0.1, false);
  CHECK(g.kernel()(0, 1) == doctest::Approx(0.6));
  CHECK(g.kernel()(0, 4) == doctest::Approx(0.4));
  // rows away from the perturbation site match the plain walk exactly
  for (int x = 1; x < 5; ++x)
    for (int y = 0; y < 5; ++y) CHECK(g.kernel()(x, y) == srw.kernel()(x, y));
  CHECK(g.constant("epsilon") == doctest::Approx(0.1));
  CHECK(g.constant("stability_c") == doctest::Approx(1.5));
  CHECK(g.constant("nash_C") == doctest::Approx(100.0));
  CHECK(g.constant("nash_D") == doctest::Approx(0.25));
  CHECK(g.constant("nash_N") == doctest::Approx(25.0));
  CHECK(g.has_constant("nash_C"));
  CHECK(!g.has_constant("made_up"));
  expect_error([&] { g.constant("made_up"); }, errc::BadInput);
  CHECK(g.params.at("p_N") == 5.0);

  GalleryInstance gl = circle(5, 0.1, true);
  CHECK(gl.kernel()(0, 0) == doctest::Approx(0.5));
  CHECK(gl.kernel()(0, 1) == doctest::Approx(0.3));
  CHECK(gl.kernel()(0, 4) == doctest::Approx(0.2));
  CHECK(gl.kernel()(1, 1) == doctest::Approx(0.5));
  CHECK(gl.kernel()(1, 0) == doctest::Approx(0.25));

  auto has_note = [](const GalleryInstance& inst, const std::string& s) {
    return std::find(inst.notes.begin(), inst.notes.end(), s) != inst.notes.end();
  };
  CHECK(has_note(circle(10, 0.0, false), "periodic"));
  CHECK(!has_note(circle(10, 0.0, true), "periodic"));
  CHECK(!has_note(circle(11, 0.0, false), "periodic"));

  expect_error([] { circle(2, 0.0, false); }, errc::BadInput);
  expect_error([] { circle(5, 0.5, false); }, errc::DeltaTooLarge);
  expect_error([] { circle(5, -0.5, false); }, errc::DeltaTooLarge);
}

TEST_CASE("metropolis birth-death: base walk, targets, detailed balance") {
  // flat target: both families reduce to the bare proposal chain
  for (BdFamily fam : {BdFamily::hat, BdFamily::check}) {
    GalleryInstance g = metropolis_bd(0.0, 2, fam);
    const Kernel& K = g.kernel();
    CHECK(K.size() == 5);
    CHECK(K(0, 0) == doctest::Approx(2.0 / 3));
    CHECK(K(0, 1) == doctest::Approx(1.0 / 3));
    CHECK(K(4, 4) == doctest::Approx(2.0 / 3));
    CHECK(K(2, 1) == doctest::Approx(1.0 / 3));
    CHECK(K(2, 3) == doctest::Approx(1.0 / 3));
    CHECK(K(2, 2) == doctest::Approx(1.0 / 3));
    for (int x = 0; x < 5; ++x) CHECK(g.measure()[x] == doctest::Approx(0.2));
    CHECK(g.constant("zeta") == doctest::Approx(3.0));
    CHECK(g.constant("nash_D") == doctest::Approx(1.0));
  }
  CHECK(metropolis_bd(0.0, 2, BdFamily::hat).family == "metropolis-bd-hat");
  CHECK(metropolis_bd(0.0, 2, BdFamily::check).family == "metropolis-bd-check");

  // middle-vertex exit rate: check family keeps 1/3 for every alpha, hat decays
  GalleryInstance gc = metropolis_bd(2.0, 3, BdFamily::check);
  CHECK(gc.constant("q0") == doctest::Approx(1.0 / 3));
  CHECK(gc.kernel()(3, 2) == doctest::Approx(1.0 / 3));
  GalleryInstance gh = metropolis_bd(2.0, 3, BdFamily::hat);
  CHECK(gh.constant("q0") == doctest::Approx((1.0 / 3) * 9.0 / 16));
  CHECK(gh.kernel()(3, 2) == doctest::Approx(gh.constant("q0")));
  CHECK(gh.constant("nash_D") == doctest::Approx(3.0));

  // computed invariant measure equals the declared target
  GalleryInstance g10 = metropolis_bd(1.0, 10, BdFamily::check);
  Measure pi = invariant_measure(g10.kernel());
  double z = 0.0;
  for (int x = -10; x <= 10; ++x) z += std::fabs(x) + 1.0;
  for (int i = 0; i < 21; ++i) {
    double want = (std::fabs(i - 10.0) + 1.0) / z;
    CHECK(pi[i] == doctest::Approx(want).epsilon(1e-10));
    CHECK(g10.measure()[i] == doctest::Approx(want).epsilon(1e-12));
  }

  for (auto [alpha, N] : {std::pair<double, long>{1.0, 10}, {1.5, 5}, {0.3, 7}}) {
    for (BdFamily fam : {BdFamily::hat, BdFamily::check}) {
      GalleryInstance g = metropolis_bd(alpha, N, fam);
      ReversibilityCheck rc = check_reversible(g.kernel(), g.measure());
      CHECK(rc.reversible);
      CHECK(rc.max_violation <= 1e-10);
    }
  }

  expect_error([] { metropolis_bd(1.0, 0, BdFamily::hat); }, errc::BadInput);
  expect_error([] { metropolis_bd(-0.5, 3, BdFamily::hat); }, errc::BadInput);
}

TEST_CASE("zeta tail sums") {
  CHECK(zeta_alpha(0.0, 4) == doctest::Approx(5.0));
  CHECK(zeta_alpha(1.0, 3) == doctest::Approx(25.0 / 12));
  CHECK(zeta_alpha(2.0, 0) == doctest::Approx(1.0));
  CHECK(zeta_alpha(0.5, 10) > zeta_alpha(1.0, 10));
  CHECK(zeta_alpha(1.0, 10) > zeta_alpha(2.0, 10));
  CHECK(metropolis_bd(1.0, 3, BdFamily::check).constant("zeta") ==
        doctest::Approx(25.0 / 12));
  expect_error([] { zeta_alpha(1.0, -1); }, errc::BadInput);
}

TEST_CASE("hypercube family: perturbed rows, spectra, level lumping") {
  GalleryInstance flat = hypercube(4, 0.0, false);
  CHECK(flat.kernel().size() == 16);
  for (int x = 0; x < 16; ++x)
    for (int b = 0; b < 4; ++b) CHECK(flat.kernel()(x, x ^ (1 << b)) == doctest::Approx(0.25));
  // eigenvalue gap of the plain walk is 1/N; the lazy walk turns it into
  // a genuine second singular value 1 - 1/(2N)
  CHECK(flat.constant("gap_base") == doctest::Approx(0.5));
  CHECK(spectral_gap(flat.kernel(), uniform_measure(16)) == doctest::Approx(0.5).epsilon(1e-9));
  GalleryInstance flat_lazy = hypercube(4, 0.0, true);
  CHECK(flat_lazy.constant("sigma1_lazy") == doctest::Approx(0.75));
  CHECK(sigma1(flat_lazy.kernel(), uniform_measure(16)) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(flat_lazy.constant("ls_lazy") == doctest::Approx(1.0 / 8));

  GalleryInstance g = hypercube(4, 0.2, false);
  for (int x = 0; x < 16; ++x) {
    if (level(x) != 2) {
      for (int y = 0; y < 16; ++y) CHECK(g.kernel()(x, y) == flat.kernel()(x, y));
      continue;
    }
    for (int b = 0; b < 4; ++b) {
      int y = x ^ (1 << b);
      CHECK(g.kernel()(x, y) == doctest::Approx(level(y) > 2 ? 0.3 : 0.2));
    }
  }

  // the Hamming level of the walk is itself a birth-death chain; every state
  // on a level must produce the same lumped row
  double L[5][5] = {};
  L[0][1] = 1.0;
  L[1][0] = 0.25; L[1][2] = 0.75;
  L[2][1] = 0.4;  L[2][3] = 0.6;
  L[3][2] = 0.75; L[3][4] = 0.25;
  L[4][3] = 1.0;
  for (int x = 0; x < 16; ++x) {
    double up = 0.0, down = 0.0;
    for (int y = 0; y < 16; ++y) {
      if (level(y) == level(x) + 1) up += g.kernel()(x, y);
      if (level(y) == level(x) - 1) down += g.kernel()(x, y);
    }
    if (level(x) < 4) CHECK(up == doctest::Approx(L[level(x)][level(x) + 1]).epsilon(1e-12));
    if (level(x) > 0) CHECK(down == doctest::Approx(L[level(x)][level(x) - 1]).epsilon(1e-12));
  }

  CHECK(g.constant("epsilon") == doctest::Approx(0.2));
  CHECK(g.constant("C_eps") == doctest::Approx(std::pow(1.2, -2.0) * std::pow(0.8, 4.0)));
  CHECK(g.constant("stability_c") == doctest::Approx(1.5));
  // lazy perturbed member obeys the family singular value cap
  GalleryInstance gl = hypercube(4, 0.2, true);
  double cap = gl.constant("sigma1_member_upper");
  CHECK(cap == doctest::Approx(1.0 - gl.constant("C_eps") / 4.0));
  CHECK(sigma1(gl.kernel(), uniform_measure(16)) <= cap + 1e-9);
  CHECK(gl.constant("ls_member_lower") == doctest::Approx(gl.constant("C_eps") / 8.0));

  auto has_note = [](const GalleryInstance& inst, const std::string& s) {
    return std::find(inst.notes.begin(), inst.notes.end(), s) != inst.notes.end();
  };
  CHECK(has_note(g, "periodic"));
  CHECK(!has_note(gl, "periodic"));

  expect_error([] { hypercube(14, 0.0, false); }, errc::TooLarge);
  expect_error([] { hypercube(5, 0.0, false); }, errc::BadInput);
  expect_error([] { hypercube(0, 0.0, false); }, errc::BadInput);
  expect_error([] { hypercube(4, 1.0, false); }, errc::DeltaTooLarge);
}

TEST_CASE("permutation utilities: order, rank, composition") {
  std::vector<std::vector<int>> p3 = all_permutations(3);
  REQUIRE(p3.size() == 6);
  CHECK(p3[0] == std::vector<int>{0, 1, 2});
  CHECK(p3[1] == std::vector<int>{0, 2, 1});
  CHECK(p3[2] == std::vector<int>{1, 0, 2});
  CHECK(p3[3] == std::vector<int>{1, 2, 0});
  CHECK(p3[4] == std::vector<int>{2, 0, 1});
  CHECK(p3[5] == std::vector<int>{2, 1, 0});

  std::vector<std::vector<int>> p4 = all_permutations(4);
  for (size_t k = 0; k < p4.size(); ++k)
    CHECK(permutation_rank(p4[k]) == static_cast<long>(k));

  std::vector<int> a = {1, 2, 0};
  std::vector<int> b = {2, 1, 0};
  CHECK(permutation_compose(a, b) == std::vector<int>{0, 2, 1});
  for (const auto& p : p4) {
    std::vector<int> inv = permutation_inverse(p);
    std::vector<int> id = permutation_compose(p, inv);
    for (int k = 0; k < 4; ++k) CHECK(id[k] == k);
  }
  expect_error([] { all_permutations(7); }, errc::TooLarge);
}

TEST_CASE("transpose-i-random: row structure, invariance, constants") {
  GalleryInstance g2 = transpose_i_random(2, 1, false);
  CHECK(g2.kernel()(0, 0) == doctest::Approx(0.5));
  CHECK(g2.kernel()(0, 1) == doctest::Approx(0.5));
  CHECK(g2.kernel()(1, 0) == doctest::Approx(0.5));
  CHECK(g2.kernel()(1, 1) == doctest::Approx(0.5));
  GalleryInstance g2l = transpose_i_random(2, 1, true);
  CHECK(g2l.kernel()(0, 0) == doctest::Approx(0.75));
  CHECK(g2l.kernel()(0, 1) == doctest::Approx(0.25));

  GalleryInstance g = transpose_i_random(4, 2, false);
  REQUIRE(g.kernel().size() == 24);
  for (int x = 0; x < 24; ++x) {
    int nonzero = 0;
    for (int y = 0; y < 24; ++y) {
      if (g.kernel()(x, y) == 0.0) continue;
      ++nonzero;
      CHECK(g.kernel()(x, y) == doctest::Approx(0.25));
    }
    CHECK(nonzero == 4);
    CHECK(g.kernel()(x, x) == doctest::Approx(0.25));
  }
  Measure pi = invariant_measure(g.kernel());
  for (int x = 0; x < 24; ++x) CHECK(pi[x] == doctest::Approx(1.0 / 24).epsilon(1e-10));
  ReversibilityCheck rc = check_reversible(g.kernel(), uniform_measure(24));
  CHECK(rc.reversible);
  CHECK(!g.has_constant("mls_lower"));

  GalleryInstance gl = transpose_i_random(4, 2, true);
  for (int x = 0; x < 24; ++x) CHECK(gl.kernel()(x, x) == doctest::Approx(0.625));
  CHECK(gl.constant("mls_lower") == doctest::Approx(1.0 / 12));
  CHECK(gl.constant("mls_upper") == doctest::Approx(1.0 / 3));

  expect_error([] { transpose_i_random(7, 1, false); }, errc::TooLarge);
  expect_error([] { transpose_i_random(1, 1, false); }, errc::BadInput);
  expect_error([] { transpose_i_random(4, 0, false); }, errc::BadInput);
  expect_error([] { transpose_i_random(4, 5, false); }, errc::BadInput);
}

TEST_CASE("symmetric perturbation: envelope, symmetry, replay, spectrum cap") {
  // zero noise returns the lazy base kernel itself
  GalleryInstance base = transpose_i_random(4, 1, true);
  GalleryInstance g0 = symmetric_perturbation(4, 1, 0.0, 99);
  CHECK(max_kernel_diff(g0.kernel(), base.kernel()) <= 1e-15);

  GalleryInstance g = symmetric_perturbation(4, 1, 0.3, 42);
  const Kernel& K = g.kernel();
  const Kernel& Q = base.kernel();
  for (int x = 0; x < 24; ++x)
    for (int y = 0; y < 24; ++y) {
      CHECK(K(x, y) == K(y, x));
      CHECK(K(x, y) >= (1.0 - 0.3) * Q(x, y) - 1e-12);
      CHECK(K(x, y) <= (1.0 + 0.3) * Q(x, y) + 1e-12);
    }
  // symmetric and stochastic makes it doubly stochastic, so uniform invariant
  Measure pi = invariant_measure(K);
  for (int x = 0; x < 24; ++x) CHECK(pi[x] == doctest::Approx(1.0 / 24).epsilon(1e-10));

  GalleryInstance same = symmetric_perturbation(4, 1, 0.3, 42);
  CHECK(max_kernel_diff(g.kernel(), same.kernel()) == 0.0);
  GalleryInstance other = symmetric_perturbation(4, 1, 0.3, 43);
  CHECK(max_kernel_diff(g.kernel(), other.kernel()) > 1e-6);

  double cap = g.constant("sigma1_upper");
  CHECK(cap == doctest::Approx(1.0 - 0.7 / 8.0));
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    GalleryInstance s = symmetric_perturbation(4, 1, 0.3, seed);
    CHECK(sigma1(s.kernel(), uniform_measure(24)) <= cap + 1e-9);
  }

  expect_error([] { symmetric_perturbation(4, 1, 1.0, 1); }, errc::EpsTooLarge);
  expect_error([] { symmetric_perturbation(4, 1, -0.1, 1); }, errc::EpsTooLarge);
  expect_error([] { symmetric_perturbation(7, 1, 0.1, 1); }, errc::TooLarge);
  expect_error([] { symmetric_perturbation(4, 5, 0.1, 1); }, errc::BadInput);
}

TEST_CASE("sticky permutation: base row surgery and constants") {
  // zero shift returns the lazy transpose-with-first kernel
  GalleryInstance plain = transpose_i_random(3, 1, true);
  GalleryInstance z = sticky_permutation(3, 0, 0.0, 1);
  CHECK(max_kernel_diff(z.kernel(), plain.kernel()) <= 1e-15);

  const long rho = 2;
  GalleryInstance g = sticky_permutation(4, rho, 0.1, 1);
  GalleryInstance q1 = transpose_i_random(4, 1, true);
  const Kernel& K = g.kernel();
  CHECK(K(rho, rho) == doctest::Approx(q1.kernel()(rho, rho) + 0.1));
  int depleted = 0;
  for (int y = 0; y < 24; ++y) {
    if (y == rho || K(rho, y) == 0.0) continue;
    CHECK(K(rho, y) == doctest::Approx(0.125 - 0.1 / 3));
    ++depleted;
  }
  CHECK(depleted == 3);
  for (int x = 0; x < 24; ++x) {
    if (x == rho) continue;
    for (int y = 0; y < 24; ++y) CHECK(K(x, y) == q1.kernel()(x, y));
  }

  CHECK(g.constant("epsilon") == doctest::Approx(0.1 / 0.375));
  CHECK(g.constant("stability_c") == doctest::Approx(1.0 / (1.0 - 0.1 / 0.375)));
  CHECK(g.constant("mls_pcheck_lower") ==
        doctest::Approx(std::pow(1.0 - 0.1 / 0.375, 5.0) / 12.0));

  // reference measure is sandwiched around uniform
  const Measure& pit = g.measure();
  double lo = g.constant("sandwich_lower"), hi = g.constant("sandwich_upper");
  for (int x = 0; x < 24; ++x) {
    CHECK(pit[x] * 24.0 >= lo - 1e-12);
    CHECK(pit[x] * 24.0 <= hi + 1e-12);
  }

  expect_error([] { sticky_permutation(4, 2, 0.375, 1); }, errc::DeltaTooLarge);
  expect_error([] { sticky_permutation(4, 2, -0.01, 1); }, errc::DeltaTooLarge);
  expect_error([] { sticky_permutation(4, 24, 0.1, 1); }, errc::BadInput);
  expect_error([] { sticky_permutation(4, 2, 0.1, 0); }, errc::BadInput);
  expect_error([] { sticky_permutation(4, 2, 0.1, 5); }, errc::BadInput);
  expect_error([] { sticky_permutation(7, 2, 0.1, 1); }, errc::TooLarge);
}

TEST_CASE("sticky permutation: members are cycle relabelings of the base") {
  const long n = 4, rho = 5;
  const double delta = 0.12;
  GalleryInstance g1 = sticky_permutation(n, rho, delta, 1);
  std::vector<std::vector<int>> perms = all_permutations(static_cast<int>(n));
  std::vector<int> sigma = {1, 2, 3, 0};

  std::vector<int> sp(n);
  for (long k = 0; k < n; ++k) sp[k] = static_cast<int>(k);
  for (long i = 2; i <= n; ++i) {
    sp = permutation_compose(sp, sigma);
    std::vector<int> sq = permutation_inverse(sp);
    GalleryInstance gi = sticky_permutation(n, rho, delta, i);
    for (int x = 0; x < 24; ++x) {
      int cx = static_cast<int>(
          permutation_rank(permutation_compose(sp, permutation_compose(perms[x], sq))));
      for (int y = 0; y < 24; ++y) {
        int cy = static_cast<int>(
            permutation_rank(permutation_compose(sp, permutation_compose(perms[y], sq))));
        CHECK(gi.kernel()(x, y) == g1.kernel()(cx, cy));
      }
    }
    // the sticky state moves with the relabeling
    int xi = static_cast<int>(permutation_rank(
        permutation_compose(permutation_inverse(sp),
                            permutation_compose(perms[rho], sp))));
    CHECK(gi.kernel()(xi, xi) == doctest::Approx(0.625 + delta));
  }
}

TEST_CASE("sticky permutation: cycling schedule keeps the relabeled reference measure") {
  const long n = 4, rho = 3;
  const double delta = 0.1;
  std::vector<Kernel> kernels;
  for (long i = 1; i <= n; ++i) kernels.push_back(sticky_permutation(n, rho, delta, i).kernel());
  GalleryInstance g1 = sticky_permutation(n, rho, delta, 1);
  const Measure& pit = g1.measure();

  const long horizon = 2 * n + 1;
  Schedule s = make_schedule(kernels, ScheduleRule::fixed_cycle, 0, horizon);
  std::vector<Measure> mus = evolve(pit, s, horizon);

  std::vector<std::vector<int>> perms = all_permutations(static_cast<int>(n));
  std::vector<int> sigma = {1, 2, 3, 0};
  std::vector<int> siginv = permutation_inverse(sigma);
  for (long t = 0; t <= horizon; ++t) {
    // t applications of the relabeling map y -> sigma y sigma^{-1}
    for (int x = 0; x < 24; ++x) {
      std::vector<int> y = perms[x];
      for (long r = 0; r < t; ++r)
        y = permutation_compose(sigma, permutation_compose(y, siginv));
      CHECK(mus[t][x] == doctest::Approx(pit[permutation_rank(y)]).epsilon(1e-12));
    }
  }
}
