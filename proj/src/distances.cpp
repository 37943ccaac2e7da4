#include "imc/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "imc/errors.hpp"
#include "imc/linalg.hpp"

namespace imc {

double tv_distance(const Measure& mu, const Measure& nu) {
  require(mu.size() == nu.size(), errc::SizeMismatch, "tv_distance: size mismatch");
  double s = 0.0;
  for (int x = 0; x < mu.size(); ++x) s += std::fabs(mu[x] - nu[x]);
  return 0.5 * s;
}

double dp_distance(const Measure& nu, const Measure& mu, double p) {
  require(nu.size() == mu.size(), errc::SizeMismatch, "dp_distance: size mismatch");
  require(mu.positive, errc::ZeroReference, "dp_distance: reference measure has a zero entry");
  require(p >= 1.0, errc::BadInput, "dp_distance: p must be >= 1");
  if (std::isinf(p)) {
    double worst = 0.0;
    for (int x = 0; x < mu.size(); ++x)
      worst = std::max(worst, std::fabs(nu[x] / mu[x] - 1.0));
    return worst;
  }
  double s = 0.0;
  for (int x = 0; x < mu.size(); ++x)
    s += std::pow(std::fabs(nu[x] / mu[x] - 1.0), p) * mu[x];
  return std::pow(s, 1.0 / p);
}

double lp_norm(const Vec& f, const Measure& mu, double p) {
  require(static_cast<int>(f.size()) == mu.size(), errc::SizeMismatch, "lp_norm: size mismatch");
  require(p >= 1.0, errc::BadInput, "lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::fabs(v));
    return m;
  }
  double s = 0.0;
  for (int x = 0; x < mu.size(); ++x) s += std::pow(std::fabs(f[x]), p) * mu[x];
  return std::pow(s, 1.0 / p);
}

double relsup_pairwise(const Matrix& rows) {
  // per column z: mixed zero and positive entries force infinity; an all-zero
  // column contributes 0 (the 0/0 := 1 convention); otherwise max/min - 1
  // dominates both orderings of every pair
  double worst = 0.0;
  for (int z = 0; z < rows.m; ++z) {
    double lo = kInf, hi = 0.0;
    bool any_zero = false, any_pos = false;
    for (int x = 0; x < rows.n; ++x) {
      double v = rows(x, z);
      if (v == 0.0) {
        any_zero = true;
      } else {
        any_pos = true;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (any_zero && any_pos) return kInf;
    if (any_pos) worst = std::max(worst, hi / lo - 1.0);
  }
  return worst;
}

double relsup_pairwise(const Kernel& K0n) { return relsup_pairwise(K0n.rows); }

namespace {

double tv_rows(const double* a, const double* b, int m) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += std::fabs(a[j] - b[j]);
  return 0.5 * s;
}

}  // namespace

double tv_pairwise(const Matrix& rows) {
  const int n = rows.n;
  if (n < 2) return 0.0;
  // triangle-inequality pruning against row 0: TV(x,y) <= t[x] + t[y], so the
  // scan runs over anchor-distance-sorted rows and stops once the bound
  // cannot beat the best pair found. exact: pruned pairs are dominated.
  Vec t(n, 0.0);
  for (int x = 1; x < n; ++x) t[x] = tv_rows(rows.row(0), rows.row(x), rows.m);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return t[a] > t[b]; });
  double best = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    if (t[order[i]] + t[order[i + 1]] <= best) break;
    for (int j = i + 1; j < n; ++j) {
      if (t[order[i]] + t[order[j]] <= best) break;
      best = std::max(best, tv_rows(rows.row(order[i]), rows.row(order[j]), rows.m));
    }
  }
  return best;
}

double tv_pairwise(const Kernel& K0n) { return tv_pairwise(K0n.rows); }

double max_dp_rows(const Matrix& K0n, const Measure& mun, double p) {
  require(K0n.m == mun.size(), errc::SizeMismatch, "max_dp_rows: size mismatch");
  require(mun.positive, errc::ZeroReference, "max_dp_rows: reference has a zero entry");
  require(p >= 1.0, errc::BadInput, "max_dp_rows: p must be >= 1");
  double worst = 0.0;
  for (int x = 0; x < K0n.n; ++x) {
    const double* row = K0n.row(x);
    double v;
    if (std::isinf(p)) {
      v = 0.0;
      for (int y = 0; y < K0n.m; ++y) v = std::max(v, std::fabs(row[y] / mun[y] - 1.0));
    } else {
      double s = 0.0;
      for (int y = 0; y < K0n.m; ++y)
        s += std::pow(std::fabs(row[y] / mun[y] - 1.0), p) * mun[y];
      v = std::pow(s, 1.0 / p);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double center_to_pairwise(double eps) {
  require(eps >= 0.0, errc::BadInput, "center_to_pairwise: eps must be nonnegative");
  require(eps <= 0.5, errc::EpsTooLarge, "center_to_pairwise: eps must be <= 1/2");
  return 4.0 * eps;
}

long default_horizon(int size) { return 50L * size * size; }

namespace {

MergingReport run_merging(const Schedule& s, std::vector<double> thresholds, long horizon,
                          bool stop_on_relsup) {
  require(horizon >= 0 && horizon <= s.horizon, errc::RangeViolation,
          "merging horizon exceeds schedule horizon");
  for (double eps : thresholds)
    require(eps > 0.0 && eps < 1.0, errc::BadInput, "merging threshold must lie in (0,1)");
  MergingReport rep;
  rep.kind = stop_on_relsup ? "relsup" : "tv";
  rep.thresholds = std::move(thresholds);
  rep.crossing.assign(rep.thresholds.size(), -1);
  if (s.size() == 1) {  // a single state merges at n = 0
    for (long& c : rep.crossing) c = 0;
    return rep;
  }
  Matrix P = Matrix::identity(s.size());
  for (long n = 1; n <= horizon; ++n) {
    P = matmul(P, s.at_step(n).rows);
    for (int x = 0; x < P.n; ++x) {
      double* px = P.row(x);
      double sum = 0.0;
      for (int y = 0; y < P.m; ++y) sum += px[y];
      for (int y = 0; y < P.m; ++y) px[y] /= sum;
    }
    rep.max_tv.push_back(tv_pairwise(P));
    rep.max_relsup.push_back(relsup_pairwise(P));
    rep.horizon = n;
    double driving = stop_on_relsup ? rep.max_relsup.back() : rep.max_tv.back();
    bool all_crossed = true;
    for (size_t k = 0; k < rep.thresholds.size(); ++k) {
      if (rep.crossing[k] < 0 && driving < rep.thresholds[k]) rep.crossing[k] = n;
      all_crossed = all_crossed && rep.crossing[k] >= 0;
    }
    if (all_crossed) break;
  }
  return rep;
}

}  // namespace

MergingReport merging_time_tv(const Schedule& s, const std::vector<double>& thresholds,
                              long horizon) {
  return run_merging(s, thresholds, horizon, false);
}

MergingReport merging_time_relsup(const Schedule& s, const std::vector<double>& thresholds,
                                  long horizon) {
  return run_merging(s, thresholds, horizon, true);
}

MergingReport merging_time_tv(const Schedule& s, double eps, long horizon) {
  return run_merging(s, {eps}, horizon, false);
}

MergingReport merging_time_relsup(const Schedule& s, double eps, long horizon) {
  return run_merging(s, {eps}, horizon, true);
}

namespace {

bool is_one(double p) { return p == 1.0; }
bool is_two(double p) { return p == 2.0; }
bool is_infp(double p) { return std::isinf(p); }

}  // namespace

double operator_norm(const Matrix& A, const Measure& nu, const Measure& mu, double p, double q) {
  require(A.m == nu.size() && A.n == mu.size(), errc::SizeMismatch,
          "operator_norm: shape mismatch");
  require(nu.positive, errc::ZeroImageMass, "operator_norm: domain weight has a zero entry");
  require(mu.positive, errc::ZeroReference, "operator_norm: range weight has a zero entry");
  const int n = A.n, m = A.m;
  if (is_one(p)) {
    // extremals are scaled point masses: max over columns y of
    // ||A(.,y)||_{l^q(mu)} / nu(y)
    double worst = 0.0;
    for (int y = 0; y < m; ++y) {
      double col;
      if (is_one(q)) {
        col = 0.0;
        for (int x = 0; x < n; ++x) col += std::fabs(A(x, y)) * mu[x];
      } else if (is_two(q)) {
        col = 0.0;
        for (int x = 0; x < n; ++x) col += A(x, y) * A(x, y) * mu[x];
        col = std::sqrt(col);
      } else if (is_infp(q)) {
        col = 0.0;
        for (int x = 0; x < n; ++x) col = std::max(col, std::fabs(A(x, y)));
      } else {
        fail(errc::UnsupportedPair, "operator_norm: unsupported q");
      }
      worst = std::max(worst, col / nu[y]);
    }
    return worst;
  }
  if (is_two(p) && is_two(q)) {
    // top singular value of B = D_mu^(1/2) A D_nu^(-1/2)
    Matrix B(n, m);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < m; ++y) B(x, y) = std::sqrt(mu[x]) * A(x, y) / std::sqrt(nu[y]);
    Matrix BtB = matmul(B.transposed(), B);
    SymEig eig = jacobi_eigen(std::move(BtB));
    return std::sqrt(std::max(0.0, eig.values.front()));
  }
  if (is_two(p) && is_infp(q)) {
    // Cauchy-Schwarz row bound, tight at f = A(x,.)/nu
    double worst = 0.0;
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      for (int y = 0; y < m; ++y) s += A(x, y) * A(x, y) / nu[y];
      worst = std::max(worst, std::sqrt(s));
    }
    return worst;
  }
  if (is_infp(p) && is_infp(q)) {
    double worst = 0.0;
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      for (int y = 0; y < m; ++y) s += std::fabs(A(x, y));
      worst = std::max(worst, s);
    }
    return worst;
  }
  fail(errc::UnsupportedPair, "operator_norm: pair (" + std::to_string(p) + "," +
                                  std::to_string(q) + ") has no closed form here");
}

double operator_norm(const Kernel& K, const Measure& mu, double p, double q) {
  require(mu.size() == K.size(), errc::SizeMismatch, "operator_norm: size mismatch");
  require(mu.positive, errc::ZeroReference, "operator_norm: mu must be positive");
  Measure nu = push_forward(mu, K);
  require(nu.min_weight() > 1e-14, errc::ZeroImageMass,
          "operator_norm: image measure mu K has a zero entry");
  return operator_norm(K.rows, nu, mu, p, q);
}

}  // namespace imc
