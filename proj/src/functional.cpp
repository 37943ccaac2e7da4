#include "imc/functional.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "imc/distances.hpp"
#include "imc/errors.hpp"
#include "imc/rng.hpp"
#include "imc/spectral.hpp"

namespace imc {

double l2_entropy(const Vec& f, const Measure& nu) {
  const int n = nu.size();
  require(static_cast<int>(f.size()) == n, errc::SizeMismatch, "l2_entropy: size mismatch");
  require(nu.positive, errc::ZeroReference, "l2_entropy: nu must be positive");
  double s = 0.0, vlo = f[0] * f[0], vhi = vlo;
  for (int x = 0; x < n; ++x) {
    double v = f[x] * f[x];
    s += nu[x] * v;
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  require(s > 0.0, errc::ZeroFunction, "l2_entropy of the zero function");
  if (vlo == vhi) return 0.0;  // |f| constant: exact zero, not rounding noise
  double L = 0.0;
  for (int x = 0; x < n; ++x) {
    double v = f[x] * f[x];
    if (v > 0.0) L += nu[x] * v * std::log(v / s);
  }
  return std::max(L, 0.0);
}

double relative_entropy(const Measure& mu, const Measure& nu) {
  const int n = nu.size();
  require(mu.size() == n, errc::SizeMismatch, "relative_entropy: size mismatch");
  require(nu.positive, errc::ZeroReference, "relative_entropy: nu must be positive");
  double e = 0.0;
  for (int x = 0; x < n; ++x)
    if (mu[x] > 0.0) e += mu[x] * std::log(mu[x] / nu[x]);
  return std::max(e, 0.0);
}

const char* estimate_kind_name(EstimateKind k) {
  switch (k) {
    case EstimateKind::exact_small: return "exact-small";
    case EstimateKind::multistart_numeric: return "multistart-numeric";
    case EstimateKind::comparison_lower_bound: return "comparison-lower-bound";
  }
  return "unknown";
}

namespace {

// E(g,h) = 1/2 sum_{x,y} (g(x)-g(y))(h(x)-h(y)) pi(x)P(x,y)
double dirichlet_pair(const Kernel& P, const Measure& pi, const Vec& g, const Vec& h) {
  const int n = P.size();
  double e = 0.0;
  for (int x = 0; x < n; ++x) {
    const double* px = P.rows.row(x);
    for (int y = 0; y < n; ++y) {
      if (px[y] == 0.0) continue;
      e += (g[x] - g[y]) * (h[x] - h[y]) * pi[x] * px[y];
    }
  }
  return 0.5 * e;
}

void require_reversible_irreducible(const Kernel& P, const Measure& pi, const char* who) {
  ReversibilityCheck rc = check_reversible(P, pi);
  require(rc.reversible, errc::NotReversible,
          std::string(who) + ": detailed balance violated by " +
              std::to_string(rc.max_violation));
  require(is_irreducible(P), errc::Reducible, std::string(who) + ": kernel is reducible");
}

double pi_norm2(const Vec& f, const Measure& pi) {
  double s = 0.0;
  for (int x = 0; x < pi.size(); ++x) s += pi[x] * f[x] * f[x];
  return std::sqrt(s);
}

// eigenfunction psi_1 of the pi-symmetrized kernel, used for near-constant starts
Vec second_eigenfunction(const Kernel& P, const Measure& pi) {
  SpectralReport rep = singular_values(P, pi);
  const int n = P.size();
  Vec psi(n);
  for (int x = 0; x < n; ++x) psi[x] = rep.psi(x, 1);
  return psi;
}

// closed form for the two-point log-Sobolev constant: with w = pi(0)P(0,1)
// and theta = min(pi), l = w (1-2 theta)/(theta(1-theta) log((1-theta)/theta)),
// continuously extended to 2w at theta = 1/2
double two_point_ls(const Kernel& P, const Measure& pi) {
  double w = pi[0] * P(0, 1);
  double th = std::min(pi[0], pi[1]);
  if (std::fabs(th - 0.5) < 1e-9) return 2.0 * w;
  return w * (1.0 - 2.0 * th) / (th * (1.0 - th) * std::log((1.0 - th) / th));
}

struct LsObjective {
  const Kernel& P;
  const Measure& pi;

  double value(const Vec& f) const {
    double e = dirichlet_pair(P, pi, f, f);
    double s = 0.0;
    for (int x = 0; x < pi.size(); ++x) s += pi[x] * f[x] * f[x];
    double L = 0.0;
    for (int x = 0; x < pi.size(); ++x) {
      double v = f[x] * f[x];
      if (v > 0.0) L += pi[x] * v * std::log(v / s);
    }
    // below this floor the entropy is rounding noise and the ratio is garbage;
    // the near-constant starts keep the limit value reachable anyway
    if (L <= 1e-9 * s) return -1.0;
    return e / L;
  }

  // gradient of E/L at f (any scaling); E' = 2 pi (I-P)f, L' = 2 pi f log(f^2/s)
  void gradient(const Vec& f, Vec& g) const {
    const int n = pi.size();
    Vec Pf = matvec(P.rows, f);
    double e = dirichlet_pair(P, pi, f, f);
    double s = 0.0;
    for (int x = 0; x < n; ++x) s += pi[x] * f[x] * f[x];
    double L = 0.0;
    for (int x = 0; x < n; ++x) {
      double v = f[x] * f[x];
      if (v > 0.0) L += pi[x] * v * std::log(v / s);
    }
    for (int x = 0; x < n; ++x) {
      double de = 2.0 * pi[x] * (f[x] - Pf[x]);
      double dl = (f[x] == 0.0) ? 0.0 : 2.0 * pi[x] * f[x] * std::log(f[x] * f[x] / s);
      g[x] = (de * L - e * dl) / (L * L);
    }
  }

  void normalize(Vec& f) const {
    double nrm = pi_norm2(f, pi);
    for (double& v : f) v /= nrm;
  }
};

// modified objective in the h parametrization f = e^h, u = e^{2h}
struct MlsObjective {
  const Kernel& P;
  const Measure& pi;

  void ratio_parts(const Vec& h, double& num, double& den, double& s) const {
    const int n = pi.size();
    Vec u(n);
    s = 0.0;
    for (int x = 0; x < n; ++x) {
      u[x] = std::exp(2.0 * h[x]);
      s += pi[x] * u[x];
    }
    num = 0.0;
    for (int x = 0; x < n; ++x) {
      const double* px = P.rows.row(x);
      for (int y = 0; y < n; ++y) {
        if (px[y] == 0.0) continue;
        num += (u[x] - u[y]) * (h[x] - h[y]) * pi[x] * px[y];
      }
    }
    // E(f^2, log f^2) with log f^2 = 2h: the half and the 2 cancel
    den = 0.0;
    for (int x = 0; x < n; ++x) den += pi[x] * u[x] * std::log(u[x] / s);
  }

  double value(const Vec& h) const {
    double num, den, s;
    ratio_parts(h, num, den, s);
    if (den <= 1e-9 * s) return -1.0;  // entropy at rounding-noise level
    return num / den;
  }

  void gradient(const Vec& h, Vec& g) const {
    const int n = pi.size();
    Vec u(n);
    double num, den, s;
    ratio_parts(h, num, den, s);
    for (int x = 0; x < n; ++x) u[x] = std::exp(2.0 * h[x]);
    for (int z = 0; z < n; ++z) {
      double dn = 0.0;
      const double* pz = P.rows.row(z);
      for (int y = 0; y < n; ++y) {
        if (pz[y] == 0.0) continue;
        dn += 2.0 * pi[z] * pz[y] * (2.0 * u[z] * (h[z] - h[y]) + (u[z] - u[y]));
      }
      double dd = 2.0 * pi[z] * u[z] * std::log(u[z] / s);
      g[z] = (dn * den - num * dd) / (den * den);
    }
  }

  void normalize(Vec& h) const {  // recenter so sum pi e^{2h} = 1
    double s = 0.0;
    for (int x = 0; x < pi.size(); ++x) s += pi[x] * std::exp(2.0 * h[x]);
    double shift = 0.5 * std::log(s);
    for (double& v : h) {
      v -= shift;
      v = std::clamp(v, -18.0, 18.0);
    }
  }
};

// projected gradient descent with step halving from one start; returns the
// best objective value seen and leaves the iterate in f
template <typename Obj>
double descend(const Obj& obj, Vec& f) {
  obj.normalize(f);
  double best = obj.value(f);
  if (best < 0.0) return best;
  Vec g(f.size()), trial(f.size());
  double eta = 0.1;
  int stall = 0;
  for (int iter = 0; iter < 3000 && stall < 40; ++iter) {
    obj.gradient(f, g);
    trial = f;
    for (size_t x = 0; x < f.size(); ++x) trial[x] -= eta * g[x];
    obj.normalize(trial);
    double v = obj.value(trial);
    if (v >= 0.0 && v < best - 1e-15 * std::fabs(best)) {
      f = trial;
      best = v;
      eta *= 1.3;
      stall = 0;
    } else {
      eta *= 0.5;
      if (eta < 1e-14) break;
      ++stall;
    }
  }
  return best;
}

bool nearly_constant(const Vec& f) {
  double lo = f[0], hi = f[0];
  for (double v : f) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo <= 1e-9 * (1.0 + std::fabs(hi));
}

}  // namespace

double ls_ratio(const Kernel& P, const Measure& pi, const Vec& f) {
  require(static_cast<int>(f.size()) == P.size() && pi.size() == P.size(), errc::SizeMismatch,
          "ls_ratio: size mismatch");
  double L = l2_entropy(f, pi);
  require(L > 0.0, errc::ZeroFunction, "ls_ratio: |f| is constant");
  return dirichlet_pair(P, pi, f, f) / L;
}

double mls_ratio(const Kernel& P, const Measure& pi, const Vec& f) {
  const int n = P.size();
  require(static_cast<int>(f.size()) == n && pi.size() == n, errc::SizeMismatch,
          "mls_ratio: size mismatch");
  Vec f2(n), logf2(n);
  for (int x = 0; x < n; ++x) {
    require(f[x] != 0.0, errc::BadInput, "mls_ratio: f must be nonvanishing");
    f2[x] = f[x] * f[x];
    logf2[x] = std::log(f2[x]);
  }
  double L = l2_entropy(f, pi);
  require(L > 0.0, errc::ZeroFunction, "mls_ratio: |f| is constant");
  return dirichlet_pair(P, pi, f2, logf2) / L;
}

LogSobolevEstimate log_sobolev_constant(const Kernel& P, const Measure& pi) {
  const int n = P.size();
  require(pi.size() == n, errc::SizeMismatch, "log_sobolev_constant: size mismatch");
  require(n >= 2, errc::NoAdmissibleWitness,
          "log_sobolev_constant: no nonconstant f on one state");
  require_reversible_irreducible(P, pi, "log_sobolev_constant");
  if (n == 2) return {two_point_ls(P, pi), EstimateKind::exact_small, {}};

  LsObjective obj{P, pi};
  Vec psi = second_eigenfunction(P, pi);
  SplitMix64 rng(0x15b01ULL);
  Vec bestf;
  double best = kInf;
  for (int start = 0; start < 64; ++start) {
    Vec f(n);
    if (start == 0) {
      f = psi;
    } else if (start <= 4) {
      // near-constant family: ratio tends to gap/2 as t -> 0
      double t = std::pow(10.0, -5.0 + (start - 1));
      for (int x = 0; x < n; ++x) f[x] = 1.0 + t * psi[x];
    } else if (start == 5) {
      for (int x = 0; x < n; ++x) f[x] = std::max(psi[x], 0.0) + 1e-6;
    } else {
      for (int x = 0; x < n; ++x) f[x] = rng.normal();
    }
    double v = descend(obj, f);
    if (v >= 0.0 && v < best && !nearly_constant(f)) {
      best = v;
      bestf = f;
    }
  }
  require(!bestf.empty(), errc::NoAdmissibleWitness,
          "log_sobolev_constant: optimizer found no admissible witness");
  return {ls_ratio(P, pi, bestf), EstimateKind::multistart_numeric, bestf};
}

LogSobolevEstimate mls_constant(const Kernel& P, const Measure& pi) {
  const int n = P.size();
  require(pi.size() == n, errc::SizeMismatch, "mls_constant: size mismatch");
  require(n >= 2, errc::NoAdmissibleWitness, "mls_constant: no nonconstant f on one state");
  require_reversible_irreducible(P, pi, "mls_constant");
  MlsObjective obj{P, pi};
  if (n == 2) {
    // one scale-free parameter t = h(0) - h(1): dense scan plus golden-section
    auto ratio_of = [&](double t) {
      Vec h{0.5 * t, -0.5 * t};
      double v = obj.value(h);
      return v < 0.0 ? kInf : v;
    };
    double best = kInf, bestt = 1.0;
    for (int k = -60; k <= 15; ++k) {  // log-spaced |t| from 1e-6 to ~30, both signs
      double t = std::pow(10.0, 0.1 * k);
      for (double sgn : {1.0, -1.0}) {
        double v = ratio_of(sgn * t);
        if (v < best) {
          best = v;
          bestt = sgn * t;
        }
      }
    }
    double lo = bestt * 0.5, hi = bestt * 1.6;
    if (lo > hi) std::swap(lo, hi);
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200; ++it) {
      if (ratio_of(c) < ratio_of(d))
        b = d;
      else
        a = c;
      c = b - gr * (b - a);
      d = a + gr * (b - a);
    }
    double t = 0.5 * (a + b);
    if (ratio_of(t) > best) t = bestt;
    Vec f{std::exp(0.5 * t), std::exp(-0.5 * t)};
    return {mls_ratio(P, pi, f), EstimateKind::exact_small, {}};
  }

  Vec psi = second_eigenfunction(P, pi);
  SplitMix64 rng(0x315b01ULL);
  Vec besth;
  double best = kInf;
  for (int start = 0; start < 64; ++start) {
    Vec h(n);
    if (start <= 3) {
      // f = e^{t psi} near constants: ratio tends to 2 gap as t -> 0
      double t = std::pow(10.0, -5.0 + start);
      for (int x = 0; x < n; ++x) h[x] = t * psi[x];
    } else if (start == 4) {
      for (int x = 0; x < n; ++x) h[x] = psi[x];
    } else {
      for (int x = 0; x < n; ++x) h[x] = 0.5 * rng.normal();
    }
    double v = descend(obj, h);
    if (v >= 0.0 && v < best && !nearly_constant(h)) {
      best = v;
      besth = h;
    }
  }
  require(!besth.empty(), errc::NoAdmissibleWitness,
          "mls_constant: optimizer found no admissible witness");
  Vec f(n);
  for (int x = 0; x < n; ++x) f[x] = std::exp(besth[x]);
  return {mls_ratio(P, pi, f), EstimateKind::multistart_numeric, f};
}

LogSobolevEstimate comparison_bound(double value) {
  require(value >= 0.0, errc::BadInput, "comparison_bound: negative constant");
  return {value, EstimateKind::comparison_lower_bound, {}};
}

double entropy_contraction(const Kernel& K, const Measure& nu, long samples) {
  const int n = K.size();
  require(nu.size() == n, errc::SizeMismatch, "entropy_contraction: size mismatch");
  require(nu.positive, errc::ZeroReference, "entropy_contraction: nu must be positive");
  Measure nuK = push_forward(nu, K);
  double worst = 0.0;
  auto probe = [&](const Measure& mu) {
    double before = relative_entropy(mu, nu);
    if (before < 1e-14) return;
    Measure muK = push_forward(mu, K);
    for (int y = 0; y < n; ++y)
      if (muK[y] > 0.0 && nuK[y] <= 1e-300) {
        worst = kInf;  // image not absolutely continuous: no contraction at all
        return;
      }
    worst = std::max(worst, relative_entropy(muK, nuK) / before);
  };
  for (int x = 0; x < n; ++x) probe(point_mass(n, x));
  SplitMix64 rng(0xa1fa5eedULL);
  for (long t = 0; t < samples; ++t) {
    Vec w(n);
    double sum = 0.0;
    // alternate plain and heavily skewed draws
    for (int x = 0; x < n; ++x) {
      double e = rng.exponential();
      w[x] = (t % 2 == 0) ? e : e * e * e;
      sum += w[x];
    }
    if (sum <= 0.0) continue;
    for (double& v : w) v /= sum;
    probe(make_measure(std::move(w)));
  }
  if (std::isinf(worst)) return 0.0;
  return std::clamp(1.0 - worst, 0.0, 1.0);
}

double g_function(double q, double nu) {
  require(q >= 2.0, errc::BadInput, "g_function: q must be >= 2");
  require(nu >= 0.0, errc::BadInput, "g_function: nu must be >= 0");
  if (q == 2.0) return 1.0;  // numerator and denominator are both nu^2
  if (nu < 1e-5) {
    // second-order series: both sides vanish like nu^2, ratio -> 2(q-1)/q
    return 2.0 * (q - 1.0) / q * (1.0 - (q - 2.0) / 6.0 * nu);
  }
  double l1p = std::log1p(nu);
  double num = std::expm1(q * l1p) - q * nu;
  double den = std::expm1(0.5 * q * l1p);
  return num / (den * den);
}

double nu_of_kernel(const Kernel& K) {
  double minpos = kInf;
  for (int x = 0; x < K.size(); ++x)
    for (int y = 0; y < K.size(); ++y)
      if (K(x, y) > 0.0) minpos = std::min(minpos, K(x, y));
  require(std::isfinite(minpos), errc::BadInput, "nu_of_kernel: kernel has no positive entry");
  return 1.0 / minpos - 1.0;
}

double phi_gap(double x) {
  require(x >= -1.0, errc::BadInput, "phi_gap: x must be >= -1");
  auto phi = [](double t) {
    if (t <= -1.0) return 1.0;  // limit of (1+t)log(1+t) - t at t = -1
    return (1.0 + t) * std::log1p(t) - t;
  };
  const double c = 2.0 / (1.0 - std::log(2.0));
  return phi(x) - c * phi(0.5 * x);
}

double rho_lower_bound() {
  const double l2 = std::log(2.0);
  return l2 * (1.0 - l2) / 2.0;
}

double nash_ratio(const Kernel& P, const Measure& pi, const NashParams& params, const Vec& f) {
  require(params.C > 0.0 && params.D > 0.0 && params.N >= 1, errc::BadInput,
          "nash_ratio: C, D must be positive and N >= 1");
  double n2 = 0.0, n1 = 0.0;
  for (int x = 0; x < pi.size(); ++x) {
    n2 += pi[x] * f[x] * f[x];
    n1 += pi[x] * std::fabs(f[x]);
  }
  require(n2 > 0.0, errc::ZeroFunction, "nash_ratio: zero function");
  double e = dirichlet_pair(P, pi, f, f);
  double lhs = std::pow(n2, 1.0 + 0.5 / params.D);  // ||f||_2^{2 + 1/D}
  double rhs = (e + n2 / static_cast<double>(params.N)) * std::pow(n1, 1.0 / params.D);
  return lhs / rhs;
}

Certificate nash_certify(const Kernel& P, const Measure& pi, const NashParams& params,
                         long trials) {
  const int n = P.size();
  require(pi.size() == n, errc::SizeMismatch, "nash_certify: size mismatch");
  require_reversible_irreducible(P, pi, "nash_certify");
  const uint64_t seed = 0x6e617368ULL;
  Certificate cert;
  cert.kind = "nash";
  cert.trials = trials;
  cert.seed = seed;
  double best = 0.0;
  Vec bestf;
  auto probe = [&](const Vec& f) {
    if (nearly_constant(f)) return;
    double r = nash_ratio(P, pi, params, f);
    if (r > best) {
      best = r;
      bestf = f;
    }
  };

  // point masses and balls of the kernel's graph metric
  for (int c = 0; c < std::min(n, 64); ++c) {
    std::vector<int> d(n, -1);
    std::queue<int> bfs;
    d[c] = 0;
    bfs.push(c);
    while (!bfs.empty()) {
      int x = bfs.front();
      bfs.pop();
      for (int y = 0; y < n; ++y)
        if (y != x && P(x, y) > 0.0 && d[y] < 0) {
          d[y] = d[x] + 1;
          bfs.push(y);
        }
    }
    int diam = 0;
    for (int x = 0; x < n; ++x) diam = std::max(diam, d[x]);
    for (int r = 0; r < std::min(diam, 24); ++r) {  // r = diam would be constant
      Vec f(n, 0.0);
      for (int x = 0; x < n; ++x)
        if (d[x] >= 0 && d[x] <= r) f[x] = 1.0;
      probe(f);
    }
  }

  // eigenfunction snippets
  SpectralReport rep = singular_values(P, pi);
  for (int i = 1; i < std::min(n, 9); ++i) {
    Vec f(n), fpos(n);
    for (int x = 0; x < n; ++x) {
      f[x] = rep.psi(x, i);
      fpos[x] = std::max(f[x], 0.0);
    }
    probe(f);
    probe(fpos);
  }

  // seeded random signed functions
  SplitMix64 rng(seed);
  for (long t = 0; t < trials; ++t) {
    Vec f(n);
    double scale = std::exp(rng.uniform(-2.0, 2.0));
    for (int x = 0; x < n; ++x) {
      double v = rng.normal() * scale;
      if (t % 3 == 1) v = (rng.uniform01() < 0.2) ? v * 10.0 : 0.0;  // sparse spikes
      f[x] = v;
    }
    bool allzero = true;
    for (double v : f) allzero = allzero && v == 0.0;
    if (allzero) continue;
    probe(f);
  }

  cert.value = best;
  cert.witness = bestf;
  cert.pass = best <= params.C;
  return cert;
}

Certificate hypercontractivity_check(const Kernel& K, const Measure& mu, double q0,
                                     long trials) {
  const int n = K.size();
  require(mu.size() == n, errc::SizeMismatch, "hypercontractivity_check: size mismatch");
  require(q0 >= 2.0, errc::BadInput, "hypercontractivity_check: q0 must be >= 2");
  Measure mup = push_forward(mu, K);
  Kernel P = reversibilization(K, mu, RevSide::star_then_K);
  double lhat = 0.0;
  try {
    lhat = log_sobolev_constant(P, mup).value;
  } catch (const Error& e) {
    if (e.code() != errc::Reducible && e.code() != errc::NoAdmissibleWitness) throw;
    lhat = 0.0;  // reducible reversibilization: fall back to plain contraction
  }
  double q = (1.0 + lhat) * q0;

  const uint64_t seed = 0x68796372ULL;
  Certificate cert;
  cert.kind = "hypercontractivity";
  cert.trials = trials;
  cert.seed = seed;
  double worst = 0.0;
  Vec worstf;
  auto probe = [&](const Vec& f) {
    double denom = lp_norm(f, mup, q0);
    if (denom <= 0.0) return;
    Vec Kf = matvec(K.rows, f);
    double r = lp_norm(Kf, mu, q) / denom;
    if (r > worst) {
      worst = r;
      worstf = f;
    }
  };
  SplitMix64 rng(seed);
  for (long t = 0; t < trials; ++t) {
    Vec f(n);
    double sigma = 0.25 * std::exp(rng.uniform(0.0, 2.8));
    for (int x = 0; x < n; ++x) f[x] = std::exp(sigma * rng.normal());
    probe(f);
  }
  for (int x = 0; x < n; ++x) {  // spiky positive profiles
    Vec f(n, 1e-3);
    f[x] = 1.0;
    probe(f);
  }
  cert.value = worst;
  cert.witness = worstf;
  cert.pass = worst <= 1.0 + 1e-9;
  return cert;
}

}  // namespace imc
