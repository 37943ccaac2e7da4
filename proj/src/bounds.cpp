#include "imc/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "imc/distances.hpp"
#include "imc/errors.hpp"
#include "imc/linalg.hpp"
#include "imc/rng.hpp"
#include "imc/spectral.hpp"

namespace imc {

std::vector<double> BoundReport::slack() const {
  std::vector<double> s(bound.size());
  for (size_t i = 0; i < bound.size(); ++i) s[i] = bound[i] - exact[i];
  return s;
}

double BoundReport::min_slack() const {
  double m = kInf;
  for (size_t i = 0; i < bound.size(); ++i) m = std::min(m, bound[i] - exact[i]);
  return m;
}

namespace {

void check_window(const NashParams& params, long n, long m) {
  require(params.C > 0.0 && params.D > 0.0 && params.N >= 1, errc::BadInput,
          "nash bound: C, D must be positive and N >= 1");
  require(0 <= m && m <= n && n <= params.N, errc::RangeViolation,
          "nash bound: need 0 <= m <= n <= N, got m=" + std::to_string(m) +
              " n=" + std::to_string(n) + " N=" + std::to_string(params.N));
}

void check_sigmas(const std::vector<double>& sigmas, long n, const char* who) {
  require(static_cast<long>(sigmas.size()) >= n, errc::MissingSigma,
          std::string(who) + ": need singular values through step " + std::to_string(n) +
              ", have " + std::to_string(sigmas.size()));
}

// prefactor^D * prod_{m+1}^{n} f_i and prefactor^{2D} * prod_{m+1}^{m+u} f_i
MergingBound assemble(double prefactor_base, double D, const std::vector<double>& factors,
                      long n, long m) {
  MergingBound out;
  double prod = 1.0;
  for (long i = m + 1; i <= n; ++i) prod *= factors[i - 1];
  out.d2 = std::pow(prefactor_base, D) * prod;
  long u = n - 2 * m;
  if (u < 0) {
    out.sup = kInf;  // no split n = 2m + u with u >= 0
    return out;
  }
  double prod_u = 1.0;
  for (long i = m + 1; i <= m + u; ++i) prod_u *= factors[i - 1];
  out.sup = std::pow(prefactor_base, 2.0 * D) * prod_u;
  return out;
}

double ceil4d(double D) { return 1.0 + std::ceil(4.0 * D); }

}  // namespace

double nash_norm_bound(const NashParams& params, long n, long m) {
  check_window(params, n, m);
  double B = (1.0 + 1.0 / static_cast<double>(params.N)) * ceil4d(params.D);
  return std::pow(4.0 * params.C * B / static_cast<double>(n - m + 1), params.D);
}

MergingBound nash_d2_bound(const NashParams& params, const std::vector<double>& sigmas,
                           long n, long m) {
  check_window(params, n, m);
  check_sigmas(sigmas, n, "nash_d2_bound");
  double base = 8.0 * params.C * ceil4d(params.D) / static_cast<double>(m + 1);
  return assemble(base, params.D, sigmas, n, m);
}

MergingBound nash_stab_bound(const NashParams& params, double c,
                             const std::vector<double>& sigmas0, long n, long m) {
  check_window(params, n, m);
  check_sigmas(sigmas0, n, "nash_stab_bound");
  require(c >= 1.0, errc::BadInput, "nash_stab_bound: need c >= 1");
  std::vector<double> factors(sigmas0.size());
  for (size_t i = 0; i < sigmas0.size(); ++i) {
    double gap2 = (1.0 - sigmas0[i] * sigmas0[i]) / (c * c);
    factors[i] = std::sqrt(std::max(1.0 - gap2, 0.0));
  }
  double base = 8.0 * params.C * std::pow(c, 2.0 + 3.0 / (2.0 * params.D)) * ceil4d(params.D) /
                static_cast<double>(m + 1);
  return assemble(base, params.D, factors, n, m);
}

MergingBound nash_stab2_bound(const NashParams& params, double c,
                              const std::vector<double>& sigmas_pi, long n, long m) {
  check_window(params, n, m);
  check_sigmas(sigmas_pi, n, "nash_stab2_bound");
  require(c >= 1.0, errc::BadInput, "nash_stab2_bound: need c >= 1");
  double c4 = c * c * c * c;
  std::vector<double> factors(sigmas_pi.size());
  for (size_t i = 0; i < sigmas_pi.size(); ++i) {
    double gap2 = (1.0 - sigmas_pi[i] * sigmas_pi[i]) / c4;
    factors[i] = std::sqrt(std::max(1.0 - gap2, 0.0));
  }
  double base = 8.0 * params.C * std::pow(c, 4.0 + 3.0 / params.D) * ceil4d(params.D) /
                static_cast<double>(m + 1);
  return assemble(base, params.D, factors, n, m);
}

long ls_threshold(const std::vector<double>& ls_constants, double mu0x) {
  require(mu0x > 0.0 && mu0x < 1.0, errc::BadInput, "ls_threshold: mu0x must be in (0,1)");
  // target = log log(mu0x^{-1/2}); nonpositive target needs no burn-in
  double inner = 0.5 * std::log(1.0 / mu0x);
  if (inner <= 1.0) return 0;
  double target = std::log(inner);
  double acc = 0.0;
  for (size_t i = 0; i < ls_constants.size(); ++i) {
    require(ls_constants[i] >= 0.0, errc::BadInput, "ls_threshold: negative constant");
    acc += std::log1p(ls_constants[i]);
    if (acc >= target) return static_cast<long>(i) + 1;
  }
  fail(errc::NeverReached,
       "ls_threshold: " + std::to_string(ls_constants.size()) +
           " constants accumulate " + std::to_string(acc) + " < target " +
           std::to_string(target));
}

double ls_d2_bound(const std::vector<double>& ls_constants, const std::vector<double>& sigmas,
                   double mu0x, long n) {
  long mx = ls_threshold(ls_constants, mu0x);
  require(n >= mx, errc::ThresholdNotMet,
          "ls_d2_bound: n=" + std::to_string(n) + " below burn-in m_x=" + std::to_string(mx));
  check_sigmas(sigmas, n, "ls_d2_bound");
  double prod = 1.0;
  for (long i = mx + 1; i <= n; ++i) prod *= sigmas[i - 1] * sigmas[i - 1];
  return std::exp(2.0) * prod;
}

LsSupBound ls_sup_bound(const std::vector<double>& ls_P, const std::vector<double>& ls_Pcheck,
                        const std::vector<double>& sigmas, double mu0_min, double mun_min,
                        long n) {
  LsSupBound out;
  out.m0 = ls_threshold(ls_P, mu0_min);
  // backward threshold: the last t constants, i = n-t+1 .. n
  require(mun_min > 0.0 && mun_min < 1.0, errc::BadInput,
          "ls_sup_bound: mun_min must be in (0,1)");
  require(static_cast<long>(ls_Pcheck.size()) >= n, errc::MissingSigma,
          "ls_sup_bound: need Pcheck constants through step " + std::to_string(n));
  double inner = 0.5 * std::log(1.0 / mun_min);
  if (inner <= 1.0) {
    out.mn = 0;
  } else {
    double target = std::log(inner), acc = 0.0;
    long t = 0;
    bool reached = false;
    for (long i = n; i >= 1 && !reached; --i) {
      acc += std::log1p(ls_Pcheck[i - 1]);
      ++t;
      reached = acc >= target;
    }
    require(reached, errc::NeverReached, "ls_sup_bound: backward threshold never reached");
    out.mn = t;
  }
  out.m = std::max(out.m0, out.mn);
  require(n >= 2 * out.m, errc::HorizonTooShort,
          "ls_sup_bound: need n >= 2m, got n=" + std::to_string(n) +
              " m=" + std::to_string(out.m));
  check_sigmas(sigmas, n - out.m, "ls_sup_bound");
  double prod = 1.0;
  for (long i = out.m + 1; i <= n - out.m; ++i) prod *= sigmas[i - 1];
  out.bound = std::exp(2.0) * prod;
  return out;
}

Certificate cor_sob_norm_check(const Schedule& s, const Measure& mu0, double q0, long n,
                               long trials) {
  require(q0 >= 2.0, errc::BadInput, "cor_sob_norm_check: q0 must be >= 2");
  require(n >= 0 && n <= s.horizon, errc::RangeViolation,
          "cor_sob_norm_check: n outside the schedule horizon");
  std::vector<Measure> mus = evolve(mu0, s, n);
  double q = q0;
  for (long i = 1; i <= n; ++i) {
    Kernel P = reversibilization(s.at_step(i), mus[i - 1], RevSide::star_then_K);
    double lhat = 0.0;
    try {
      lhat = log_sobolev_constant(P, mus[i]).value;
    } catch (const Error& e) {
      if (e.code() != errc::Reducible && e.code() != errc::NoAdmissibleWitness) throw;
    }
    q *= 1.0 + lhat;
  }
  Kernel K0n = compose(s, 0, n);

  const uint64_t seed = 0xc05b0bULL;
  Certificate cert;
  cert.kind = "iterated-contraction";
  cert.trials = trials;
  cert.seed = seed;
  double worst = 0.0;
  Vec worstf;
  const int sz = s.size();
  auto probe = [&](const Vec& f) {
    double denom = lp_norm(f, mus[n], q0);
    if (denom <= 0.0) return;
    Vec Kf = matvec(K0n.rows, f);
    double r = lp_norm(Kf, mu0, q) / denom;
    if (r > worst) {
      worst = r;
      worstf = f;
    }
  };
  SplitMix64 rng(seed);
  for (long t = 0; t < trials; ++t) {
    Vec f(sz);
    double sigma = 0.25 * std::exp(rng.uniform(0.0, 2.8));
    for (int x = 0; x < sz; ++x) f[x] = std::exp(sigma * rng.normal());
    probe(f);
  }
  for (int x = 0; x < sz; ++x) {
    Vec f(sz, 1e-3);
    f[x] = 1.0;
    probe(f);
  }
  cert.value = worst;
  cert.witness = worstf;
  cert.pass = worst <= 1.0 + 1e-9;
  return cert;
}

double entropy_tv_bound(const std::vector<double>& mls_constants, double rho, double mu0_min,
                        long n) {
  require(rho > 0.0 && rho <= 1.0, errc::BadInput, "entropy_tv_bound: rho must be in (0,1]");
  require(mu0_min > 0.0 && mu0_min < 1.0, errc::BadInput,
          "entropy_tv_bound: mu0_min must be in (0,1)");
  require(static_cast<long>(mls_constants.size()) >= n, errc::MissingSigma,
          "entropy_tv_bound: need constants through step " + std::to_string(n));
  double prod = 1.0;
  for (long i = 1; i <= n; ++i) {
    require(mls_constants[i - 1] >= 0.0, errc::BadInput,
            "entropy_tv_bound: negative constant");
    prod *= std::max(1.0 - rho * mls_constants[i - 1], 0.0);
  }
  return std::sqrt(2.0 * std::log(1.0 / mu0_min)) * std::sqrt(prod);
}

double entropy_tv_bound(const std::vector<double>& mls_constants, double mu0_min, long n) {
  return entropy_tv_bound(mls_constants, rho_lower_bound(), mu0_min, n);
}

}  // namespace imc
