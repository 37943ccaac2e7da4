#include "imc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>

#include "imc/errors.hpp"
#include "imc/functional.hpp"
#include "imc/rng.hpp"
#include "json.hpp"

namespace imc {

using nlohmann::json;

namespace {

double parse_real_token(const std::string& t, const std::string& what) {
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  require(end == t.c_str() + t.size() && !t.empty(), errc::BadInput,
          what + ": bad number '" + t + "'");
  return v;
}

const std::set<std::string>& known_families() {
  static const std::set<std::string> fams = {
      "circle",        "metropolis-bd-hat",      "metropolis-bd-check", "hypercube",
      "transpose-i-random", "symmetric-perturbation", "sticky-permutation"};
  return fams;
}

const std::set<std::string>& known_analyses() {
  static const std::set<std::string> a = {"merging", "spectral", "stability", "bounds"};
  return a;
}

const std::set<std::string>& known_bounds() {
  static const std::set<std::string> b = {"sigma-product", "nash",   "nash-stab",
                                          "nash-stab2",    "ls",     "ls-sup",
                                          "entropy"};
  return b;
}

// one gallery instance; the variant value reinterprets per family
GalleryInstance build_one(const ExperimentConfig& cfg, bool has_variant, double v) {
  const Config& c = cfg.raw;
  const std::string& fam = cfg.family;
  const bool lazy_walk = c.get_flag_or("lazy", false);
  if (fam == "circle") {
    double delta = has_variant ? v : c.get_real_or("delta", 0.0);
    return circle(c.get_int("p_N"), delta, lazy_walk);
  }
  if (fam == "metropolis-bd-hat" || fam == "metropolis-bd-check") {
    GalleryInstance base =
        metropolis_bd(c.get_real_or("alpha", 0.0), c.get_int("N"),
                      fam == "metropolis-bd-hat" ? BdFamily::hat : BdFamily::check);
    double s = has_variant ? v : c.get_real_or("s", 0.0);
    if (s != 0.0) {
      BdPerturbation pert = bd_perturbation_stability(base.kernel(), base.measure(), s);
      base.kernels[0] = pert.kernel;  // reference measure stays the base target
      base.params["s"] = s;
    }
    return base;
  }
  if (fam == "hypercube") {
    double delta = has_variant ? v : c.get_real_or("delta", 0.0);
    return hypercube(c.get_int("two_N"), delta, lazy_walk);
  }
  if (fam == "transpose-i-random") {
    long i = has_variant ? std::lround(v) : c.get_int_or("i", 1);
    return transpose_i_random(c.get_int("n"), i, lazy_walk);
  }
  if (fam == "symmetric-perturbation") {
    uint64_t seed = has_variant ? static_cast<uint64_t>(std::llround(v))
                                : static_cast<uint64_t>(c.get_int_or("seed", 1));
    return symmetric_perturbation(c.get_int("n"), c.get_int_or("i", 1),
                                  c.get_real_or("epsilon", 0.0), seed);
  }
  if (fam == "sticky-permutation") {
    long i = has_variant ? std::lround(v) : c.get_int_or("i", 1);
    return sticky_permutation(c.get_int("n"), c.get_int_or("rho", 0),
                              c.get_real_or("delta", 0.0), i);
  }
  fail(errc::BadInput, "unknown family '" + fam + "'");
}

struct InstanceSet {
  GalleryInstance first;
  std::vector<Kernel> kernels;
  Measure mu0;
};

InstanceSet build_instances(const ExperimentConfig& cfg) {
  InstanceSet set{build_one(cfg, !cfg.variants.empty(),
                            cfg.variants.empty() ? 0.0 : cfg.variants[0]),
                  {},
                  {}};
  set.kernels.push_back(set.first.kernel());
  for (size_t k = 1; k < cfg.variants.size(); ++k) {
    GalleryInstance g = build_one(cfg, true, cfg.variants[k]);
    require(g.kernel().size() == set.first.kernel().size(), errc::SizeMismatch,
            "variant kernels must share one state space");
    set.kernels.push_back(g.kernel());
  }
  set.mu0 = set.first.measure();
  return set;
}

std::string run_failure(const std::string& where, const std::string& what) {
  return where + ": " + what;
}

// exact per-step traces of K_{0,n} against the running measure
struct ExactTraces {
  std::vector<double> d2;   // max_x d_2(K_{0,n}(x,.), mu_n)
  std::vector<double> tv;   // max pairwise TV
  std::vector<double> sup;  // max_x d_inf(K_{0,n}(x,.), mu_n)
};

ExactTraces exact_traces(const Schedule& s, const std::vector<Measure>& mus, long L) {
  ExactTraces t;
  Matrix R = Matrix::identity(s.size());
  for (long n = 1; n <= L; ++n) {
    R = matmul(R, s.at_step(n).rows);
    t.d2.push_back(max_dp_rows(R, mus[n], 2.0));
    t.tv.push_back(tv_pairwise(R));
    t.sup.push_back(max_dp_rows(R, mus[n], kInf));
  }
  return t;
}

NashParams nash_params_of(const GalleryInstance& g) {
  require(g.has_constant("nash_C") && g.has_constant("nash_D") && g.has_constant("nash_N"),
          errc::BadInput, "family '" + g.family + "' carries no nash constants");
  return NashParams{g.constant("nash_C"), g.constant("nash_D"),
                    static_cast<long>(std::llround(g.constant("nash_N")))};
}

std::string ls_tag(const std::vector<LogSobolevEstimate>& es) {
  for (const LogSobolevEstimate& e : es)
    if (e.kind != EstimateKind::exact_small) return kTagNumeric;
  return kTagExact;
}

std::vector<double> values_of(const std::vector<LogSobolevEstimate>& es) {
  std::vector<double> v;
  v.reserve(es.size());
  for (const LogSobolevEstimate& e : es) v.push_back(e.value);
  return v;
}

BoundReport trace_bound(const std::string& id, const ExperimentConfig& cfg,
                        const InstanceSet& set, const Schedule& s,
                        const std::vector<Measure>& mus, const std::vector<double>& sigmas,
                        const ExactTraces& ex, const std::string& sigma_tag, long L) {
  BoundReport r;
  r.theorem = id;
  if (id == "sigma-product") {
    double init = 0.0;
    for (int x = 0; x < set.mu0.size(); ++x)
      init = std::max(init, dp_distance(point_mass(set.mu0.size(), x), set.mu0, 2.0));
    r.hypotheses = {"sigma: " + sigma_tag, std::string("initial-distance: ") + kTagExact};
    double prod = init;
    for (long n = 1; n <= L; ++n) {
      prod *= sigmas[n - 1];
      r.steps.push_back(n);
      r.bound.push_back(prod);
      r.exact.push_back(ex.d2[n - 1]);
    }
    return r;
  }
  if (id == "nash" || id == "nash-stab" || id == "nash-stab2") {
    NashParams np = nash_params_of(set.first);
    r.hypotheses = {std::string("C,D,N: ") + kTagFamily, "sigma: " + sigma_tag};
    std::vector<double> sig = sigmas;
    double c = 1.0;
    if (id != "nash") {
      c = set.first.constant("stability_c");
      r.hypotheses.push_back(std::string("c: ") + kTagFamily);
      if (id == "nash-stab") {
        for (long i = 0; i < L; ++i) sig[i] = sigma1(s.at_step(i + 1), set.mu0);
      } else {
        std::vector<double> per_kernel(s.kernels.size(), -1.0);
        for (long i = 0; i < L; ++i) {
          int k = s.index_at_step(i + 1);
          if (per_kernel[k] < 0.0)
            per_kernel[k] = sigma1(s.kernels[k], invariant_measure(s.kernels[k]));
          sig[i] = per_kernel[k];
        }
      }
    }
    for (long n = 1; n <= std::min<long>(L, np.N); ++n) {
      MergingBound mb = (id == "nash")        ? nash_d2_bound(np, sig, n, n / 2)
                        : (id == "nash-stab") ? nash_stab_bound(np, c, sig, n, n / 2)
                                              : nash_stab2_bound(np, c, sig, n, n / 2);
      r.steps.push_back(n);
      r.bound.push_back(mb.d2);
      r.exact.push_back(ex.d2[n - 1]);
    }
    return r;
  }
  if (id == "ls") {
    std::vector<LogSobolevEstimate> es;
    for (long i = 0; i < L; ++i)
      es.push_back(log_sobolev_constant(
          reversibilization(s.at_step(i + 1), mus[i], RevSide::star_then_K), mus[i + 1]));
    std::vector<double> ls = values_of(es);
    r.hypotheses = {"ls: " + ls_tag(es), "sigma: " + sigma_tag};
    const double mu0x = set.mu0.min_weight();
    r.burnin = ls_threshold(ls, mu0x);
    for (long n = std::max<long>(r.burnin, 1); n <= L; ++n) {
      r.steps.push_back(n);
      r.bound.push_back(ls_d2_bound(ls, sigmas, mu0x, n));
      r.exact.push_back(ex.d2[n - 1] * ex.d2[n - 1]);
    }
    return r;
  }
  if (id == "ls-sup") {
    std::vector<LogSobolevEstimate> fwd, bwd;
    for (long i = 0; i < L; ++i) {
      fwd.push_back(log_sobolev_constant(
          reversibilization(s.at_step(i + 1), mus[i], RevSide::star_then_K), mus[i + 1]));
      bwd.push_back(log_sobolev_constant(
          reversibilization(s.at_step(i + 1), mus[i], RevSide::K_then_star), mus[i]));
    }
    std::vector<double> ls = values_of(fwd), lsc = values_of(bwd);
    r.hypotheses = {"ls: " + ls_tag(fwd), "ls-check: " + ls_tag(bwd), "sigma: " + sigma_tag};
    for (long n = 1; n <= L; ++n) {
      try {
        LsSupBound lb =
            ls_sup_bound(ls, lsc, sigmas, set.mu0.min_weight(), mus[n].min_weight(), n);
        r.steps.push_back(n);
        r.bound.push_back(lb.bound);
        r.exact.push_back(ex.sup[n - 1]);
        r.burnin = lb.m;
      } catch (const Error& e) {
        if (e.code() == errc::NeverReached || e.code() == errc::HorizonTooShort) continue;
        throw;
      }
    }
    return r;
  }
  if (id == "entropy") {
    std::vector<LogSobolevEstimate> es;
    for (long i = 0; i < L; ++i)
      es.push_back(mls_constant(
          reversibilization(s.at_step(i + 1), mus[i], RevSide::K_then_star), mus[i]));
    std::vector<double> mls = values_of(es);
    r.hypotheses = {"mls: " + ls_tag(es), std::string("rho: ") + kTagExact};
    for (long n = 1; n <= L; ++n) {
      r.steps.push_back(n);
      r.bound.push_back(entropy_tv_bound(mls, set.mu0.min_weight(), n));
      r.exact.push_back(ex.tv[n - 1]);
    }
    return r;
  }
  (void)cfg;
  fail(errc::BadInput, "unknown bound id '" + id + "'");
}

}  // namespace

ExperimentConfig experiment_config(const Config& raw) {
  ExperimentConfig cfg;
  cfg.raw = raw;
  cfg.family = raw.get("family");
  require(known_families().count(cfg.family) > 0, errc::BadInput,
          "unknown family '" + cfg.family + "'");
  for (const std::string& t : raw.get_list("variants"))
    cfg.variants.push_back(parse_real_token(t, "config key 'variants'"));
  cfg.rule = rule_from_name(raw.get_or("schedule_rule", "fixed-cycle"));
  cfg.schedule_seed = std::strtoull(raw.get_or("schedule_seed", "1").c_str(), nullptr, 10);
  cfg.horizon = raw.get_int_or("horizon", 0);
  require(cfg.horizon >= 0, errc::BadInput, "horizon must be nonnegative");
  for (const std::string& t : raw.get_list("indices"))
    cfg.indices.push_back(static_cast<int>(parse_real_token(t, "config key 'indices'")));
  cfg.analyses = raw.get_list("analyses");
  require(!cfg.analyses.empty(), errc::BadInput, "analyses list must not be empty");
  for (const std::string& a : cfg.analyses)
    require(known_analyses().count(a) > 0, errc::BadInput, "unknown analysis '" + a + "'");
  cfg.bound_ids = raw.get_list("bounds");
  for (const std::string& b : cfg.bound_ids)
    require(known_bounds().count(b) > 0, errc::BadInput, "unknown bound id '" + b + "'");
  if (std::count(cfg.analyses.begin(), cfg.analyses.end(), "bounds") > 0)
    require(!cfg.bound_ids.empty(), errc::BadInput,
            "the bounds analysis needs a nonempty bounds list");
  cfg.eps = raw.get_real_or("eps", 0.25);
  cfg.eta = raw.get_real_or("eta", 0.25);
  require(cfg.eps > 0 && cfg.eta > 0, errc::BadInput, "thresholds must be positive");
  cfg.assert_c = raw.get_real_or("assert_c", 0.0);
  require(cfg.assert_c == 0.0 || cfg.assert_c >= 1.0, errc::BadInput,
          "assert_c must be 0 (off) or >= 1");
  cfg.bound_steps = raw.get_int_or("bound_steps", 0);
  cfg.spectral_steps = raw.get_int_or("spectral_steps", 0);
  require(cfg.bound_steps >= 0 && cfg.spectral_steps >= 0, errc::BadInput,
          "step caps must be nonnegative");
  cfg.trials = raw.get_int_or("trials", 500);
  require(cfg.trials > 0, errc::BadInput, "trials must be positive");
  cfg.budget = raw.get_int_or("budget", 200);
  cfg.metric = raw.get_or("metric", "relsup");
  require(cfg.metric == "tv" || cfg.metric == "relsup", errc::BadInput,
          "metric must be tv or relsup");
  cfg.out_dir = raw.get_or("out_dir", "");
  return cfg;
}

RunBundle run(const ExperimentConfig& cfg) {
  RunBundle b;
  InstanceSet set = build_instances(cfg);
  const int p = set.mu0.size();
  const long h = cfg.horizon > 0 ? cfg.horizon : default_horizon(p);
  Schedule s = make_schedule(set.kernels, cfg.rule, cfg.schedule_seed, h, cfg.indices);
  b.files.emplace_back("config.txt", config_to_text(cfg.raw));
  const std::string sigma_tag = (p <= 64) ? kTagExact : kTagNumeric;

  for (const std::string& analysis : cfg.analyses) {
    try {
      if (analysis == "merging") {
        b.merging_tv = merging_time_tv(s, std::vector<double>{cfg.eps}, h);
        b.merging_relsup = merging_time_relsup(s, std::vector<double>{cfg.eta}, h);
        b.ran_merging = true;
        b.files.emplace_back("merging_tv.csv", merging_report_to_csv(b.merging_tv));
        b.files.emplace_back("merging_tv.json", merging_report_to_json(b.merging_tv));
        b.files.emplace_back("merging_relsup.csv", merging_report_to_csv(b.merging_relsup));
        b.files.emplace_back("merging_relsup.json", merging_report_to_json(b.merging_relsup));
      } else if (analysis == "spectral") {
        const long L = cfg.spectral_steps > 0 ? std::min(cfg.spectral_steps, h)
                                              : std::min<long>(h, 100);
        std::vector<Measure> mus = evolve(set.mu0, s, L);
        for (long i = 0; i < L; ++i)
          b.sigma_profile.push_back(sigma1(s.at_step(i + 1), mus[i]));
        b.ran_spectral = true;
        std::string csv = "# sigma profile steps=" + std::to_string(L) + "\n";
        csv += std::string("# provenance n=") + kTagIndex + ",sigma1=" + sigma_tag + "\n";
        csv += "n,sigma1\n";
        for (long i = 0; i < L; ++i)
          csv += std::to_string(i + 1) + ',' + format_real(b.sigma_profile[i]) + "\n";
        b.files.emplace_back("sigma_profile.csv", csv);
        if (p <= 64)
          b.files.emplace_back("spectral.json",
                               spectral_report_to_json(singular_values(set.kernels[0], set.mu0)));
      } else if (analysis == "stability") {
        b.stability = check_c_stability(s, set.mu0, h);
        b.ran_stability = true;
        b.files.emplace_back("stability.json", stability_certificate_to_json(b.stability));
        if (cfg.assert_c > 0 && b.stability.observed_c > cfg.assert_c + 1e-12) {
          b.pass = false;
          b.failures.push_back(run_failure(
              "stability", "observed_c " + format_real(b.stability.observed_c) +
                               " exceeds assert_c " + format_real(cfg.assert_c)));
        }
      } else if (analysis == "bounds") {
        const long L =
            cfg.bound_steps > 0 ? std::min(cfg.bound_steps, h) : std::min<long>(h, 60);
        std::vector<Measure> mus = evolve(set.mu0, s, L);
        std::vector<double> sigmas(L);
        for (long i = 0; i < L; ++i) sigmas[i] = sigma1(s.at_step(i + 1), mus[i]);
        ExactTraces ex = exact_traces(s, mus, L);
        for (const std::string& id : cfg.bound_ids) {
          BoundReport r = trace_bound(id, cfg, set, s, mus, sigmas, ex, sigma_tag, L);
          b.files.emplace_back("bound_" + id + ".csv", bound_report_to_csv(r));
          b.files.emplace_back("bound_" + id + ".json", bound_report_to_json(r));
          if (!r.steps.empty() && r.min_slack() < -1e-8) {
            b.pass = false;
            b.failures.push_back(
                run_failure("bound " + id, "min slack " + format_real(r.min_slack())));
          }
          b.bounds.push_back(std::move(r));
        }
      }
    } catch (const Error& e) {
      b.pass = false;
      b.failures.push_back(run_failure(analysis, e.what()));
      b.files.emplace_back(analysis + "_error.txt", std::string(e.what()) + "\n");
    }
  }

  json summary;
  summary["family"] = cfg.family;
  summary["size"] = p;
  summary["horizon"] = h;
  summary["analyses"] = cfg.analyses;
  summary["pass"] = b.pass;
  summary["failures"] = b.failures;
  b.files.emplace_back("summary.json", summary.dump(1) + "\n");
  return b;
}

BoundRanking compare_bounds(const ExperimentConfig& cfg) {
  require(!cfg.bound_ids.empty(), errc::BadInput,
          "compare-bounds needs a nonempty bounds list");
  ExperimentConfig inner = cfg;
  inner.analyses = {"merging", "bounds"};
  RunBundle b = run(inner);
  require(b.failures.empty() || b.ran_merging, errc::BadInput,
          b.failures.empty() ? "" : b.failures.front());

  BoundRanking rank;
  rank.pass = b.pass;
  long T = b.merging_tv.first_crossing();
  if (T < 1) T = b.merging_tv.horizon;
  rank.at_step = T;

  struct Row {
    std::string id;
    double tightness;
    double slack;
    std::string tag;
    long at;
  };
  std::vector<Row> rows;
  for (const BoundReport& r : b.bounds) {
    Row row{r.theorem, kInf, r.min_slack(), "", 0};
    for (const std::string& h : r.hypotheses)
      if (h.find(kTagNumeric) != std::string::npos) row.tag = kTagNumeric;
    if (row.tag.empty())
      for (const std::string& h : r.hypotheses)
        if (h.find(kTagFamily) != std::string::npos) row.tag = kTagFamily;
    if (row.tag.empty()) row.tag = kTagExact;
    // evaluate at the largest traced step <= T, or the first traced step
    long pick = -1;
    for (size_t i = 0; i < r.steps.size(); ++i)
      if (r.steps[i] <= T) pick = static_cast<long>(i);
    if (pick < 0 && !r.steps.empty()) pick = 0;
    if (pick >= 0) {
      row.at = r.steps[pick];
      double exv = r.exact[pick];
      row.tightness = exv > 0 ? r.bound[pick] / exv : kInf;
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b2) { return a.tightness < b2.tightness; });

  std::string csv = "# compare-bounds merging_step=" + std::to_string(T) + "\n";
  csv += std::string("# provenance rank=") + kTagIndex + ",id=" + kTagIndex +
         ",at_step=" + kTagIndex + ",tightness=tag-column,min_slack=tag-column,tag=" +
         kTagIndex + "\n";
  csv += "rank,id,at_step,tightness,min_slack,tag\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    rank.ids.push_back(rows[i].id);
    rank.tightness.push_back(rows[i].tightness);
    rank.min_slack.push_back(rows[i].slack);
    csv += std::to_string(i + 1) + ',' + rows[i].id + ',' + std::to_string(rows[i].at) +
           ',' + format_real(rows[i].tightness) + ',' + format_real(rows[i].slack) + ',' +
           rows[i].tag + "\n";
  }
  rank.table_csv = csv;
  return rank;
}

AdversaryResult adversary(const ExperimentConfig& cfg) {
  require(cfg.budget > 0, errc::BadInput, "adversary needs a positive search budget");
  InstanceSet set = build_instances(cfg);
  const int p = set.mu0.size();
  const long h = cfg.horizon > 0 ? cfg.horizon : default_horizon(p);
  const int k = static_cast<int>(set.kernels.size());
  const long budget = (k == 1) ? 1 : cfg.budget;  // one kernel, one schedule
  const bool use_tv = cfg.metric == "tv";

  SplitMix64 rng(cfg.schedule_seed);
  long best = -1;
  std::vector<int> best_idx;
  for (long t = 0; t < budget; ++t) {
    std::vector<int> idx(h);
    for (long i = 0; i < h; ++i) idx[i] = static_cast<int>(rng.below(k));
    Schedule st =
        make_schedule(set.kernels, ScheduleRule::explicit_index_sequence, 0, h, idx);
    MergingReport r = use_tv ? merging_time_tv(st, std::vector<double>{cfg.eps}, h)
                             : merging_time_relsup(st, std::vector<double>{cfg.eta}, h);
    long T = r.first_crossing();
    if (T < 0) T = h + 1;  // never crossed within the horizon: worst possible
    if (T > best) {
      best = T;
      best_idx = idx;
    }
  }

  AdversaryResult out;
  out.worst =
      make_schedule(set.kernels, ScheduleRule::explicit_index_sequence, 0, h, best_idx);
  out.worst_merging = best;
  out.stability = search_c_stability(set.kernels, set.mu0, h, SearchMode::sampled, 10,
                                     cfg.budget, cfg.schedule_seed);
  if (cfg.assert_c > 0 && out.stability.observed_c > cfg.assert_c + 1e-12) out.pass = false;

  json j;
  j["family"] = cfg.family;
  j["metric"] = cfg.metric;
  j["threshold"] = json(use_tv ? cfg.eps : cfg.eta);
  j["budget"] = budget;
  j["horizon"] = h;
  j["worst_merging"] = out.worst_merging;
  j["observed_c"] = out.stability.observed_c;
  j["seed"] = std::to_string(cfg.schedule_seed);
  j["pass"] = out.pass;
  j["provenance"] = {{"worst_merging", kTagExact}, {"observed_c", kTagExact}};
  out.summary_json = j.dump(1) + "\n";
  return out;
}

std::vector<std::string> write_bundle(const RunBundle& bundle, const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& [name, content] : bundle.files) {
    std::string path = dir + "/" + name;
    write_text_file(path, content);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace imc
