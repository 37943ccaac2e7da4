#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imc/errors.hpp"
#include "imc/experiment.hpp"
#include "imc/gallery.hpp"
#include "imc/io.hpp"
#include "imc/stability.hpp"
#include "json.hpp"

using namespace imc;
using nlohmann::json;

namespace {

// exit codes: 0 every check passed, 1 usage or config error, 2 a domination,
// closure, or assertion check failed
constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFail = 2;

struct GalleryBuildArgs {
  std::string family;
  std::string out;
  long p = 0;  // size parameter: p_N, N, two_N, or n depending on the family
  double alpha = 0.0;
  double delta = 0.0;
  double eps = 0.0;
  long i = 1;
  long rho = 0;
  uint64_t seed = 1;
  bool lazy = false;
};

GalleryInstance build_from_args(const GalleryBuildArgs& a) {
  if (a.family == "circle") return circle(a.p, a.delta, a.lazy);
  if (a.family == "metropolis-bd-hat") return metropolis_bd(a.alpha, a.p, BdFamily::hat);
  if (a.family == "metropolis-bd-check") return metropolis_bd(a.alpha, a.p, BdFamily::check);
  if (a.family == "hypercube") return hypercube(a.p, a.delta, a.lazy);
  if (a.family == "transpose-i-random") return transpose_i_random(a.p, a.i, a.lazy);
  if (a.family == "symmetric-perturbation")
    return symmetric_perturbation(a.p, a.i, a.eps, a.seed);
  if (a.family == "sticky-permutation")
    return sticky_permutation(a.p, a.rho, a.delta, a.i);
  fail(errc::BadInput, "unknown family '" + a.family + "'");
}

int gallery_build(const GalleryBuildArgs& a) {
  GalleryInstance g = build_from_args(a);
  std::vector<std::string> written;
  for (size_t k = 0; k < g.kernels.size(); ++k) {
    std::string name = k == 0 ? "kernel.csv" : "kernel_" + std::to_string(k + 1) + ".csv";
    write_text_file(a.out + "/" + name, kernel_to_csv(g.kernels[k]));
    written.push_back(name);
  }
  for (size_t k = 0; k < g.measures.size(); ++k) {
    std::string name = k == 0 ? "measure.csv" : "measure_" + std::to_string(k + 1) + ".csv";
    write_text_file(a.out + "/" + name, measure_to_csv(g.measures[k]));
    written.push_back(name);
  }
  json manifest;
  manifest["family"] = g.family;
  manifest["params"] = g.params;
  json consts = json::array();
  for (const NamedConstant& c : g.constants)
    consts.push_back({{"name", c.name},
                      {"value", c.value},
                      {"provenance", c.provenance},
                      {"note", c.note}});
  manifest["constants"] = consts;
  manifest["notes"] = g.notes;
  manifest["files"] = written;
  write_text_file(a.out + "/manifest.json", manifest.dump(1) + "\n");
  std::cout << "PASS: gallery build " << g.family << " -> " << a.out << " ("
            << written.size() + 1 << " files)\n";
  return kExitPass;
}

ExperimentConfig load_config(const std::string& path) {
  return experiment_config(config_from_text(read_text_file(path)));
}

std::string pick_out_dir(const std::string& cli_out, const ExperimentConfig& cfg) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return ".";
}

int cmd_run(const std::string& config_path, const std::string& out) {
  ExperimentConfig cfg = load_config(config_path);
  RunBundle b = run(cfg);
  write_bundle(b, pick_out_dir(out, cfg));
  for (const std::string& f : b.failures) std::cout << "FAIL: " << f << "\n";
  std::cout << (b.pass ? "PASS" : "FAIL") << ": run " << cfg.family << " ("
            << b.files.size() << " files)\n";
  return b.pass ? kExitPass : kExitFail;
}

int cmd_compare_bounds(const std::string& config_path, const std::string& out) {
  ExperimentConfig cfg = load_config(config_path);
  BoundRanking rank = compare_bounds(cfg);
  write_text_file(pick_out_dir(out, cfg) + "/compare_bounds.csv", rank.table_csv);
  for (size_t i = 0; i < rank.ids.size(); ++i)
    std::cout << (i + 1) << ". " << rank.ids[i]
              << " tightness=" << format_real(rank.tightness[i])
              << " min_slack=" << format_real(rank.min_slack[i]) << "\n";
  std::cout << (rank.pass ? "PASS" : "FAIL") << ": compare-bounds at step "
            << rank.at_step << "\n";
  return rank.pass ? kExitPass : kExitFail;
}

int cmd_adversary(const std::string& config_path, const std::string& out, long budget) {
  ExperimentConfig cfg = load_config(config_path);
  if (budget >= 0) cfg.budget = budget;
  AdversaryResult ar = adversary(cfg);
  const std::string dir = pick_out_dir(out, cfg);
  write_text_file(dir + "/adversary.json", ar.summary_json);
  write_text_file(dir + "/worst_schedule.json", schedule_to_json(ar.worst));
  std::cout << (ar.pass ? "PASS" : "FAIL") << ": adversary worst merging "
            << ar.worst_merging << ", observed_c "
            << format_real(ar.stability.observed_c) << "\n";
  return ar.pass ? kExitPass : kExitFail;
}

int cmd_stability_check(const std::string& config_path, const std::string& out) {
  Config raw = config_from_text(read_text_file(config_path));
  ExperimentConfig cfg = experiment_config(raw);
  const std::string dir = pick_out_dir(out, cfg);
  const bool corrupted = raw.get_flag_or("corrupted", false);
  const uint64_t closure_seed =
      std::strtoull(raw.get_or("closure_seed", "5745438").c_str(), nullptr, 10);
  bool all_pass = true;

  // class closure: the family's perturbation class must be preserved by its
  // own kernels (negative control: deliberately corrupted kernels must fail)
  bool closure_ran = false;
  Certificate closure;
  if (cfg.family == "circle") {
    double eps = raw.get_real_or("epsilon", std::fabs(raw.get_real_or("delta", 0.0)));
    closure = sn_closure_check(raw.get_int("p_N"), eps, cfg.trials, corrupted, closure_seed);
    closure_ran = true;
  } else if (cfg.family == "hypercube") {
    double eps = raw.get_real_or("epsilon", std::fabs(raw.get_real_or("delta", 0.0)));
    closure = s2n_closure_check(eps, raw.get_int("two_N") / 2, cfg.trials, corrupted,
                                closure_seed);
    closure_ran = true;
  } else if (cfg.family == "metropolis-bd-hat" || cfg.family == "metropolis-bd-check") {
    require(!corrupted, errc::BadInput,
            "corrupted negative control applies to circle and hypercube only");
    GalleryInstance base = metropolis_bd(
        raw.get_real_or("alpha", 0.0), raw.get_int("N"),
        cfg.family == "metropolis-bd-hat" ? BdFamily::hat : BdFamily::check);
    BdPerturbation pert =
        bd_perturbation_stability(base.kernel(), base.measure(), raw.get_real_or("s", 0.0));
    closure.kind = "bd-perturbation";
    closure.value = pert.c;
    closure.trials = 1;
    closure.seed = closure_seed;
    closure.pass = true;
    closure_ran = true;
  } else {
    require(!corrupted, errc::BadInput,
            "corrupted negative control applies to circle and hypercube only");
  }
  if (closure_ran) {
    write_text_file(dir + "/closure.json", certificate_to_json(closure));
    std::cout << (closure.pass ? "PASS" : "FAIL") << ": closure " << closure.kind
              << " value " << format_real(closure.value) << "\n";
    all_pass = all_pass && closure.pass;
  }

  // observed stability along the configured schedule
  ExperimentConfig inner = cfg;
  inner.analyses = {"stability"};
  RunBundle b = run(inner);
  write_bundle(b, dir);
  if (b.ran_stability)
    std::cout << (b.pass ? "PASS" : "FAIL") << ": observed_c "
              << format_real(b.stability.observed_c)
              << (cfg.assert_c > 0 ? " (assert_c " + format_real(cfg.assert_c) + ")" : "")
              << "\n";
  all_pass = all_pass && b.pass;

  std::cout << (all_pass ? "PASS" : "FAIL") << ": stability check " << cfg.family << "\n";
  return all_pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"merging and stability toolkit for time-inhomogeneous chains"};
  app.require_subcommand(1);

  GalleryBuildArgs ga;
  CLI::App* gal = app.add_subcommand("gallery", "instance construction tools");
  gal->require_subcommand(1);
  CLI::App* gal_build =
      gal->add_subcommand("build", "write kernel/measure CSV plus a constants manifest");
  gal_build->add_option("family", ga.family, "family id")->required();
  gal_build->add_option("--p", ga.p, "size parameter (p_N, N, two_N, or n)")->required();
  gal_build->add_option("--alpha", ga.alpha, "target exponent");
  gal_build->add_option("--delta", ga.delta, "perturbation size");
  gal_build->add_option("--eps", ga.eps, "envelope radius");
  gal_build->add_option("--i", ga.i, "position or member index");
  gal_build->add_option("--rho", ga.rho, "sticky state index");
  gal_build->add_option("--seed", ga.seed, "sampler seed");
  gal_build->add_flag("--lazy", ga.lazy, "apply the lazy transform");
  gal_build->add_option("--out", ga.out, "output directory")->required();

  std::string run_config, run_out;
  CLI::App* runc = app.add_subcommand("run", "execute a config and write the report bundle");
  runc->add_option("--config", run_config, "flat key=value config file")->required();
  runc->add_option("--out", run_out, "output directory (overrides out_dir)");

  std::string cmp_config, cmp_out;
  CLI::App* cmp =
      app.add_subcommand("compare-bounds", "rank bound families by tightness");
  cmp->add_option("--config", cmp_config, "flat key=value config file")->required();
  cmp->add_option("--out", cmp_out, "output directory (overrides out_dir)");

  std::string adv_config, adv_out;
  long adv_budget = -1;
  CLI::App* adv = app.add_subcommand("adversary", "search for the worst schedule");
  adv->add_option("--config", adv_config, "flat key=value config file")->required();
  adv->add_option("--out", adv_out, "output directory (overrides out_dir)");
  adv->add_option("--budget", adv_budget, "search budget (overrides config)");

  std::string stab_config, stab_out;
  CLI::App* stab = app.add_subcommand("stability", "stability certification tools");
  stab->require_subcommand(1);
  CLI::App* stab_check =
      stab->add_subcommand("check", "closure and observed-c certification");
  stab_check->add_option("--config", stab_config, "flat key=value config file")->required();
  stab_check->add_option("--out", stab_out, "output directory (overrides out_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (gal_build->parsed()) return gallery_build(ga);
    if (runc->parsed()) return cmd_run(run_config, run_out);
    if (cmp->parsed()) return cmd_compare_bounds(cmp_config, cmp_out);
    if (adv->parsed()) return cmd_adversary(adv_config, adv_out, adv_budget);
    if (stab_check->parsed()) return cmd_stability_check(stab_config, stab_out);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
