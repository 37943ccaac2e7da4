#pragma once
#include <map>
#include <string>
#include <vector>

#include "imc/bounds.hpp"
#include "imc/distances.hpp"
#include "imc/functional.hpp"
#include "imc/markov.hpp"
#include "imc/spectral.hpp"
#include "imc/stability.hpp"

namespace imc {

// %.17g: shortest text that still round-trips a double exactly; prints
// inf / -inf / nan for the specials
std::string format_real(double v);

// provenance tags stamped on every emitted number:
//   exact-oracle     computed by an exact (dense, closed-form) procedure
//   numeric-estimate optimizer or sampling output, correct up to search quality
//   family-constant  documented constant attached to a gallery family
//   index            structural column (step counters, state ids)
inline constexpr const char* kTagExact = "exact-oracle";
inline constexpr const char* kTagNumeric = "numeric-estimate";
inline constexpr const char* kTagFamily = "family-constant";
inline constexpr const char* kTagIndex = "index";

// kernel CSV: "# kernel <size>" header, one comma-separated row per line
std::string kernel_to_csv(const Kernel& K);
Kernel kernel_from_csv(const std::string& text);

// measure CSV: "# measure <size>" header, single comma-separated row
std::string measure_to_csv(const Measure& mu);
Measure measure_from_csv(const std::string& text);

// schedule JSON: rule, seed (decimal string), horizon, indices, kernel rows;
// parses back into a validated Schedule
std::string schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const std::string& text);

// merging trace CSV: columns n,max_tv,max_relsup with thresholds, crossings
// and per-column provenance in comment lines; JSON mirror adds the same data
// as structured fields
std::string merging_report_to_csv(const MergingReport& r);
std::string merging_report_to_json(const MergingReport& r);

std::string spectral_report_to_json(const SpectralReport& r);

// bound trace CSV: columns n,bound,exact,slack. The bound column's tag is
// the weakest tag appearing in the report's hypotheses list
std::string bound_report_to_csv(const BoundReport& r);
std::string bound_report_to_json(const BoundReport& r);

std::string certificate_to_json(const Certificate& c);
std::string stability_certificate_to_json(const StabilityCertificate& c);

// flat "key = value" text config; '#' starts a comment, keys must be unique
struct Config {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key) const;  // BadInput when missing
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_real(const std::string& key) const;
  double get_real_or(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  bool get_flag_or(const std::string& key, bool fallback) const;
  // comma-separated list value; empty or missing key gives an empty list
  std::vector<std::string> get_list(const std::string& key) const;
};

Config config_from_text(const std::string& text);
// canonical emission: sorted keys, "key = value" lines; round-trips exactly
std::string config_to_text(const Config& c);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace imc
