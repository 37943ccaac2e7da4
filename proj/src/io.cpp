#include "imc/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "imc/errors.hpp"
#include "json.hpp"

namespace imc {

using nlohmann::json;

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// JSON has no inf/nan literals; emit those as strings, numbers otherwise
json json_real(double v) {
  if (std::isfinite(v)) return json(v);
  return json(format_real(v));
}

json json_vec(const Vec& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_real(x));
  return a;
}

json json_matrix(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int j = 0; j < m.m; ++j) row.push_back(json_real(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_real(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  require(!t.empty(), errc::BadInput, what + ": empty number");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  require(end == t.c_str() + t.size(), errc::BadInput, what + ": bad number '" + t + "'");
  return v;
}

long parse_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  require(!t.empty(), errc::BadInput, what + ": empty integer");
  char* end = nullptr;
  long v = std::strtol(t.c_str(), &end, 10);
  require(end == t.c_str() + t.size(), errc::BadInput, what + ": bad integer '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// lines of a CSV body with '#' comments and blanks removed
std::vector<std::string> csv_body(const std::string& text, const std::string& header_word,
                                  int& declared_size) {
  std::vector<std::string> lines;
  bool seen_header = false;
  declared_size = -1;
  for (const std::string& raw : split(text, '\n')) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string word;
      is >> word;
      if (word == header_word && !seen_header) {
        seen_header = true;
        long n = 0;
        is >> n;
        require(!is.fail() && n > 0, errc::BadInput, header_word + " header needs a size");
        declared_size = static_cast<int>(n);
      }
      continue;
    }
    lines.push_back(line);
  }
  require(seen_header, errc::BadInput, "missing '# " + header_word + " <size>' header");
  return lines;
}

// weakest provenance among the hypothesis lines decides the bound column tag
std::string bound_tag(const std::vector<std::string>& hypotheses) {
  bool numeric = false, family = false;
  for (const std::string& h : hypotheses) {
    if (h.find(kTagNumeric) != std::string::npos) numeric = true;
    if (h.find(kTagFamily) != std::string::npos) family = true;
  }
  if (numeric) return kTagNumeric;
  if (family) return kTagFamily;
  return kTagExact;
}

}  // namespace

std::string kernel_to_csv(const Kernel& K) {
  std::string out = "# kernel " + std::to_string(K.size()) + "\n";
  for (int x = 0; x < K.size(); ++x) {
    for (int y = 0; y < K.size(); ++y) {
      if (y) out += ',';
      out += format_real(K(x, y));
    }
    out += '\n';
  }
  return out;
}

Kernel kernel_from_csv(const std::string& text) {
  int n = -1;
  std::vector<std::string> lines = csv_body(text, "kernel", n);
  require(static_cast<int>(lines.size()) == n, errc::BadInput,
          "kernel needs " + std::to_string(n) + " rows, found " + std::to_string(lines.size()));
  Matrix m(n, n);
  for (int x = 0; x < n; ++x) {
    std::vector<std::string> cells = split(lines[x], ',');
    require(static_cast<int>(cells.size()) == n, errc::BadInput,
            "kernel row " + std::to_string(x) + " needs " + std::to_string(n) + " entries");
    for (int y = 0; y < n; ++y) m(x, y) = parse_real(cells[y], "kernel entry");
  }
  return validate_kernel(m);
}

std::string measure_to_csv(const Measure& mu) {
  std::string out = "# measure " + std::to_string(mu.size()) + "\n";
  for (int x = 0; x < mu.size(); ++x) {
    if (x) out += ',';
    out += format_real(mu[x]);
  }
  out += '\n';
  return out;
}

Measure measure_from_csv(const std::string& text) {
  int n = -1;
  std::vector<std::string> lines = csv_body(text, "measure", n);
  require(lines.size() == 1, errc::BadInput, "measure body must be a single row");
  std::vector<std::string> cells = split(lines[0], ',');
  require(static_cast<int>(cells.size()) == n, errc::BadInput,
          "measure needs " + std::to_string(n) + " entries");
  Vec w(n);
  for (int x = 0; x < n; ++x) w[x] = parse_real(cells[x], "measure entry");
  return make_measure(w);
}

std::string schedule_to_json(const Schedule& s) {
  json j;
  j["rule"] = rule_name(s.rule);
  j["seed"] = std::to_string(s.seed);
  j["horizon"] = s.horizon;
  j["indices"] = s.indices;
  json kernels = json::array();
  for (const Kernel& k : s.kernels) kernels.push_back(json_matrix(k.rows));
  j["kernels"] = kernels;
  return j.dump(1) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(errc::BadInput, std::string("schedule json: ") + e.what());
  }
  try {
    ScheduleRule rule = rule_from_name(j.at("rule").get<std::string>());
    uint64_t seed = std::stoull(j.at("seed").get<std::string>());
    long horizon = j.at("horizon").get<long>();
    std::vector<int> indices;
    if (j.contains("indices")) indices = j["indices"].get<std::vector<int>>();
    std::vector<Kernel> kernels;
    for (const json& rows : j.at("kernels")) {
      const int n = static_cast<int>(rows.size());
      Matrix m(n, n);
      for (int x = 0; x < n; ++x) {
        require(static_cast<int>(rows[x].size()) == n, errc::BadInput,
                "schedule kernel rows must be square");
        for (int y = 0; y < n; ++y) m(x, y) = rows[x][y].get<double>();
      }
      kernels.push_back(validate_kernel(m));
    }
    return make_schedule(std::move(kernels), rule, seed, horizon, std::move(indices));
  } catch (const json::exception& e) {
    fail(errc::BadInput, std::string("schedule json: ") + e.what());
  }
}

std::string merging_report_to_csv(const MergingReport& r) {
  std::string out =
      "# merging kind=" + r.kind + " horizon=" + std::to_string(r.horizon) + "\n";
  for (size_t i = 0; i < r.thresholds.size(); ++i)
    out += "# threshold " + format_real(r.thresholds[i]) + " crossing " +
           std::to_string(r.crossing[i]) + "\n";
  out += std::string("# provenance n=") + kTagIndex + ",max_tv=" + kTagExact +
         ",max_relsup=" + kTagExact + "\n";
  out += "n,max_tv,max_relsup\n";
  for (size_t i = 0; i < r.max_tv.size(); ++i)
    out += std::to_string(i + 1) + ',' + format_real(r.max_tv[i]) + ',' +
           format_real(r.max_relsup[i]) + "\n";
  return out;
}

std::string merging_report_to_json(const MergingReport& r) {
  json j;
  j["kind"] = r.kind;
  j["horizon"] = r.horizon;
  j["thresholds"] = json_vec(r.thresholds);
  j["crossing"] = r.crossing;
  j["max_tv"] = json_vec(r.max_tv);
  j["max_relsup"] = json_vec(r.max_relsup);
  j["provenance"] = {{"max_tv", kTagExact}, {"max_relsup", kTagExact}, {"crossing", kTagExact}};
  return j.dump(1) + "\n";
}

std::string spectral_report_to_json(const SpectralReport& r) {
  json j;
  j["sigma"] = json_vec(r.sigma);
  j["gap"] = json_real(r.gap);
  j["base_measure"] = json_vec(r.base_measure.weights);
  j["image_measure"] = json_vec(r.image_measure.weights);
  j["psi"] = json_matrix(r.psi);
  j["provenance"] = {{"sigma", kTagExact}, {"gap", kTagExact}, {"psi", kTagExact},
                     {"base_measure", kTagExact}, {"image_measure", kTagExact}};
  return j.dump(1) + "\n";
}

std::string bound_report_to_csv(const BoundReport& r) {
  const std::string tag = bound_tag(r.hypotheses);
  std::string out =
      "# bound " + r.theorem + " burnin=" + std::to_string(r.burnin) + "\n";
  for (const std::string& h : r.hypotheses) out += "# hypothesis " + h + "\n";
  out += std::string("# provenance n=") + kTagIndex + ",bound=" + tag +
         ",exact=" + kTagExact + ",slack=" + tag + "\n";
  out += "n,bound,exact,slack\n";
  std::vector<double> sl = r.slack();
  for (size_t i = 0; i < r.steps.size(); ++i)
    out += std::to_string(r.steps[i]) + ',' + format_real(r.bound[i]) + ',' +
           format_real(r.exact[i]) + ',' + format_real(sl[i]) + "\n";
  return out;
}

std::string bound_report_to_json(const BoundReport& r) {
  const std::string tag = bound_tag(r.hypotheses);
  json j;
  j["theorem"] = r.theorem;
  j["burnin"] = r.burnin;
  j["steps"] = r.steps;
  j["bound"] = json_vec(r.bound);
  j["exact"] = json_vec(r.exact);
  j["slack"] = json_vec(r.slack());
  j["min_slack"] = json_real(r.min_slack());
  j["hypotheses"] = r.hypotheses;
  j["provenance"] = {{"bound", tag}, {"exact", kTagExact}, {"slack", tag},
                     {"min_slack", tag}};
  return j.dump(1) + "\n";
}

std::string certificate_to_json(const Certificate& c) {
  json j;
  j["kind"] = c.kind;
  j["value"] = json_real(c.value);
  j["witness"] = json_vec(c.witness);
  j["trials"] = c.trials;
  j["seed"] = std::to_string(c.seed);
  j["pass"] = c.pass;
  j["provenance"] = {{"value", kTagNumeric}, {"pass", kTagNumeric}};
  return j.dump(1) + "\n";
}

std::string stability_certificate_to_json(const StabilityCertificate& c) {
  json j;
  j["mode"] = c.mode;
  j["schedules_checked"] = c.schedules_checked;
  j["horizon"] = c.horizon;
  j["observed_c"] = json_real(c.observed_c);
  j["mu0"] = json_vec(c.mu0.weights);
  j["witness"] = c.witness;
  j["provenance"] = {{"observed_c", kTagExact}, {"mu0", kTagIndex}};
  return j.dump(1) + "\n";
}

std::string Config::get(const std::string& key) const {
  auto it = kv.find(key);
  require(it != kv.end(), errc::BadInput, "config key '" + key + "' is required");
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double Config::get_real(const std::string& key) const {
  return parse_real(get(key), "config key '" + key + "'");
}

double Config::get_real_or(const std::string& key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  return parse_int(get(key), "config key '" + key + "'");
}

long Config::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(errc::BadInput, "config key '" + key + "': bad flag '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  if (!has(key)) return out;
  for (const std::string& piece : split(get(key), ',')) {
    std::string t = trim(piece);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

Config config_from_text(const std::string& text) {
  Config c;
  long line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    require(eq != std::string::npos, errc::BadInput,
            "config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    require(!key.empty(), errc::BadInput,
            "config line " + std::to_string(line_no) + ": empty key");
    require(c.kv.emplace(key, val).second, errc::BadInput,
            "config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return c;
}

std::string config_to_text(const Config& c) {
  std::string out;
  for (const auto& [k, v] : c.kv) out += k + " = " + v + "\n";
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::BadInput, "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  require(out.good(), errc::BadInput, "cannot write file '" + path + "'");
  out << text;
  require(out.good(), errc::BadInput, "write failed for '" + path + "'");
}

}  // namespace imc
