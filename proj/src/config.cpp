#include "flga/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "flga/collision_table.hpp"

namespace flga {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& issue : issues) out += " [" + issue.key + "] " + issue.message + ";";
  if (!issues.empty()) out.pop_back();
  return out;
}

bool parse_full_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

bool parse_full_int(const std::string& text, long long& out) {
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc{} && ptr == t.data() + t.size();
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  std::stringstream ss(text);
  while (std::getline(ss, current, ',')) parts.push_back(trim(current));
  return parts;
}

// Pulls typed values out of the raw key/value map, remembering which keys
// were touched so the leftovers can be reported as unknown.
struct Extractor {
  const std::map<std::string, std::string>& kv;
  std::vector<ConfigIssue>& issues;
  std::set<std::string> used;

  bool has(const std::string& key) {
    used.insert(key);
    return kv.count(key) != 0;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used.insert(key);
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }

  long long get_int(const std::string& key, long long fallback, long long lo, long long hi) {
    used.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    long long value = 0;
    if (!parse_full_int(it->second, value)) {
      issues.push_back({key, "expected an integer, got '" + it->second + "'"});
      return fallback;
    }
    if (value < lo || value > hi) {
      issues.push_back({key, "value " + std::to_string(value) + " outside [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]"});
      return fallback;
    }
    return value;
  }

  double get_double(const std::string& key, double fallback, double lo, double hi) {
    used.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    double value = 0;
    if (!parse_full_double(it->second, value)) {
      issues.push_back({key, "expected a number, got '" + it->second + "'"});
      return fallback;
    }
    if (!(value >= lo) || !(value <= hi)) {
      std::ostringstream msg;
      msg << "value " << value << " outside [" << lo << ", " << hi << "]";
      issues.push_back({key, msg.str()});
      return fallback;
    }
    return value;
  }

  bool get_bool(const std::string& key, bool fallback) {
    used.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = trim(it->second);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    issues.push_back({key, "expected a boolean, got '" + it->second + "'"});
    return fallback;
  }

  std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback,
                                      double lo, double hi) {
    used.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::vector<double> values;
    for (const auto& part : split_commas(it->second)) {
      double value = 0;
      if (!parse_full_double(part, value) || !(value >= lo) || !(value <= hi)) {
        issues.push_back({key, "bad list entry '" + part + "'"});
        return fallback;
      }
      values.push_back(value);
    }
    if (values.empty()) {
      issues.push_back({key, "empty list"});
      return fallback;
    }
    return values;
  }

  std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback,
                                long long lo, long long hi) {
    used.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::vector<int> values;
    for (const auto& part : split_commas(it->second)) {
      long long value = 0;
      if (!parse_full_int(part, value) || value < lo || value > hi) {
        issues.push_back({key, "bad list entry '" + part + "'"});
        return fallback;
      }
      values.push_back(static_cast<int>(value));
    }
    if (values.empty()) {
      issues.push_back({key, "empty list"});
      return fallback;
    }
    return values;
  }
};

bool case_is_2d(CaseId id) {
  return id == CaseId::equilibrium_2d || id == CaseId::taylor_green ||
         id == CaseId::lid_cavity;
}

CompareTarget default_compare(CaseId id) {
  switch (id) {
    case CaseId::shockwave: return CompareTarget::lbm;
    case CaseId::equilibrium_1d:
    case CaseId::equilibrium_2d:
    case CaseId::taylor_green: return CompareTarget::analytic;
    case CaseId::lid_cavity:
    case CaseId::uniform: return CompareTarget::none;
  }
  return CompareTarget::none;
}

RunConfig build_config(const std::map<std::string, std::string>& kv,
                       std::vector<ConfigIssue>& issues) {
  Extractor ex{kv, issues, {}};
  RunConfig config;

  bool case_known = false;
  const std::string case_name = ex.get_string("case", "");
  if (case_name.empty()) {
    issues.push_back({"case", "missing required key"});
  } else {
    try {
      config.case_id = case_from_string(case_name);
      case_known = true;
    } catch (const std::invalid_argument& e) {
      issues.push_back({"case", e.what()});
    }
  }

  // The case fixes the stencil except for the uniform probe, which runs on
  // either; an explicit contradictory model is reported, not ignored.
  Model default_model = case_known && case_is_2d(config.case_id) ? Model::d2q9 : Model::d1q3;
  config.model = default_model;
  const std::string model_name = ex.get_string("model", "");
  if (!model_name.empty()) {
    try {
      config.model = model_from_string(model_name);
    } catch (const std::invalid_argument& e) {
      issues.push_back({"model", e.what()});
    }
    if (case_known && config.case_id != CaseId::uniform && config.model != default_model)
      issues.push_back({"model", "case '" + to_string(config.case_id) + "' requires " +
                                     to_string(default_model)});
  }
  const bool planar = descriptor(config.model).dim == 2;

  config.lx = static_cast<int>(ex.get_int("lx", 0, 3, 1 << 24));
  if (!ex.has("lx")) issues.push_back({"lx", "missing required key"});
  config.ly = static_cast<int>(ex.get_int("ly", planar ? config.lx : 1, 1, 1 << 24));
  if (!planar && config.ly != 1) issues.push_back({"ly", "chain models require ly = 1"});
  if (planar && config.ly < 3 && ex.has("ly"))
    issues.push_back({"ly", "plane models require ly >= 3"});

  config.steps = static_cast<int>(ex.get_int("steps", 0, 0, 100000000));
  if (!ex.has("steps")) issues.push_back({"steps", "missing required key"});
  config.warmup = static_cast<int>(ex.get_int("warmup", 0, 0, 100000000));

  config.lambda = ex.get_double_list("lambda", {1.0}, 0.0, 1e6);

  config.orders.clear();
  for (int bodies : {2, 3, 4}) {
    const std::string key = "c" + std::to_string(bodies);
    if (ex.has(key))
      config.orders.push_back({bodies, ex.get_double(key, 1.0, 1e-12, 1e6)});
  }
  if (config.orders.empty()) config.orders = {{2, 1.0}};

  config.snapshot_cadence = static_cast<int>(ex.get_int("snapshot_cadence", -1, -1, 100000000));
  config.seed = static_cast<std::uint64_t>(
      ex.get_int("seed", 1, 0, std::numeric_limits<long long>::max()));
  config.output_dir = ex.get_string("output_dir", "");

  config.compare = case_known ? default_compare(config.case_id) : CompareTarget::none;
  const std::string compare_name = ex.get_string("compare", "");
  if (!compare_name.empty()) {
    try {
      config.compare = compare_from_string(compare_name);
    } catch (const std::invalid_argument& e) {
      issues.push_back({"compare", e.what()});
    }
  }

  config.lbm_tau = ex.get_double("lbm_tau", 0.0, 0.5 + 1e-9, 1e6);
  if (config.compare == CompareTarget::lbm && !ex.has("lbm_tau"))
    issues.push_back({"lbm_tau", "required when compare = lbm"});

  config.rho1 = ex.get_double("rho1", 4.0, 1e-12, 1e9);
  config.rho2 = ex.get_double("rho2", 2.0, 1e-12, 1e9);
  config.sweep_min = ex.get_double("sweep_min", -1.0, -1.0, 1.0);
  config.sweep_max = ex.get_double("sweep_max", 1.0, -1.0, 1.0);
  config.sweep_step = ex.get_double("sweep_step", 0.1, 1e-9, 2.0);
  if (config.sweep_min > config.sweep_max)
    issues.push_back({"sweep_min", "sweep_min exceeds sweep_max"});
  config.u_max = ex.get_double("u_max", 0.1, 0.0, 1.0 - 1e-9);
  config.rho0 = ex.get_double("rho0", 1.0, 1e-12, 1e9);
  config.ux0 = ex.get_double("ux0", 0.0, -1.0 + 1e-9, 1.0 - 1e-9);
  config.uy0 = ex.get_double("uy0", 0.0, -1.0 + 1e-9, 1.0 - 1e-9);
  config.wall_speed = ex.get_double("wall_speed", 0.2, -1.0 + 1e-9, 1.0 - 1e-9);
  config.periods_x = static_cast<int>(ex.get_int("periods_x", 1, 1, 1024));
  config.periods_y = static_cast<int>(ex.get_int("periods_y", 1, 1, 1024));
  config.shots = ex.get_int("shots", 0, 0, std::numeric_limits<long long>::max());

  config.sweep_c = ex.get_double_list("sweep_c", {}, 1e-12, 1e6);
  if (std::adjacent_find(config.sweep_c.begin(), config.sweep_c.end(),
                         [](double a, double b) { return a >= b; }) != config.sweep_c.end())
    issues.push_back({"sweep_c", "entries must be positive and strictly increasing"});

  config.bench_n = ex.get_int_list("bench_n", {1000, 10000, 100000, 1000000}, 8, 100000000);
  if (std::adjacent_find(config.bench_n.begin(), config.bench_n.end(),
                         [](int a, int b) { return a >= b; }) != config.bench_n.end())
    issues.push_back({"bench_n", "entries must be strictly increasing"});
  config.bench_reps = static_cast<int>(ex.get_int("bench_reps", 5, 1, 1000));

  if (ex.has("bench_solvers")) {
    config.bench_solvers.clear();
    for (const auto& part : split_commas(kv.at("bench_solvers"))) {
      if (part != "lbm" && part != "flga2" && part != "flga3") {
        issues.push_back({"bench_solvers", "unknown solver '" + part + "'"});
        continue;
      }
      config.bench_solvers.push_back(part);
    }
    if (config.bench_solvers.empty())
      issues.push_back({"bench_solvers", "empty solver list"});
  }

  const std::string exec_name = ex.get_string("exec", "parallel");
  if (exec_name == "serial") {
    config.exec = Exec::serial;
  } else if (exec_name == "parallel") {
    config.exec = Exec::parallel;
  } else {
    issues.push_back({"exec", "expected serial or parallel, got '" + exec_name + "'"});
  }

  config.strict = ex.get_bool("strict", false);
  config.incompressible = ex.get_bool("incompressible", false);

  for (const auto& [key, value] : kv)
    if (!ex.used.count(key)) issues.push_back({key, "unknown key"});

  if (!case_known) return config;

  // Cross-field checks that need the whole picture.
  if (config.case_id == CaseId::equilibrium_1d || config.case_id == CaseId::equilibrium_2d) {
    if (config.steps <= config.warmup && ex.has("steps"))
      issues.push_back({"warmup", "equilibrium averaging needs warmup < steps"});
  }
  if (planar && config.lx < 3 && ex.has("lx"))
    issues.push_back({"lx", "plane models require lx >= 3"});

  // A multi-entry rate vector must match the class count of a single
  // enabled order; with several orders only a broadcast scalar is coherent.
  if (config.lambda.size() > 1) {
    if (config.orders.size() > 1) {
      issues.push_back({"lambda",
                        "give a single rate when several interaction orders are enabled"});
    } else {
      const auto& desc = descriptor(config.model);
      const auto enumeration = enumerate_equivalence_classes(desc, config.orders[0].bodies);
      if (config.lambda.size() != enumeration.classes.size())
        issues.push_back({"lambda", "expected 1 or " +
                                        std::to_string(enumeration.classes.size()) +
                                        " rates for " + std::to_string(config.orders[0].bodies) +
                                        "-body " + to_string(config.model) + ", got " +
                                        std::to_string(config.lambda.size())});
    }
  }

  return config;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

CaseId case_from_string(const std::string& name) {
  if (name == "equilibrium_1d") return CaseId::equilibrium_1d;
  if (name == "equilibrium_2d") return CaseId::equilibrium_2d;
  if (name == "shockwave") return CaseId::shockwave;
  if (name == "taylor_green") return CaseId::taylor_green;
  if (name == "lid_cavity") return CaseId::lid_cavity;
  if (name == "uniform") return CaseId::uniform;
  throw std::invalid_argument("unknown case '" + name + "'");
}

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::equilibrium_1d: return "equilibrium_1d";
    case CaseId::equilibrium_2d: return "equilibrium_2d";
    case CaseId::shockwave: return "shockwave";
    case CaseId::taylor_green: return "taylor_green";
    case CaseId::lid_cavity: return "lid_cavity";
    case CaseId::uniform: return "uniform";
  }
  throw std::invalid_argument("unmapped case id");
}

CompareTarget compare_from_string(const std::string& name) {
  if (name == "none") return CompareTarget::none;
  if (name == "lbm") return CompareTarget::lbm;
  if (name == "analytic") return CompareTarget::analytic;
  if (name == "qflga") return CompareTarget::qflga;
  throw std::invalid_argument("unknown comparison target '" + name + "'");
}

std::string to_string(CompareTarget target) {
  switch (target) {
    case CompareTarget::none: return "none";
    case CompareTarget::lbm: return "lbm";
    case CompareTarget::analytic: return "analytic";
    case CompareTarget::qflga: return "qflga";
  }
  throw std::invalid_argument("unmapped comparison target");
}

int effective_cadence(const RunConfig& config) {
  if (config.snapshot_cadence >= 0) return config.snapshot_cadence;
  return config.ly == 1 ? 10 : 100;
}

RunConfig parse_config(std::istream& is, std::span<const std::string> overrides) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, std::string> kv;

  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      issues.push_back({"line " + std::to_string(line_number), "expected key = value"});
      continue;
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      issues.push_back({"line " + std::to_string(line_number), "empty key"});
      continue;
    }
    if (!kv.emplace(key, value).second)
      issues.push_back({key, "duplicate key (line " + std::to_string(line_number) + ")"});
  }

  for (const auto& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || trim(entry.substr(0, eq)).empty()) {
      issues.push_back({entry, "override must look like key=value"});
      continue;
    }
    kv[trim(entry.substr(0, eq))] = trim(entry.substr(eq + 1));
  }

  RunConfig config = build_config(kv, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return config;
}

RunConfig load_config(const std::string& path, std::span<const std::string> overrides) {
  std::ifstream file(path);
  if (!file) throw ConfigError({{path, "cannot open config file"}});
  return parse_config(file, overrides);
}

void write_config(std::ostream& os, const RunConfig& config) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "case = " << to_string(config.case_id) << "\n";
  out << "model = " << to_string(config.model) << "\n";
  out << "lx = " << config.lx << "\n";
  out << "ly = " << config.ly << "\n";
  out << "steps = " << config.steps << "\n";
  out << "warmup = " << config.warmup << "\n";
  out << "lambda = ";
  for (std::size_t i = 0; i < config.lambda.size(); ++i)
    out << (i ? "," : "") << config.lambda[i];
  out << "\n";
  for (const auto& order : config.orders)
    out << "c" << order.bodies << " = " << order.c << "\n";
  out << "snapshot_cadence = " << config.snapshot_cadence << "\n";
  out << "seed = " << config.seed << "\n";
  if (!config.output_dir.empty()) out << "output_dir = " << config.output_dir << "\n";
  out << "compare = " << to_string(config.compare) << "\n";
  if (config.lbm_tau > 0.5) out << "lbm_tau = " << config.lbm_tau << "\n";
  out << "rho1 = " << config.rho1 << "\n";
  out << "rho2 = " << config.rho2 << "\n";
  out << "sweep_min = " << config.sweep_min << "\n";
  out << "sweep_max = " << config.sweep_max << "\n";
  out << "sweep_step = " << config.sweep_step << "\n";
  out << "u_max = " << config.u_max << "\n";
  out << "rho0 = " << config.rho0 << "\n";
  out << "ux0 = " << config.ux0 << "\n";
  out << "uy0 = " << config.uy0 << "\n";
  out << "wall_speed = " << config.wall_speed << "\n";
  out << "periods_x = " << config.periods_x << "\n";
  out << "periods_y = " << config.periods_y << "\n";
  out << "shots = " << config.shots << "\n";
  if (!config.sweep_c.empty()) {
    out << "sweep_c = ";
    for (std::size_t i = 0; i < config.sweep_c.size(); ++i)
      out << (i ? "," : "") << config.sweep_c[i];
    out << "\n";
  }
  out << "bench_n = ";
  for (std::size_t i = 0; i < config.bench_n.size(); ++i)
    out << (i ? "," : "") << config.bench_n[i];
  out << "\n";
  out << "bench_reps = " << config.bench_reps << "\n";
  out << "bench_solvers = ";
  for (std::size_t i = 0; i < config.bench_solvers.size(); ++i)
    out << (i ? "," : "") << config.bench_solvers[i];
  out << "\n";
  out << "exec = " << (config.exec == Exec::serial ? "serial" : "parallel") << "\n";
  out << "strict = " << (config.strict ? "true" : "false") << "\n";
  out << "incompressible = " << (config.incompressible ? "true" : "false") << "\n";
  os << out.str();
}

}  // namespace flga
