#include "facetflow/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "facetflow/error.hpp"

namespace facetflow::app {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(values[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += values[i];
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

const std::set<std::string> kKnownKeys{
    "domain.dim",           "domain.lengths",         "domain.cells",
    "data.preset",          "data.file",              "time.T",
    "time.j",               "stepper.omega",          "stepper.fp_tol",
    "stepper.fp_max_iter",  "stepper.homotopy_stages", "stepper.smoothing_passes",
    "stepper.anderson_depth", "linear.method",        "linear.cg_rel_tol",
    "linear.cg_max_iter",   "linear.jacobi",          "output.dir",
    "output.snapshot_stride", "run.seed",             "diagnostics.test_functions",
    "verify.samples",       "rho.n_steps",            "sweep.axis",
    "sweep.values",         "sweep.target"};

std::size_t nonnegative(const std::string& key, long long v) {
  if (v < 0) throw ValidationError("config key '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text, const std::string& origin) {
  ConfigMap map;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError(origin + ":" + std::to_string(number) + ": empty key");
    map.values_[key] = trim(line.substr(eq + 1));
  }
  return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

long long ConfigMap::get_int(const std::string& key, long long fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_int(key, it->second);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ValidationError("config key '" + key + "': expected true or false");
}

std::vector<double> ConfigMap::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> ConfigMap::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(it->second)) out.push_back(static_cast<int>(to_int(key, item)));
  return out;
}

std::vector<std::string> ConfigMap::get_strings(const std::string& key,
                                                const std::vector<std::string>& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : split_list(it->second);
}

RunConfig run_config_from(const ConfigMap& map) {
  for (const auto& [key, value] : map.entries()) {
    if (kKnownKeys.count(key) == 0 && key.rfind("data.", 0) != 0) {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }

  RunConfig c;
  c.dim = static_cast<int>(map.get_int("domain.dim", c.dim));
  if (c.dim != 1 && c.dim != 2) throw ValidationError("config key 'domain.dim' must be 1 or 2");
  const std::vector<double> default_lengths(static_cast<std::size_t>(c.dim), 1.0);
  const std::vector<int> default_cells(static_cast<std::size_t>(c.dim), 32);
  c.lengths = map.get_doubles("domain.lengths", default_lengths);
  c.cells = map.get_ints("domain.cells", default_cells);
  if (c.lengths.size() != static_cast<std::size_t>(c.dim) ||
      c.cells.size() != static_cast<std::size_t>(c.dim)) {
    throw ValidationError("domain.lengths and domain.cells need one entry per dimension");
  }

  c.preset = map.get_string("data.preset", c.preset);
  c.data_file = map.get_string("data.file", "");
  for (const auto& [key, value] : map.entries()) {
    if (key.rfind("data.", 0) != 0 || key == "data.preset" || key == "data.file") continue;
    c.preset_params[key.substr(5)] = map.get_double(key, 0.0);
  }

  c.T = map.get_double("time.T", c.T);
  if (!(c.T > 0.0)) throw ValidationError("config key 'time.T' must be positive");
  c.j = nonnegative("time.j", map.get_int("time.j", static_cast<long long>(c.j)));
  if (c.j < 1) throw ValidationError("config key 'time.j' must be at least 1");

  StepperConfig& s = c.stepper;
  s.omega = map.get_double("stepper.omega", s.omega);
  s.fp_tol = map.get_double("stepper.fp_tol", s.fp_tol);
  s.fp_max_iter = nonnegative("stepper.fp_max_iter",
                              map.get_int("stepper.fp_max_iter", static_cast<long long>(s.fp_max_iter)));
  s.homotopy_stages = static_cast<int>(map.get_int("stepper.homotopy_stages", s.homotopy_stages));
  s.smoothing_passes = static_cast<int>(map.get_int("stepper.smoothing_passes", s.smoothing_passes));
  s.anderson_depth = static_cast<int>(map.get_int("stepper.anderson_depth", s.anderson_depth));
  const std::string method = map.get_string("linear.method", "automatic");
  if (method == "automatic") {
    s.linear.method = LinearMethod::automatic;
  } else if (method == "banded") {
    s.linear.method = LinearMethod::banded;
  } else if (method == "cg") {
    s.linear.method = LinearMethod::conjugate_gradient;
  } else {
    throw ValidationError("config key 'linear.method' must be automatic, banded or cg");
  }
  s.linear.cg_rel_tol = map.get_double("linear.cg_rel_tol", s.linear.cg_rel_tol);
  s.linear.cg_max_iter = nonnegative(
      "linear.cg_max_iter", map.get_int("linear.cg_max_iter", static_cast<long long>(s.linear.cg_max_iter)));
  s.linear.jacobi_preconditioner = map.get_bool("linear.jacobi", s.linear.jacobi_preconditioner);
  s.tau = c.T / static_cast<double>(c.j);
  s.validate();

  c.output_dir = map.get_string("output.dir", c.output_dir);
  c.snapshot_stride = nonnegative("output.snapshot_stride",
                                  map.get_int("output.snapshot_stride", static_cast<long long>(c.snapshot_stride)));
  c.seed = static_cast<std::uint64_t>(nonnegative("run.seed", map.get_int("run.seed", 0)));
  c.test_functions = map.get_strings("diagnostics.test_functions", c.test_functions);
  c.verify_samples = nonnegative("verify.samples",
                                 map.get_int("verify.samples", static_cast<long long>(c.verify_samples)));
  c.rho_steps = nonnegative("rho.n_steps", map.get_int("rho.n_steps", 0));

  c.sweep_axis = map.get_string("sweep.axis", c.sweep_axis);
  if (c.sweep_axis != "j" && c.sweep_axis != "cells" && c.sweep_axis != "tau") {
    throw ValidationError("config key 'sweep.axis' must be j, cells or tau");
  }
  c.sweep_values = map.get_doubles("sweep.values", {});
  c.sweep_target = map.get_string("sweep.target", c.sweep_target);
  if (c.sweep_target != "rothe" && c.sweep_target != "elliptic_mms") {
    throw ValidationError("config key 'sweep.target' must be rothe or elliptic_mms");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from(ConfigMap::load(path));
}

ConfigMap RunConfig::effective() const {
  ConfigMap m;
  m.set("domain.dim", std::to_string(dim));
  m.set("domain.lengths", join(lengths));
  m.set("domain.cells", join(cells));
  m.set("data.preset", preset);
  if (!data_file.empty()) m.set("data.file", data_file);
  for (const auto& [name, value] : preset_params) m.set("data." + name, format_double(value));
  m.set("time.T", format_double(T));
  m.set("time.j", std::to_string(j));
  m.set("stepper.omega", format_double(stepper.omega));
  m.set("stepper.fp_tol", format_double(stepper.fp_tol));
  m.set("stepper.fp_max_iter", std::to_string(stepper.fp_max_iter));
  m.set("stepper.homotopy_stages", std::to_string(stepper.homotopy_stages));
  m.set("stepper.smoothing_passes", std::to_string(stepper.smoothing_passes));
  m.set("stepper.anderson_depth", std::to_string(stepper.anderson_depth));
  const char* method = stepper.linear.method == LinearMethod::banded              ? "banded"
                       : stepper.linear.method == LinearMethod::conjugate_gradient ? "cg"
                                                                                   : "automatic";
  m.set("linear.method", method);
  m.set("linear.cg_rel_tol", format_double(stepper.linear.cg_rel_tol));
  m.set("linear.cg_max_iter", std::to_string(stepper.linear.cg_max_iter));
  m.set("linear.jacobi", stepper.linear.jacobi_preconditioner ? "true" : "false");
  m.set("output.dir", output_dir);
  m.set("output.snapshot_stride", std::to_string(snapshot_stride));
  m.set("run.seed", std::to_string(seed));
  m.set("diagnostics.test_functions", join(test_functions));
  m.set("verify.samples", std::to_string(verify_samples));
  m.set("rho.n_steps", std::to_string(rho_steps));
  m.set("sweep.axis", sweep_axis);
  if (!sweep_values.empty()) m.set("sweep.values", join(sweep_values));
  m.set("sweep.target", sweep_target);
  return m;
}

}  // namespace facetflow::app
