#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "facetflow/stepper.hpp"

namespace facetflow::app {

/// Flat key = value text with dotted keys ("domain.cells = 64"). Lines
/// starting with '#' and blank lines are ignored; list values are comma
/// separated. Later assignments override earlier ones.
class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text, const std::string& origin = "<string>");
  static ConfigMap load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  int dim = 1;
  std::vector<double> lengths{1.0};
  std::vector<int> cells{32};

  std::string preset = "steady_unit";
  /// Preset parameters (data.<name>, numeric), including c0 when given.
  std::map<std::string, double> preset_params;
  std::string data_file;

  double T = 0.01;
  std::size_t j = 16;
  StepperConfig stepper;

  std::string output_dir = "facetflow_out";
  std::size_t snapshot_stride = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> test_functions{"bubble", "sin2"};
  std::size_t verify_samples = 100000;
  /// Steps of the slope solver in compare; 0 means the same as j.
  std::size_t rho_steps = 0;

  std::string sweep_axis = "j";
  std::vector<double> sweep_values;
  std::string sweep_target = "rothe";

  /// Every key with its effective value, defaults included.
  ConfigMap effective() const;
};

/// Reads a RunConfig, rejecting unknown keys and invalid values with a
/// ValidationError naming the key.
RunConfig run_config_from(const ConfigMap& map);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace facetflow::app
