#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sitcog/cognition.h"

namespace sitcog {

struct ProductParams {
  int n_types = 10;
  int replicas_per_type = 5;
  double min_type_distance = 0.35;
  int type_attempts = 10000;
  double utility_slope = 1.0;
};

struct SpaceParams {
  int grid_width = 165;
  int grid_height = 165;
  int field_radius = 12;
  double respawn_sigma = 10.0;
};

struct CognitionParams {
  int perception_rows = 8;
  int perception_cols = 8;
  int conception_nodes = 16;
  double som_alpha0 = 0.3;
  double som_alpha_decay = 0.999;
  double som_alpha_floor = 0.01;
  double som_radius_decay = 0.999;
  double som_radius_floor = 0.5;
  // Starting neighbourhood of the attractiveness map; <= 0 means half its length.
  double conception_radius0 = 2.0;
  double threshold_rate = 0.1;
  double initial_threshold = 0.0;
};

struct AgentParams {
  int boredom_cycles = 50;           // B
  int frustration_count = 5;         // F
  double friend_strength_floor = 0.2;  // tau
  int friend_degree_max = 2;
  double max_valuation = 1.0;        // v_max
  int consumption_cycles = 5;        // D
  int admiration_window = 10;        // W
  double experiential_rate = 0.1;    // eta_e
  double social_rate = 0.2;          // eta_s
  double perturbation = 0.1;
  int relocation_radius = 40;
  int navigation_max_steps = 50;
};

struct NetworkParams {
  int ws_degree = 4;
  double ws_rewire = 0.1;
  double tie_initial = 0.5;
  double tie_strengthen = 0.1;
  double tie_decay = 0.001;
  double tie_floor = 0.05;
  double referral_strength = 0.5;
};

struct AnalysisParams {
  double coverage_cell_width = 0.05;
  int transient_cycles = 1500;
  double kde_bandwidth = 0.0;  // <= 0: Silverman's rule
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint64_t seed = 1;
  bool social = true;
  int cycles = 10000;
  int sample_every = 20;
  int n_consumers = 40;
  ProductParams products;
  SpaceParams space;
  CognitionParams cognition;
  AgentParams agent;
  NetworkParams network;
  AnalysisParams analysis;

  int n_products() const { return products.n_types * products.replicas_per_type; }
  SomSchedule som_schedule() const;

  // Sets a value by key; throws ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  // Every key with its current value, in registry order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  static std::vector<std::string> keys();

  // Problems that make a run impossible; empty when valid.
  std::vector<std::string> validate() const;
  // Soft warnings (e.g. density far from the reference ratios).
  std::vector<std::string> warnings() const;
};

// `key = value` lines, `#` comments, blank lines ignored.
void apply_config_text(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);
std::string config_text(const RunConfig& config);

}  // namespace sitcog
